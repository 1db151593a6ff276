#pragma once

#include <string>

#include "rtsched/full_model.hpp"

namespace rtsched {

/// Writes the model in CPLEX LP text format with the chosen objective.
/// Variables are named x_i_j_k_l (1-based linac, batch position, horizon day,
/// session). Variables fixed to zero appear in the Bounds section. The output
/// depends only on the model, so identical inputs give identical bytes.
std::string export_lp(const FullModel& model, Objective objective);

}  // namespace rtsched
