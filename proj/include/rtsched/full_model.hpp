#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtsched/model.hpp"

namespace rtsched {

/// Index of x[i][j][k][l] in the model's variable space.
using VarIndex = std::size_t;

struct VarKey {
  std::size_t linac = 0;    // 0-based
  std::size_t patient = 0;  // 0-based batch position
  int day = 1;              // horizon-relative k
  int session = 1;          // 1-based l
  bool operator==(const VarKey&) const = default;
};

/// Reasons a variable is fixed to zero, one bit per family.
enum FixBits : std::uint8_t {
  kFixEligibility = 1u << 0,   // (1)
  kFixRelease = 1u << 1,       // (2)
  kFixStartWeekday = 1u << 2,  // (3)
  kFixFirstDay = 1u << 3,      // (4)
  kFixNoSuccessor = 1u << 4,   // (5): next session has no valid day inside the horizon
};

/// The 4-index binary program: x[i][j][k][l] = 1 iff session l of patient j
/// is delivered on linac i on horizon day k.
class FullModel {
 public:
  /// x_from = x_to, from the fixed inter-session gaps.
  struct Link {
    VarIndex from = 0;
    VarIndex to = 0;
  };
  struct Term {
    VarIndex var = 0;
    std::int64_t coef = 0;
  };

  std::size_t num_linacs() const { return num_linacs_; }
  std::size_t num_patients() const { return sessions_.size(); }
  int horizon_length() const { return horizon_.length; }
  const Horizon& horizon() const { return horizon_; }
  int num_sessions(std::size_t patient) const { return sessions_[patient]; }
  std::size_t num_variables() const { return fixed_.size(); }

  VarIndex index(std::size_t linac, std::size_t patient, int day, int session) const;
  VarKey key(VarIndex var) const;

  std::uint8_t fixed_mask(VarIndex var) const { return fixed_[var]; }
  bool is_fixed(VarIndex var) const { return fixed_[var] != 0; }

  const std::vector<Link>& links() const { return links_; }

  /// Variables of the assignment row for (patient, session).
  std::vector<VarIndex> assignment_row(std::size_t patient, int session) const;

  /// Terms and right-hand side of the capacity row for (linac, day k).
  std::vector<Term> capacity_terms(std::size_t linac, int day) const;
  std::int64_t capacity_rhs(std::size_t linac, int day) const {
    return capacity_rhs_[linac * static_cast<std::size_t>(horizon_.length) +
                         static_cast<std::size_t>(day - 1)];
  }

  /// Objective coefficients over first-session variables (nonzero only).
  const std::vector<Term>& objective(Objective o) const {
    return objectives_[static_cast<std::size_t>(static_cast<int>(o) - 1)];
  }

  int duration(std::size_t patient, int session) const {
    return durations_[patient][static_cast<std::size_t>(session - 1)];
  }

  /// Evaluates every row on a 0/1 vector and reports violated rows by family.
  std::vector<Violation> violations(std::span<const std::uint8_t> x) const;

  /// Dot product of an objective with a 0/1 vector.
  std::int64_t evaluate(Objective o, std::span<const std::uint8_t> x) const;

 private:
  friend FullModel build_full_model(std::span<const PatientCase>, const BookingState&, Horizon);

  std::size_t num_linacs_ = 0;
  Horizon horizon_;
  std::vector<int> sessions_;
  std::vector<VarIndex> base_;
  std::vector<std::vector<int>> durations_;
  std::vector<std::uint8_t> fixed_;
  std::vector<Link> links_;
  std::vector<std::int64_t> capacity_rhs_;
  std::array<std::vector<Term>, 4> objectives_;
};

/// Materializes constraints (1)-(7) with capacities reduced by the ledger's
/// committed load. Throws HorizonTooShort when a patient cannot be placed.
FullModel build_full_model(std::span<const PatientCase> batch, const BookingState& state,
                           Horizon horizon);

/// 0/1 vector of a session placement (placements outside the horizon dropped).
std::vector<std::uint8_t> to_vector(const FullModel& model,
                                    std::span<const SessionPlacement> placements);

}  // namespace rtsched
