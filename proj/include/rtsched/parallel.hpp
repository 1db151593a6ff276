#pragma once

namespace rtsched {

/// Selects between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Execution { Serial, Parallel };

/// Number of OpenMP threads the parallel kernels will use.
int max_threads();

/// Sets the OpenMP thread count for subsequent parallel kernels (>= 1).
void set_threads(int threads);

}  // namespace rtsched
