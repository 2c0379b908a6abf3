#pragma once

#include <cstdint>
#include <vector>

#include "anyon/stochastic.hpp"

namespace anyon {

struct EnsembleResult {
  std::vector<double> times;
  std::vector<Matrix> mean_states;
  /// Standard error of the mean per entry: real part for Re ρ_ij, imaginary
  /// part for Im ρ_ij.
  std::vector<Matrix> standard_errors;
  std::size_t n_traj = 0;
};

/// Trajectories are grouped into fixed leaves of this many stream ids.
inline constexpr std::size_t kLeafSize = 64;

/// Mean over stream ids 0..n_traj−1 of `master_seed`. Leaves of 64
/// trajectories are summed in stream order and then combined by a fixed
/// pairwise tree, so the result is bit-identical for any worker count.
/// workers = 0 uses the OpenMP default. Failed trajectories do not stop the
/// others; afterwards a TrajectoryError lists every failed stream id.
EnsembleResult ensemble_average(const StochasticModel& model, std::size_t n_traj, std::uint64_t master_seed,
                                int workers = 0);

/// Same reduction on one thread.
EnsembleResult ensemble_average_serial(const StochasticModel& model, std::size_t n_traj,
                                       std::uint64_t master_seed);

}  // namespace anyon
