#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dqof/hubo.hpp"
#include "dqof/quadratize.hpp"

namespace dqof {

/// Geometric cooling from t0 to tf over `sweeps` sweeps of N single-bit
/// moves each.
struct AnnealSchedule {
  double t0 = 1.0;
  double tf = 1e-3;
  std::size_t sweeps = 2000;

  /// Per-sweep factor: t0 * cooling^(sweeps-1) == tf.
  double cooling() const;
  double temperature(std::size_t sweep) const;
  /// Throws std::invalid_argument unless t0 > tf > 0 and sweeps >= 1.
  void validate() const;

  /// t0 = 10 * max|coefficient| (1 for a zero problem), tf = 1e-3,
  /// 2000 sweeps.
  static AnnealSchedule defaults(const HuboProblem& problem);
};

struct AnnealOptions {
  /// When set, the schedule runs on elapsed time instead of sweep count:
  /// T = t0 * (tf/t0)^(elapsed/limit) and the run stops at the limit. Not
  /// reproducible across machines.
  std::optional<double> time_limit_seconds;
  bool record_trace = false;
};

struct AnnealResult {
  Assignment x;
  /// evaluate(problem, x), recomputed from scratch.
  double energy = 0.0;
  std::size_t sweeps = 0;
  /// Best-ever energy after each sweep when requested.
  std::vector<double> trace;
  double seconds = 0.0;
};

/// Single-bit-flip Metropolis over variables 0..N-1 in order each sweep,
/// starting from a uniformly random assignment. Returns the best state ever
/// visited. Deterministic per seed without a time limit.
AnnealResult simulated_annealing(const HuboProblem& problem, const AnnealSchedule& schedule,
                                 std::uint64_t seed, const AnnealOptions& options = {});

/// Anneals the QUBO; x and energy refer to the full QUBO assignment.
AnnealResult simulated_annealing(const QuboProblem& problem, const AnnealSchedule& schedule,
                                 std::uint64_t seed, const AnnealOptions& options = {});

}  // namespace dqof
