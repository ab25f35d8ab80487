#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dqof {

struct CobylaOptions {
  /// Initial and final trust-region radius.
  double rho_begin = 1.0;
  double rho_end = 1e-4;
  /// Hard cap on objective evaluations, including the initial simplex.
  std::size_t max_evaluations = 200;
};

struct CobylaResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Unconstrained COBYLA: derivative-free trust-region minimization driven by
/// linear interpolation models on a simplex of n+1 points. The simplex
/// pivot is always the best point seen, so the returned value is the best
/// objective value evaluated and never exceeds f(x0). Fully deterministic;
/// the budget only decides where the trajectory stops.
CobylaResult cobyla_minimize(const Objective& f, std::vector<double> x0,
                             const CobylaOptions& options = {});

}  // namespace dqof
