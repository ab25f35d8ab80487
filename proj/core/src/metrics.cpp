#include "dqof/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dqof {

ApproximationRatio approximation_ratio(double energy, double optimum) {
  if (energy == optimum) return {1.0, true};
  if (optimum < 0.0) return {energy / optimum, true};
  return {std::numeric_limits<double>::quiet_NaN(), false};
}

RelativeAccuracy relative_accuracy(double energy, double best, double worst) {
  if (worst < best) throw std::invalid_argument("relative_accuracy: worst < best");
  if (worst == best) return {1.0, true};
  return {std::clamp((worst - energy) / (worst - best), 0.0, 1.0), false};
}

}  // namespace dqof
