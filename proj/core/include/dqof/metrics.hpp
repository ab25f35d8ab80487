#pragma once

namespace dqof {

struct ApproximationRatio {
  double value = 0.0;
  /// False when the reference is non-negative and differs from the energy;
  /// the ratio is then meaningless for minimization and value is NaN.
  bool comparable = true;
};

/// E / E_opt for negative optima; 1 when E == E_opt (including 0 == 0).
ApproximationRatio approximation_ratio(double energy, double optimum);

struct RelativeAccuracy {
  double value = 0.0;
  /// Set when best == worst; value is then 1.
  bool degenerate = false;
};

/// Min-max normalized quality (worst - E) / (worst - best), clipped to
/// [0, 1]. Throws std::invalid_argument when worst < best.
RelativeAccuracy relative_accuracy(double energy, double best, double worst);

struct QualityMetrics {
  double energy = 0.0;
  double reference_energy = 0.0;
  ApproximationRatio approximation_ratio;
  RelativeAccuracy relative_accuracy;
};

}  // namespace dqof
