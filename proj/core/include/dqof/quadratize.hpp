#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dqof/hubo.hpp"

namespace dqof {

/// Auxiliary variable `aux` stands for the product x_i * x_j.
struct AuxDefinition {
  Index aux;
  Index i, j;
};

/// Degree-2 reformulation of a HUBO. Variables [0, original_size) are the
/// original ones; auxiliaries follow.
struct QuboProblem {
  HuboProblem qubo;
  std::size_t original_size = 0;
  std::vector<AuxDefinition> aux;
  double penalty = 0.0;

  std::size_t size() const noexcept { return qubo.size(); }
};

/// Rosenberg substitution. Every cubic term picks one of its three index
/// pairs: pairs are ranked once by how many cubic terms contain them (ties
/// lexicographic) and each term takes its best-ranked pair, so popular pairs
/// share one auxiliary w. K x_i x_j x_r becomes K w x_r and each auxiliary
/// adds penalty * (x_i x_j - 2 x_i w - 2 x_j w + 3 w), which is zero iff
/// w = x_i x_j and at least `penalty` otherwise. Linear and quadratic terms
/// pass through. Throws std::invalid_argument for a negative penalty.
QuboProblem quadratize(const HuboProblem& hubo, double penalty);

/// Original-variable part of a QUBO assignment.
Assignment project(const QuboProblem& q, std::span<const std::uint8_t> x);
/// Extends an original assignment with consistent auxiliaries.
Assignment lift(const QuboProblem& q, std::span<const std::uint8_t> x);

struct QuboMinimum {
  Assignment x;
  double energy = 0.0;
};

/// Exact QUBO minimum. Auxiliaries never couple to each other, so for each
/// original assignment the best auxiliary values follow from the sign of
/// their local fields; only the 2^original_size original assignments are
/// enumerated. Ties go to the smallest original index, then w = 0.
QuboMinimum qubo_brute_force(const QuboProblem& q, std::size_t cap = 24);

struct SoundnessReport {
  double hubo_min = 0.0;
  double qubo_min = 0.0;
  Assignment hubo_argmin;
  Assignment qubo_argmin;
  /// |qubo_min - hubo_min| within 1e-9 relative.
  bool minima_agree = false;
  /// The projected QUBO minimizer is a HUBO minimizer.
  bool projection_is_minimizer = false;
  /// Lowest QUBO energy over assignments with at least one inconsistent
  /// auxiliary, minus hubo_min. Non-positive means the penalty fails to
  /// protect the optimum.
  double violation_margin = 0.0;
  bool distorted = true;
};

/// Brute-forces both problems and compares. Throws CapExceeded when the
/// original size exceeds `cap`.
SoundnessReport penalty_soundness_check(const HuboProblem& hubo, const QuboProblem& qubo,
                                        std::size_t cap = 20);

}  // namespace dqof
