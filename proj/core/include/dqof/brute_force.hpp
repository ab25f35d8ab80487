#pragma once

#include <cstddef>

#include "dqof/hubo.hpp"

namespace dqof {

inline constexpr std::size_t kDefaultBruteForceCap = 24;

struct BruteForceResult {
  Assignment x;
  double energy = 0.0;
};

/// Exhaustive minimization over all 2^N assignments. Ties are broken toward
/// the smallest integer value of the assignment (bit j = x_j). Throws
/// CapExceeded when N > cap.
BruteForceResult brute_force(const HuboProblem& problem,
                             std::size_t cap = kDefaultBruteForceCap);

}  // namespace dqof
