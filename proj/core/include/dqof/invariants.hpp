#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dqof {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Randomized self-checks of the library's core identities: energy and
/// flip-delta consistency, sub-problem extraction, brute force, circuit
/// norm and zero-angle laws, block versus dense simulation, aggregation
/// monotonicity, quadratization at consistent auxiliaries, LP objective
/// equivalence and the FM mapping. Deterministic in `seed`.
std::vector<CheckResult> run_invariant_suites(std::uint64_t seed);

}  // namespace dqof
