#include "dqof/brute_force.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "dqof/error.hpp"

namespace dqof {

namespace {

// Incremental Gray-code energies drift by a few ulps per step. Every state
// whose running energy lies within `tol` of the running minimum is kept as a
// candidate and re-scored exactly, so the reported optimum and its
// tie-break never depend on accumulated rounding.
class Candidates {
 public:
  Candidates(const HuboProblem& problem, double tol) : problem_(problem), tol_(tol) {}

  void offer(std::uint64_t state, double energy) {
    if (energy > running_min_ + tol_) return;
    running_min_ = std::min(running_min_, energy);
    pending_.emplace_back(state, energy);
    if (pending_.size() > kMaxPending) {
      prune();
      if (pending_.size() > kMaxPending / 2) collapse();
    }
  }

  std::pair<std::uint64_t, double> finish() {
    prune();
    collapse();
    return pending_.front();
  }

 private:
  static constexpr std::size_t kMaxPending = 1024;

  void prune() {
    std::erase_if(pending_, [this](const auto& p) { return p.second > running_min_ + tol_; });
  }

  // Replace all pending states by the single exact best among them.
  void collapse() {
    std::uint64_t best_state = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (const auto& p : pending_) {
      const double e = evaluate(problem_, bits_from_index(p.first, problem_.size()));
      if (e < best_energy || (e == best_energy && p.first < best_state)) {
        best_energy = e;
        best_state = p.first;
      }
    }
    pending_.assign(1, {best_state, best_energy});
  }

  const HuboProblem& problem_;
  double tol_;
  double running_min_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::uint64_t, double>> pending_;
};

}  // namespace

BruteForceResult brute_force(const HuboProblem& problem, std::size_t cap) {
  const std::size_t n = problem.size();
  if (n > cap) {
    throw CapExceeded("brute_force: N=" + std::to_string(n) + " exceeds the limit of " +
                      std::to_string(cap) + " variables");
  }
  if (n == 0) return {};
  if (n > 62) throw CapExceeded("brute_force: N above 62 is not enumerable");

  double scale = 1.0;
  for (const auto& t : problem.linear()) scale += std::abs(t.coeff);
  for (const auto& t : problem.quadratic()) scale += std::abs(t.coeff);
  for (const auto& t : problem.cubic()) scale += std::abs(t.coeff);
  constexpr std::uint64_t kResyncMask = (std::uint64_t{1} << 16) - 1;

  Candidates cand(problem, 1e-9 * scale);
  Assignment x(n, 0);
  double energy = 0.0;
  cand.offer(0, energy);

  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto bit = static_cast<Index>(std::countr_zero(step));
    energy += evaluate_flip_delta(problem, x, bit);
    x[bit] ^= 1U;
    if ((step & kResyncMask) == 0) energy = evaluate(problem, x);
    cand.offer(step ^ (step >> 1), energy);
  }
  const auto [state, best] = cand.finish();
  return {bits_from_index(state, n), best};
}

}  // namespace dqof
