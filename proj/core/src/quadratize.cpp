#include "dqof/quadratize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "dqof/brute_force.hpp"
#include "dqof/error.hpp"

namespace dqof {

namespace {

// Pair statistics keyed by i * n + j, dense for moderate n.
class PairTable {
 public:
  explicit PairTable(std::size_t n) : n_(n), dense_(n <= 4096) {
    if (dense_) values_.assign(n * n, 0);
  }
  std::uint32_t& operator[](std::pair<Index, Index> p) {
    const std::uint64_t key = static_cast<std::uint64_t>(p.first) * n_ + p.second;
    return dense_ ? values_[key] : sparse_[key];
  }
  template <class F>
  void for_each_nonzero(F f) const {
    if (dense_) {
      for (std::uint64_t key = 0; key < values_.size(); ++key) {
        if (values_[key] != 0) f(key, values_[key]);
      }
    } else {
      for (const auto& [key, v] : sparse_) {
        if (v != 0) f(key, v);
      }
    }
  }

 private:
  std::size_t n_;
  bool dense_;
  std::vector<std::uint32_t> values_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

}  // namespace

QuboProblem quadratize(const HuboProblem& hubo, double penalty) {
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
    throw std::invalid_argument("quadratize: penalty must be finite and non-negative");
  }
  const std::size_t n = hubo.size();
  QuboProblem out;
  out.original_size = n;
  out.penalty = penalty;

  // Rank pairs by cubic frequency (descending), ties by index order.
  PairTable freq(n);
  for (const auto& t : hubo.cubic()) {
    ++freq[{t.i, t.j}];
    ++freq[{t.i, t.r}];
    ++freq[{t.j, t.r}];
  }
  std::vector<std::pair<std::uint32_t, std::uint64_t>> ranked;
  freq.for_each_nonzero([&](std::uint64_t key, std::uint32_t c) { ranked.emplace_back(c, key); });
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  PairTable rank(n);  // rank + 1, so 0 means "never ranked"
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto key = ranked[k].second;
    rank[{static_cast<Index>(key / n), static_cast<Index>(key % n)}] =
        static_cast<std::uint32_t>(k + 1);
  }

  // Each cubic term takes its best-ranked pair; aux ids follow rank order.
  struct Choice {
    Index a, b, c;
  };
  std::vector<Choice> choice;
  choice.reserve(hubo.cubic().size());
  PairTable used(n);
  for (const auto& t : hubo.cubic()) {
    Choice best{t.i, t.j, t.r};
    std::uint32_t best_rank = rank[{t.i, t.j}];
    if (auto r = rank[{t.i, t.r}]; r < best_rank) {
      best = {t.i, t.r, t.j};
      best_rank = r;
    }
    if (auto r = rank[{t.j, t.r}]; r < best_rank) {
      best = {t.j, t.r, t.i};
      best_rank = r;
    }
    used[{best.a, best.b}] = best_rank;
    choice.push_back(best);
  }
  std::vector<std::uint32_t> chosen_ranks;
  used.for_each_nonzero([&](std::uint64_t, std::uint32_t r) { chosen_ranks.push_back(r); });
  std::sort(chosen_ranks.begin(), chosen_ranks.end());
  PairTable aux_of(n);  // aux index - n + 1
  for (std::size_t k = 0; k < chosen_ranks.size(); ++k) {
    const auto key = ranked[chosen_ranks[k] - 1].second;
    const auto i = static_cast<Index>(key / n);
    const auto j = static_cast<Index>(key % n);
    aux_of[{i, j}] = static_cast<std::uint32_t>(k + 1);
    out.aux.push_back({static_cast<Index>(n + k), i, j});
  }
  const std::size_t total = n + out.aux.size();

  std::vector<LinearTerm> lin(hubo.linear().begin(), hubo.linear().end());
  std::vector<QuadraticTerm> quad(hubo.quadratic().begin(), hubo.quadratic().end());
  quad.reserve(quad.size() + 3 * out.aux.size() + choice.size());
  for (const auto& a : out.aux) {
    if (penalty == 0.0) break;
    quad.push_back({a.i, a.j, penalty});
    quad.push_back({a.i, a.aux, -2.0 * penalty});
    quad.push_back({a.j, a.aux, -2.0 * penalty});
    lin.push_back({a.aux, 3.0 * penalty});
  }
  for (std::size_t t = 0; t < choice.size(); ++t) {
    const auto& c = choice[t];
    const auto w = static_cast<Index>(n + aux_of[{c.a, c.b}] - 1);
    quad.push_back({c.c, w, hubo.cubic()[t].coeff});
  }

  // Merge duplicate keys, summing in insertion order.
  std::stable_sort(quad.begin(), quad.end(), [](const auto& a, const auto& b) {
    return std::pair{a.i, a.j} < std::pair{b.i, b.j};
  });
  std::vector<QuadraticTerm> merged;
  merged.reserve(quad.size());
  for (const auto& q : quad) {
    if (!merged.empty() && merged.back().i == q.i && merged.back().j == q.j) {
      merged.back().coeff += q.coeff;
    } else {
      merged.push_back(q);
    }
  }
  quad.clear();
  quad.shrink_to_fit();
  std::stable_sort(lin.begin(), lin.end(), [](const auto& a, const auto& b) { return a.i < b.i; });
  std::vector<LinearTerm> lin_merged;
  for (const auto& l : lin) {
    if (!lin_merged.empty() && lin_merged.back().i == l.i) {
      lin_merged.back().coeff += l.coeff;
    } else {
      lin_merged.push_back(l);
    }
  }
  out.qubo = HuboProblem(total, std::move(lin_merged), std::move(merged));
  return out;
}

Assignment project(const QuboProblem& q, std::span<const std::uint8_t> x) {
  if (x.size() != q.size()) throw DimensionError("project: assignment size mismatch");
  return Assignment(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(q.original_size));
}

Assignment lift(const QuboProblem& q, std::span<const std::uint8_t> x) {
  if (x.size() != q.original_size) throw DimensionError("lift: assignment size mismatch");
  Assignment full(x.begin(), x.end());
  full.resize(q.size(), 0);
  for (const auto& a : q.aux) full[a.aux] = x[a.i] & x[a.j];
  return full;
}

namespace {

// For a fixed original assignment: energy of the original-only part, and
// the local field of every auxiliary (its linear coefficient plus the
// couplings to original variables that are set).
struct AuxFields {
  double base = 0.0;
  std::vector<double> field;
};

AuxFields aux_fields(const QuboProblem& q, std::span<const std::uint8_t> x_orig) {
  const std::size_t n = q.original_size;
  AuxFields f;
  f.field.assign(q.aux.size(), 0.0);
  for (const auto& t : q.qubo.linear()) {
    if (t.i < n) {
      if (x_orig[t.i]) f.base += t.coeff;
    } else {
      f.field[t.i - n] += t.coeff;
    }
  }
  for (const auto& t : q.qubo.quadratic()) {
    if (t.j < n) {
      if (x_orig[t.i] & x_orig[t.j]) f.base += t.coeff;
    } else if (t.i < n) {
      if (x_orig[t.i]) f.field[t.j - n] += t.coeff;
    } else {
      throw std::logic_error("qubo: auxiliary-auxiliary coupling");
    }
  }
  return f;
}

}  // namespace

QuboMinimum qubo_brute_force(const QuboProblem& q, std::size_t cap) {
  const std::size_t n = q.original_size;
  if (n > cap) {
    throw CapExceeded("qubo_brute_force: " + std::to_string(n) + " original variables exceed cap " +
                      std::to_string(cap));
  }
  QuboMinimum best;
  best.energy = std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t s = 0; s < total; ++s) {
    Assignment x = bits_from_index(s, n);
    auto f = aux_fields(q, x);
    x.resize(q.size(), 0);
    for (std::size_t a = 0; a < f.field.size(); ++a) {
      if (f.field[a] < 0.0) x[n + a] = 1;
    }
    const double e = evaluate(q.qubo, x);
    if (e < best.energy) {
      best.energy = e;
      best.x = std::move(x);
    }
  }
  return best;
}

SoundnessReport penalty_soundness_check(const HuboProblem& hubo, const QuboProblem& qubo,
                                        std::size_t cap) {
  if (hubo.size() != qubo.original_size) {
    throw DimensionError("penalty_soundness_check: QUBO was not built from this HUBO");
  }
  if (hubo.size() > cap) {
    throw CapExceeded("penalty_soundness_check: N=" + std::to_string(hubo.size()) +
                      " exceeds cap " + std::to_string(cap));
  }
  SoundnessReport rep;
  auto h = brute_force(hubo, cap);
  rep.hubo_min = h.energy;
  rep.hubo_argmin = h.x;
  auto qm = qubo_brute_force(qubo, cap);
  rep.qubo_min = qm.energy;
  rep.qubo_argmin = qm.x;

  const double scale = 1.0 + std::abs(rep.hubo_min);
  const double tol = 1e-9 * scale;
  rep.minima_agree = std::abs(rep.qubo_min - rep.hubo_min) <= tol;
  const auto projected = project(qubo, qm.x);
  rep.projection_is_minimizer = std::abs(evaluate(hubo, projected) - rep.hubo_min) <= tol;

  // Cheapest inconsistent state per original assignment: the field-optimal
  // auxiliaries if they are inconsistent, else the consistent state with its
  // cheapest auxiliary flipped.
  const std::size_t n = hubo.size();
  double worst_case = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    const Assignment x = bits_from_index(s, n);
    auto f = aux_fields(qubo, x);
    if (f.field.empty()) break;
    double optimal = f.base;
    double consistent = f.base;
    bool optimal_consistent = true;
    double cheapest_flip = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < f.field.size(); ++a) {
      const auto& def = qubo.aux[a];
      const bool w_consistent = x[def.i] & x[def.j];
      const bool w_opt = f.field[a] < 0.0;
      if (w_opt) optimal += f.field[a];
      if (w_consistent) consistent += f.field[a];
      if (w_opt != w_consistent) optimal_consistent = false;
      cheapest_flip = std::min(cheapest_flip, std::abs(f.field[a]));
    }
    const double inconsistent = optimal_consistent ? consistent + cheapest_flip : optimal;
    worst_case = std::min(worst_case, inconsistent);
  }
  rep.violation_margin = std::isfinite(worst_case) ? worst_case - rep.hubo_min
                                                   : std::numeric_limits<double>::infinity();
  rep.distorted = !(rep.minima_agree && rep.projection_is_minimizer && rep.violation_margin > 0.0);
  return rep;
}

}  // namespace dqof
