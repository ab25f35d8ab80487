#include "dqof/invariants.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "dqof/brute_force.hpp"
#include "dqof/cluster.hpp"
#include "dqof/engine.hpp"
#include "dqof/fm.hpp"
#include "dqof/milp.hpp"
#include "dqof/qaoa.hpp"
#include "dqof/quadratize.hpp"
#include "dqof/rng.hpp"

namespace dqof {

namespace {

Assignment random_bits(std::size_t n, Rng& rng) {
  Assignment x(n);
  for (auto& b : x) b = rng.bit() ? 1 : 0;
  return x;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

// Returns an empty string on success, otherwise the first failure.
using Check = std::function<std::string(Rng&)>;

std::string energy_consistency(Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const auto p = random_hubo(3 + rng.below(14), rng.next());
    auto x = random_bits(p.size(), rng);
    for (Index i = 0; i < p.size(); ++i) {
      const double before = evaluate(p, x);
      const double d = evaluate_flip_delta(p, x, i);
      x[i] ^= 1;
      if (!close(evaluate(p, x) - before, d, 1e-9)) return "flip delta disagrees with evaluate";
    }
  }
  return {};
}

std::string extraction(Rng& rng) {
  for (int t = 0; t < 20; ++t) {
    const auto p = random_hubo(6 + rng.below(10), rng.next());
    std::vector<Index> subset;
    for (Index i = 0; i < p.size(); ++i) {
      if (rng.bit()) subset.push_back(i);
    }
    if (subset.empty()) subset.push_back(0);
    const auto sub = extract_sub_hubo(p, subset);
    // Outside bits at zero: sub energy equals global energy.
    Assignment local = random_bits(subset.size(), rng);
    Assignment global(p.size(), 0);
    for (std::size_t j = 0; j < subset.size(); ++j) global[subset[j]] = local[j];
    if (!close(evaluate(sub.problem, local), evaluate(p, global), 1e-9)) {
      return "sub-problem energy differs from the embedded global energy";
    }
  }
  return {};
}

std::string brute_lower_bound(Rng& rng) {
  for (int t = 0; t < 10; ++t) {
    const auto p = random_hubo(4 + rng.below(7), rng.next());
    const auto b = brute_force(p);
    for (int k = 0; k < 50; ++k) {
      if (evaluate(p, random_bits(p.size(), rng)) < b.energy - 1e-9) return "state below brute-force minimum";
    }
  }
  return {};
}

std::string circuit_laws(Rng& rng) {
  for (int t = 0; t < 10; ++t) {
    const auto p = random_hubo(2 + rng.below(6), rng.next());
    const auto diag = build_cost_diagonal(p);
    double mean = 0.0;
    for (double e : diag.energies) mean += e;
    mean /= static_cast<double>(diag.energies.size());
    const auto zero = run_circuit(diag, QaoaParams::constant(2, 0.0, 0.0));
    if (!close(expectation(zero, diag), mean, 1e-12)) return "zero-angle expectation is not the mean energy";
    const auto psi = run_circuit(diag, QaoaParams::constant(2, rng.uniform() * 3, rng.uniform() * 3));
    if (std::abs(psi.norm_squared() - 1.0) > 1e-9) return "norm not preserved";
  }
  return {};
}

std::string block_vs_dense(Rng& rng) {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t n = 1; n * m <= 12 && n <= 4; ++n) {
      const auto p = random_hubo(m * n, rng.next());
      std::vector<SubHubo> subs;
      BlockParams params;
      for (std::size_t k = 0; k < m; ++k) {
        std::vector<Index> s(n);
        for (std::size_t j = 0; j < n; ++j) s[j] = static_cast<Index>(k * n + j);
        subs.push_back(extract_sub_hubo(p, s));
        params.push_back(QaoaParams::constant(2, rng.uniform(), rng.uniform()));
      }
      const auto comb = combine(std::move(subs));
      const auto blocks = simulate_combined_blockwise(comb, params);
      const auto joint = joint_state(blocks).probabilities();
      const auto dense = simulate_combined_dense(comb, params).probabilities();
      for (std::size_t z = 0; z < dense.size(); ++z) {
        if (std::abs(joint[z] - dense[z]) > 1e-10) return "blockwise and dense probabilities differ";
      }
    }
  }
  return {};
}

std::string aggregation(Rng& rng) {
  for (int t = 0; t < 100; ++t) {
    const auto p = random_hubo(6 + rng.below(10), rng.next());
    Assignment x = random_bits(p.size(), rng);
    const double before = evaluate(p, x);
    auto subs = random_subsets(p, 1 + rng.below(p.size()), 3, rng);
    std::vector<Assignment> bits;
    for (const auto& s : subs) bits.push_back(random_bits(s.size(), rng));
    std::vector<LocalSolution> sols;
    for (std::size_t k = 0; k < subs.size(); ++k) sols.push_back({subs[k], bits[k]});
    x = aggregate(p, x, sols);
    if (evaluate(p, x) > before + 1e-9 * (1.0 + std::abs(before))) return "aggregation raised the energy";
  }
  return {};
}

std::string quadratization(Rng& rng) {
  for (int t = 0; t < 10; ++t) {
    const auto p = random_hubo(3 + rng.below(8), rng.next());
    const auto q = quadratize(p, 5.0);
    for (int k = 0; k < 20; ++k) {
      const auto x = random_bits(p.size(), rng);
      if (!close(evaluate(q.qubo, lift(q, x)), evaluate(p, x), 1e-9)) {
        return "QUBO energy at consistent auxiliaries differs from HUBO energy";
      }
    }
  }
  return {};
}

std::string lp_equivalence(Rng& rng) {
  for (int t = 0; t < 5; ++t) {
    const auto p = random_hubo(3 + rng.below(6), rng.next());
    const auto model = linearize_to_milp(p);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << p.size()); ++s) {
      const auto x = bits_from_index(s, p.size());
      const auto v = implied_values(p, model, x);
      if (!milp_feasible(model, v)) return "implied point infeasible";
      if (!close(milp_objective(model, v), evaluate(p, x), 1e-9)) return "LP objective differs from energy";
    }
  }
  return {};
}

std::string fm_mapping(Rng& rng) {
  for (int t = 0; t < 5; ++t) {
    const std::size_t n = 2 + rng.below(7), k = 1 + rng.below(4);
    std::vector<double> h(n), v(n * k);
    for (auto& a : h) a = rng.normal();
    for (auto& a : v) a = rng.normal();
    const FactorizationMachine fm(rng.normal(), h, v, k);
    const auto ex = fm_to_hubo(fm);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      const auto x = bits_from_index(s, n);
      if (!close(fm_predict(fm, x), ex.bias + evaluate(ex.hubo, x), 1e-9)) {
        return "FM prediction differs from bias plus extracted energy";
      }
    }
  }
  return {};
}

}  // namespace

std::vector<CheckResult> run_invariant_suites(std::uint64_t seed) {
  const std::vector<std::pair<std::string, Check>> checks{
      {"energy-flip-consistency", energy_consistency},
      {"sub-hubo-extraction", extraction},
      {"brute-force-lower-bound", brute_lower_bound},
      {"circuit-norm-and-zero-angle", circuit_laws},
      {"blockwise-equals-dense", block_vs_dense},
      {"aggregation-monotone", aggregation},
      {"quadratization-consistent-aux", quadratization},
      {"lp-objective-equivalence", lp_equivalence},
      {"fm-mapping-identity", fm_mapping},
  };
  std::vector<CheckResult> out;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    Rng rng(derive_seed(seed, {k}));
    CheckResult r{checks[k].first, false, {}};
    try {
      r.detail = checks[k].second(rng);
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dqof
