#include "dqof/engine.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "dqof/error.hpp"

namespace dqof {

namespace {

// Stream tags for derive_seed paths.
constexpr std::uint64_t kInitTag = 0x1A17;
constexpr std::uint64_t kDecomposeTag = 0xDEC0;
constexpr std::uint64_t kSolveTag = 0x501E;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<std::vector<Index>> random_subsets(const HuboProblem& problem, std::size_t n,
                                               std::size_t m, Rng& rng) {
  const std::size_t total = problem.size();
  if (n > total) throw std::invalid_argument("random_subsets: n exceeds N");
  std::vector<std::vector<Index>> out(m);
  std::vector<Index> pool(total);
  for (auto& subset : out) {
    for (std::size_t v = 0; v < total; ++v) pool[v] = static_cast<Index>(v);
    // Partial Fisher-Yates: the first n slots become a uniform n-subset.
    for (std::size_t k = 0; k < n; ++k) {
      const auto pick = k + static_cast<std::size_t>(rng.below(total - k));
      std::swap(pool[k], pool[pick]);
    }
    subset.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(subset.begin(), subset.end());
  }
  return out;
}

std::size_t DqofConfig::resolved_subs(std::size_t n_vars) const {
  if (subs_per_iteration != 0) return subs_per_iteration;
  if (sub_size == 0) return 0;
  return 2 * ((n_vars + sub_size - 1) / sub_size);
}

void DqofConfig::validate(std::size_t n_vars) const {
  if (sub_size == 0) throw std::invalid_argument("config: sub_size must be >= 1");
  if (sub_size > n_vars) {
    throw std::invalid_argument("config: sub_size " + std::to_string(sub_size) +
                                " exceeds problem size " + std::to_string(n_vars));
  }
  if (instances == 0) throw std::invalid_argument("config: instances must be >= 1");
  if (iterations == 0) throw std::invalid_argument("config: iterations must be >= 1");
  if (cluster_size == 0) throw std::invalid_argument("config: cluster_size must be >= 1");
  if (qaoa.shots == 0) throw std::invalid_argument("config: shots must be >= 1");
  if (qaoa.budget == 0) throw std::invalid_argument("config: budget must be >= 1");
  if (sub_size > qaoa.qubit_cap) {
    throw CapExceeded("config: sub_size " + std::to_string(sub_size) +
                      " exceeds the simulator cap of " + std::to_string(qaoa.qubit_cap));
  }
  if (!decomposition) throw std::invalid_argument("config: no decomposition operator");
}

std::vector<SubHubo> decompose(const HuboProblem& problem, std::size_t n, std::size_t m, Rng& rng,
                               const DecompositionOperator& op) {
  if (n > problem.size()) throw std::invalid_argument("decompose: n exceeds N");
  auto subsets = op(problem, n, m, rng);
  std::vector<SubHubo> subs;
  subs.reserve(subsets.size());
  for (const auto& s : subsets) subs.push_back(extract_sub_hubo(problem, s));
  return subs;
}

Assignment aggregate(const HuboProblem& problem, Assignment x,
                     std::span<const LocalSolution> solutions, AggregationStats* stats) {
  if (x.size() != problem.size()) throw DimensionError("aggregate: assignment size mismatch");
  for (const auto& sol : solutions) {
    if (sol.subset.size() != sol.bits.size()) {
      throw std::invalid_argument("aggregate: subset and local solution differ in length");
    }
    for (Index i : sol.subset) {
      if (i >= problem.size()) throw std::invalid_argument("aggregate: subset index out of range");
    }
  }
  for (const auto& sol : solutions) {
    for (std::size_t j = 0; j < sol.subset.size(); ++j) {
      const Index i = sol.subset[j];
      if (stats) ++stats->proposals;
      if (x[i] == sol.bits[j]) continue;
      if (evaluate_flip_delta(problem, x, i) < 0.0) {
        x[i] = sol.bits[j];
        if (stats) ++stats->accepted;
      }
    }
  }
  return x;
}

InstanceState run_instance(const HuboProblem& problem, const DqofConfig& config,
                           std::size_t instance) {
  const std::size_t n_vars = problem.size();
  config.validate(n_vars);
  const std::size_t n = config.sub_size;
  const std::size_t m = config.resolved_subs(n_vars);
  const auto t_start = Clock::now();

  InstanceState st;
  st.id = instance;
  {
    Rng init(derive_seed(config.seed, {instance, kInitTag}));
    st.x.resize(n_vars);
    for (auto& b : st.x) b = init.bit() ? 1 : 0;
  }
  st.energy = evaluate(problem, st.x);
  st.trace.push_back(st.energy);

  const std::size_t cluster = std::max<std::size_t>(1, config.cluster_size);
  for (std::size_t t = 0; t < config.iterations; ++t) {
    auto t0 = Clock::now();
    Rng rng(derive_seed(config.seed, {instance, t, kDecomposeTag}));
    std::vector<SubHubo> subs = decompose(problem, n, m, rng, config.decomposition);
    st.timings.decompose += seconds_since(t0);

    t0 = Clock::now();
    std::vector<std::uint64_t> seeds(subs.size());
    for (std::size_t k = 0; k < subs.size(); ++k) {
      seeds[k] = derive_seed(config.seed, {instance, t, k, kSolveTag});
    }
    std::vector<SubSolution> solutions(subs.size());
    if (cluster == 1) {
      tbb::parallel_for(std::size_t{0}, subs.size(), [&](std::size_t k) {
        solutions[k] = solve_sub_hubo(subs[k], config.qaoa, seeds[k]);
      });
    } else {
      const std::size_t groups = (subs.size() + cluster - 1) / cluster;
      tbb::parallel_for(std::size_t{0}, groups, [&](std::size_t g) {
        const std::size_t lo = g * cluster;
        const std::size_t hi = std::min(subs.size(), lo + cluster);
        std::vector<SubHubo> members(subs.begin() + static_cast<std::ptrdiff_t>(lo),
                                     subs.begin() + static_cast<std::ptrdiff_t>(hi));
        auto comb = combine(std::move(members), config.qaoa.qubit_cap);
        auto res = solve_combined(comb, config.qaoa,
                                  std::span<const std::uint64_t>(seeds).subspan(lo, hi - lo),
                                  config.cluster_mode);
        for (std::size_t k = lo; k < hi; ++k) solutions[k] = std::move(res.solutions[k - lo]);
      });
    }
    st.timings.solve += seconds_since(t0);

    t0 = Clock::now();
    std::vector<LocalSolution> locals;
    locals.reserve(subs.size());
    for (std::size_t k = 0; k < subs.size(); ++k) locals.push_back({subs[k].subset, solutions[k].x});
    AggregationStats stats;
    st.x = aggregate(problem, std::move(st.x), locals, &stats);
    if (stats.accepted > 0) st.energy = evaluate(problem, st.x);
    st.trace.push_back(st.energy);
    st.timings.aggregate += seconds_since(t0);
  }
  st.timings.total = seconds_since(t_start);
  return st;
}

RunReport run_dqof(const HuboProblem& problem, const DqofConfig& config) {
  config.validate(problem.size());
  const auto t_start = Clock::now();
  RunReport report;
  report.config = config;
  report.problem_size = problem.size();
  report.problem_fingerprint = problem.fingerprint();
  report.resolved_subs = config.resolved_subs(problem.size());
  report.instances.resize(config.instances);

  const int workers = config.workers == 0
                          ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))
                          : static_cast<int>(config.workers);
  tbb::task_arena arena(workers);
  arena.execute([&] {
    tbb::parallel_for(std::size_t{0}, config.instances, [&](std::size_t p) {
      report.instances[p] = run_instance(problem, config, p);
    });
  });

  std::size_t best = 0;
  for (std::size_t p = 1; p < report.instances.size(); ++p) {
    if (report.instances[p].energy < report.instances[best].energy) best = p;
  }
  report.best_instance = best;
  report.best_assignment = report.instances[best].x;
  report.best_energy = report.instances[best].energy;
  for (const auto& inst : report.instances) {
    report.timings.decompose += inst.timings.decompose;
    report.timings.solve += inst.timings.solve;
    report.timings.aggregate += inst.timings.aggregate;
  }
  report.timings.total = seconds_since(t_start);
  return report;
}

void attach_reference(RunReport& report, double reference_energy) {
  report.reference_energy = reference_energy;
  report.approximation = approximation_ratio(report.best_energy, reference_energy);
}

}  // namespace dqof
