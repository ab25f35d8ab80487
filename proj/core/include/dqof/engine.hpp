#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dqof/cluster.hpp"
#include "dqof/hubo.hpp"
#include "dqof/metrics.hpp"
#include "dqof/qaoa.hpp"
#include "dqof/rng.hpp"

namespace dqof {

/// Chooses m variable subsets of size n. Each returned subset must be
/// strictly increasing.
using DecompositionOperator = std::function<std::vector<std::vector<Index>>(
    const HuboProblem& problem, std::size_t n, std::size_t m, Rng& rng)>;

/// Independent uniform n-subsets; different subsets may overlap.
std::vector<std::vector<Index>> random_subsets(const HuboProblem& problem, std::size_t n,
                                               std::size_t m, Rng& rng);

struct DqofConfig {
  /// n: variables per sub-problem.
  std::size_t sub_size = 8;
  /// m: sub-problems per iteration. 0 selects ceil(N/n) * 2.
  std::size_t subs_per_iteration = 0;
  /// P: independent instances.
  std::size_t instances = 10;
  /// T: decompose/solve/aggregate rounds per instance.
  std::size_t iterations = 50;
  /// Sub-problems per combined circuit; 1 disables clustering. A trailing
  /// remainder forms a smaller final cluster.
  std::size_t cluster_size = 1;
  ClusterParamMode cluster_mode = ClusterParamMode::kIndependent;
  QaoaSettings qaoa;
  std::uint64_t seed = 0;
  /// Worker threads; 0 uses the hardware concurrency. Never affects results.
  std::size_t workers = 1;
  DecompositionOperator decomposition = random_subsets;

  std::size_t resolved_subs(std::size_t n_vars) const;
  /// Throws std::invalid_argument on inconsistent settings for a problem
  /// of n_vars variables.
  void validate(std::size_t n_vars) const;
};

/// Random subsets turned into sub-problems. Throws std::invalid_argument
/// when n > N.
std::vector<SubHubo> decompose(const HuboProblem& problem, std::size_t n, std::size_t m, Rng& rng,
                               const DecompositionOperator& op = random_subsets);

/// A local solution and the global variables it speaks for.
struct LocalSolution {
  std::span<const Index> subset;
  std::span<const std::uint8_t> bits;
};

struct AggregationStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
};

/// Bitwise energy-improving merge. Visits solutions in order and, within
/// each, local bits in order; global bit subset[j] takes bits[j] only when
/// that strictly lowers the global energy of the assignment as updated so
/// far. The result never has higher energy than `x`.
Assignment aggregate(const HuboProblem& problem, Assignment x,
                     std::span<const LocalSolution> solutions, AggregationStats* stats = nullptr);

struct PhaseTimings {
  double decompose = 0.0;
  double solve = 0.0;
  double aggregate = 0.0;
  double total = 0.0;
};

struct InstanceState {
  std::size_t id = 0;
  Assignment x;
  double energy = 0.0;
  /// Energy after initialization followed by the energy after each
  /// iteration; non-increasing.
  std::vector<double> trace;
  PhaseTimings timings;
};

InstanceState run_instance(const HuboProblem& problem, const DqofConfig& config,
                           std::size_t instance);

struct RunReport {
  DqofConfig config;
  std::size_t problem_size = 0;
  std::uint64_t problem_fingerprint = 0;
  std::size_t resolved_subs = 0;
  Assignment best_assignment;
  double best_energy = 0.0;
  std::size_t best_instance = 0;
  std::vector<InstanceState> instances;
  PhaseTimings timings;
  std::optional<double> reference_energy;
  std::optional<ApproximationRatio> approximation;
};

/// P instances run concurrently, each on its own seed stream; the lowest
/// final energy wins (earliest instance on ties).
RunReport run_dqof(const HuboProblem& problem, const DqofConfig& config);

/// Records a reference optimum and the approximation ratio against it.
void attach_reference(RunReport& report, double reference_energy);

}  // namespace dqof
