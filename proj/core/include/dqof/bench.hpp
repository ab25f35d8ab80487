#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqof/engine.hpp"
#include "dqof/hubo.hpp"
#include "dqof/report.hpp"

namespace dqof {

/// Names accepted by run_solver.
const std::vector<std::string>& solver_names();

struct SolverSpec {
  /// One of solver_names().
  std::string name;
  /// Name used in result rows; defaults to `name`.
  std::string label;
  nlohmann::json options = nlohmann::json::object();
  /// Sizes outside [min_n, max_n] are skipped for this solver.
  std::size_t min_n = 0;
  std::size_t max_n = SIZE_MAX;
  /// Run with the measured wall clock of this label on the same instance
  /// as the time limit (annealers only).
  std::string match_time_of;
};

struct SolveContext {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool stable = false;
  /// Where file-producing solvers (export-lp) write; empty disables them.
  std::filesystem::path output_dir;
  /// File stem for produced artifacts.
  std::string stem = "problem";
  std::optional<double> time_limit_seconds;
};

struct SolveOutcome {
  std::string solver;
  /// Original-variable assignment; empty when nothing was solved.
  Assignment x;
  std::optional<double> energy;
  PhaseTimings timings;
  std::optional<std::size_t> n, m, P, T;
  std::string status = "ok";
  /// Structured per-run report.
  nlohmann::json report;
  /// Hash of the solver name and resolved options.
  std::string config_hash;
};

/// Runs one solver on one problem. Throws std::invalid_argument for an
/// unknown solver or bad options and CapExceeded for size caps.
SolveOutcome run_solver(const SolverSpec& spec, const HuboProblem& problem,
                        const SolveContext& context);

ResultRow make_row(const std::string& experiment, const SolveOutcome& outcome, std::size_t N,
                   std::uint64_t instance_seed, std::uint64_t seed, bool stable);

struct BenchSpec {
  std::string experiment;
  std::vector<std::size_t> sizes;
  std::vector<SolverSpec> solvers;
  std::size_t repetitions = 1;
  std::uint64_t seed_base = 0;
  HuboGeneratorOptions generator;
  /// Reference energies come from brute force up to this size and from the
  /// best solver result above it.
  std::size_t brute_reference_cap = 24;
  /// Depth/width sweep instead of solver runs when set: m = 1..depth_sweep_m
  /// blocks of depth_sweep_n variables at depth_sweep_layers.
  std::size_t depth_sweep_m = 0;
  std::size_t depth_sweep_n = 4;
  std::size_t depth_sweep_layers = 2;

  /// Throws std::invalid_argument when a solver name is unknown, labels
  /// repeat, a time reference is missing or sizes are empty.
  void validate() const;
};

/// Throws ParseError on malformed or unknown fields.
BenchSpec bench_spec_from_json(const nlohmann::json& j);
nlohmann::json bench_spec_to_json(const BenchSpec& spec);
/// Named presets: fig1b, fig3, fig1d. Throws std::invalid_argument otherwise.
BenchSpec bench_preset(const std::string& name);

/// Seed of repetition `rep` at size N.
std::uint64_t instance_seed(const BenchSpec& spec, std::size_t N, std::size_t rep);

struct ComparisonEntry {
  std::string solver;
  std::size_t N = 0;
  std::size_t instances = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct ComparisonTable {
  /// Input rows with relative_accuracy filled in, sorted by
  /// (experiment, solver, N, instance seed).
  std::vector<ResultRow> rows;
  /// Relative-accuracy median and quartiles per (solver, N).
  std::vector<ComparisonEntry> entries;
};

/// Per instance (N, instance seed), relative accuracy against the best and
/// worst energy among the compared solvers. Rows without an energy are
/// carried but not scored. Throws std::invalid_argument when rows mix
/// experiments or when, at some N, two solvers saw different instances.
ComparisonTable compare(std::vector<ResultRow> rows);
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);

struct BenchOutcome {
  ComparisonTable table;
  /// One report per solver run, in row order.
  std::vector<nlohmann::json> reports;
  /// Filled by depth sweeps.
  std::vector<DepthWidthReport> depth;
};

/// Runs every (size, repetition) instance in turn; solvers on one instance
/// run concurrently up to `workers`. When `output_dir` is non-empty writes
/// <experiment>.csv, <experiment>_comparison.csv and reports/*.json there.
BenchOutcome run_bench(const BenchSpec& spec, std::size_t workers, bool stable,
                       const std::filesystem::path& output_dir);

/// Depth/width reports for m = 1..m_max random dense blocks of n variables.
std::vector<DepthWidthReport> depth_sweep(std::size_t m_max, std::size_t n, std::size_t layers,
                                          std::uint64_t seed);
void write_depth_csv(std::ostream& out, const std::vector<DepthWidthReport>& reports,
                     std::size_t n);

}  // namespace dqof
