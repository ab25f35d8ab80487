#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dqof/bench.hpp"
#include "dqof/brute_force.hpp"
#include "dqof/error.hpp"

using namespace dqof;
namespace fs = std::filesystem;

namespace {

ResultRow row(const std::string& solver, std::size_t N, std::uint64_t seed, double e) {
  ResultRow r;
  r.experiment = "x";
  r.solver = solver;
  r.N = N;
  r.instance_seed = seed;
  r.energy = e;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BenchSpec tiny_spec() {
  BenchSpec s;
  s.experiment = "tiny";
  s.sizes = {6, 9};
  s.repetitions = 2;
  s.seed_base = 5;
  SolverSpec d;
  d.name = d.label = "dqof";
  d.options = {{"n", 3}, {"P", 2}, {"T", 3}, {"qaoa", {{"shots", 200}}}};
  SolverSpec sa;
  sa.name = sa.label = "sa";
  sa.options = {{"sweeps", 50}};
  SolverSpec b;
  b.name = b.label = "brute";
  s.solvers = {d, sa, b};
  return s;
}

}  // namespace

TEST(Compare, RelativeAccuracyPerInstance) {
  const auto t = compare({row("a", 5, 1, -10), row("b", 5, 1, -5), row("c", 5, 1, -7.5),
                          row("a", 5, 2, -3), row("b", 5, 2, -3), row("c", 5, 2, -3)});
  ASSERT_EQ(t.rows.size(), 6u);
  for (const auto& r : t.rows) {
    ASSERT_TRUE(r.relative_accuracy.has_value());
    if (r.instance_seed == 2) {
      EXPECT_EQ(*r.relative_accuracy, 1.0);
    } else if (r.solver == "a") {
      EXPECT_EQ(*r.relative_accuracy, 1.0);
    } else if (r.solver == "b") {
      EXPECT_EQ(*r.relative_accuracy, 0.0);
    } else {
      EXPECT_EQ(*r.relative_accuracy, 0.5);
    }
  }
  ASSERT_EQ(t.entries.size(), 3u);
  EXPECT_EQ(t.entries[0].solver, "a");
  EXPECT_EQ(t.entries[0].median, 1.0);
  EXPECT_EQ(t.entries[1].median, 0.5);
  EXPECT_EQ(t.entries[2].median, 0.75);
}

TEST(Compare, RejectsMismatchedInstances) {
  EXPECT_THROW(compare({row("a", 5, 1, -1), row("b", 5, 2, -1)}), std::invalid_argument);
  auto other = row("b", 5, 1, -1);
  other.experiment = "y";
  EXPECT_THROW(compare({row("a", 5, 1, -1), other}), std::invalid_argument);
}

TEST(Compare, UnscoredRowsAreCarried) {
  auto lp = row("milp", 5, 1, 0);
  lp.energy.reset();
  lp.status = "exported only";
  const auto t = compare({row("a", 5, 1, -2), lp});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_FALSE(t.rows[1].relative_accuracy.has_value());
}

TEST(BenchSpec, PresetsAndJsonRoundTrip) {
  for (const char* name : {"fig1b", "fig3", "fig1d"}) {
    const auto s = bench_preset(name);
    EXPECT_NO_THROW(s.validate());
    const auto j = bench_spec_to_json(s);
    EXPECT_EQ(bench_spec_to_json(bench_spec_from_json(j)), j);
  }
  EXPECT_THROW(bench_preset("fig9"), std::invalid_argument);
  EXPECT_THROW(bench_spec_from_json(nlohmann::json{{"experiment", "x"}, {"colour", 1}}), ParseError);
  auto bad = tiny_spec();
  bad.solvers[1].label = "dqof";
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = tiny_spec();
  bad.solvers[0].name = "quantum-magic";
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(RunSolver, BruteAndOptionErrors) {
  const auto p = random_hubo(7, 3);
  SolverSpec b;
  b.name = b.label = "brute";
  const auto o = run_solver(b, p, {});
  ASSERT_TRUE(o.energy.has_value());
  EXPECT_EQ(*o.energy, brute_force(p).energy);
  SolverSpec sa;
  sa.name = sa.label = "sa";
  sa.options = {{"temperature", 3}};
  EXPECT_THROW(run_solver(sa, p, {}), std::invalid_argument);
  b.options = {{"cap", 4}};
  EXPECT_THROW(run_solver(b, p, {}), CapExceeded);
}

TEST(RunSolver, ExportOnlyWritesLp) {
  const auto dir = fs::temp_directory_path() / "dqof_bench_lp";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SolverSpec lp;
  lp.name = lp.label = "export-lp";
  SolveContext ctx;
  ctx.output_dir = dir;
  ctx.stem = "p";
  const auto o = run_solver(lp, random_hubo(5, 1), ctx);
  EXPECT_FALSE(o.energy.has_value());
  EXPECT_TRUE(fs::exists(dir / "p.lp"));
  fs::remove_all(dir);
}

TEST(RunBench, StableOutputIndependentOfWorkers) {
  const auto d1 = fs::temp_directory_path() / "dqof_bench_w1";
  const auto d3 = fs::temp_directory_path() / "dqof_bench_w3";
  fs::remove_all(d1);
  fs::remove_all(d3);
  const auto a = run_bench(tiny_spec(), 1, true, d1);
  const auto b = run_bench(tiny_spec(), 3, true, d3);
  EXPECT_EQ(a.table.rows, b.table.rows);
  EXPECT_EQ(slurp(d1 / "tiny.csv"), slurp(d3 / "tiny.csv"));
  EXPECT_EQ(slurp(d1 / "tiny_comparison.csv"), slurp(d3 / "tiny_comparison.csv"));
  EXPECT_FALSE(slurp(d1 / "tiny.csv").empty());
  ASSERT_EQ(a.table.rows.size(), 12u);
  for (const auto& r : a.table.rows) {
    EXPECT_EQ(r.reference_source, "brute");
    ASSERT_TRUE(r.approximation_ratio.has_value());
    EXPECT_LE(*r.approximation_ratio, 1.0 + 1e-12);
    if (r.solver == "brute") {
      EXPECT_EQ(*r.relative_accuracy, 1.0);
    }
  }
  fs::remove_all(d1);
  fs::remove_all(d3);
}

TEST(DepthSweep, ConstantDepth) {
  const auto reps = depth_sweep(5, 4, 2, 1);
  ASSERT_EQ(reps.size(), 5u);
  for (std::size_t m = 0; m < 5; ++m) {
    EXPECT_EQ(reps[m].width, 4 * (m + 1));
    EXPECT_EQ(reps[m].depth_proxy, reps[0].depth_proxy);
  }
  std::ostringstream out;
  write_depth_csv(out, reps, 4);
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}
