#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dqof/milp.hpp"
#include "oracles.hpp"

using namespace dqof;
namespace fs = std::filesystem;

TEST(Milp, CountsFollowTheTerms) {
  const auto p = random_hubo(7, 1);
  const auto m = linearize_to_milp(p);
  EXPECT_EQ(m.variable_count(), 7 + p.quadratic().size() + p.cubic().size());
  EXPECT_EQ(m.constraints.size(), 3 * p.quadratic().size() + 4 * p.cubic().size());
  EXPECT_EQ(m.names[0], "x0");
}

TEST(Milp, PureLinearHasNoConstraints) {
  const HuboProblem p(3, {{0, 1.5}, {2, -2.0}});
  const auto m = linearize_to_milp(p);
  EXPECT_EQ(m.variable_count(), 3u);
  EXPECT_TRUE(m.constraints.empty());
  std::ostringstream lp;
  write_lp(lp, m);
  EXPECT_NE(lp.str().find("Subject To\nBinary\n"), std::string::npos);
}

TEST(Milp, ObjectiveEqualsEnergyAtImpliedPoints) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = oracle::random_terms(1 + s, 0.7, s);
    const auto p = t.build();
    const auto m = linearize_to_milp(p);
    for (std::uint64_t b = 0; b < (1ull << p.size()); ++b) {
      const auto x = oracle::bits(b, p.size());
      const auto v = implied_values(p, m, x);
      ASSERT_TRUE(milp_feasible(m, v));
      ASSERT_NEAR(milp_objective(m, v), oracle::energy(t, x), 1e-9);
    }
  }
}

TEST(Milp, WrongProductIsInfeasible) {
  const HuboProblem p(3, {}, {{0, 1, 1.0}}, {{0, 1, 2, 1.0}});
  const auto m = linearize_to_milp(p);
  auto v = implied_values(p, m, Assignment{1, 1, 0});
  ASSERT_EQ(v.size(), 5u);
  v[3] = 0.0;  // y01 must be 1
  EXPECT_FALSE(milp_feasible(m, v));
}

TEST(Milp, LpTextStructure) {
  const HuboProblem p(3, {{0, 1.0}}, {{0, 1, -2.0}}, {{0, 1, 2, 3.0}});
  std::ostringstream out;
  write_lp(out, linearize_to_milp(p));
  const auto s = out.str();
  for (const char* needle : {"Minimize", "obj:", "Subject To", "Binary", "End", "y0_1", "z0_1_2"})
    EXPECT_NE(s.find(needle), std::string::npos) << needle;
  EXPECT_LT(s.find("Minimize"), s.find("Subject To"));
  EXPECT_LT(s.find("Subject To"), s.find("Binary"));
  EXPECT_LT(s.find("Binary"), s.find("End"));
}

TEST(Milp, ParsesSolverObjective) {
  EXPECT_EQ(parse_solver_objective("Optimal - objective value -12.5\n"), -12.5);
  EXPECT_EQ(parse_solver_objective("OBJECTIVE: 3e2"), 300.0);
  EXPECT_FALSE(parse_solver_objective("infeasible").has_value());
}

TEST(Milp, ExternalSolverHook) {
  const auto dir = fs::temp_directory_path() / "dqof_milp_test";
  fs::create_directories(dir);
  const auto lp = dir / "m.lp";
  write_lp(lp, linearize_to_milp(random_hubo(3, 1)));

  ::unsetenv(kMilpSolverEnv);
  EXPECT_FALSE(solve_with_external(lp).has_value());

  const auto good = dir / "good.sh";
  std::ofstream(good) << "#!/bin/sh\ntest -f \"$1\" && echo 'Objective value: -4.25'\n";
  fs::permissions(good, fs::perms::owner_all);
  ::setenv(kMilpSolverEnv, good.c_str(), 1);
  EXPECT_EQ(solve_with_external(lp), -4.25);

  const auto silent = dir / "silent.sh";
  std::ofstream(silent) << "#!/bin/sh\necho nothing\n";
  fs::permissions(silent, fs::perms::owner_all);
  ::setenv(kMilpSolverEnv, silent.c_str(), 1);
  EXPECT_THROW(solve_with_external(lp), std::runtime_error);
  ::unsetenv(kMilpSolverEnv);
  fs::remove_all(dir);
}
