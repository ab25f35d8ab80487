#include <gtest/gtest.h>

#include <cmath>

#include "dqof/cobyla.hpp"

using namespace dqof;

TEST(Cobyla, QuadraticBowl) {
  std::size_t calls = 0;
  auto f = [&](std::span<const double> x) {
    ++calls;
    return (x[0] - 1) * (x[0] - 1) + 3 * (x[1] + 2) * (x[1] + 2) + 0.5;
  };
  const auto r = cobyla_minimize(f, {0.0, 0.0}, {1.0, 1e-6, 500});
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], -2.0, 1e-3);
  EXPECT_NEAR(r.value, 0.5, 1e-6);
  EXPECT_EQ(r.evaluations, calls);
}

TEST(Cobyla, RespectsBudgetAndNeverWorsens) {
  auto rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const double f0 = rosen(std::vector<double>{-1.2, 1.0});
  for (std::size_t budget : {1, 2, 3, 7, 50, 300}) {
    const auto r = cobyla_minimize(rosen, {-1.2, 1.0}, {0.5, 1e-8, budget});
    EXPECT_LE(r.evaluations, budget);
    EXPECT_LE(r.value, f0);
    EXPECT_EQ(rosen(r.x), r.value);
  }
}

// Linear models crawl along the curved valley; this only checks that the
// search follows it a long way from the start.
TEST(Cobyla, MakesProgressOnRosenbrock) {
  auto rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const auto r = cobyla_minimize(rosen, {-1.2, 1.0}, {0.5, 1e-8, 3000});
  EXPECT_LT(r.value, 0.1);
  EXPECT_GT(r.x[0], 0.5);
}

TEST(Cobyla, Deterministic) {
  auto f = [](std::span<const double> x) { return std::sin(3 * x[0]) + std::cos(2 * x[1]) + 0.1 * x[2] * x[2]; };
  const auto a = cobyla_minimize(f, {0.3, 0.2, 1.0}, {});
  const auto b = cobyla_minimize(f, {0.3, 0.2, 1.0}, {});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.value, b.value);
}

TEST(Cobyla, OneDimension) {
  auto f = [](std::span<const double> x) { return std::abs(x[0] - 0.25); };
  const auto r = cobyla_minimize(f, {3.0}, {1.0, 1e-7, 200});
  EXPECT_NEAR(r.x[0], 0.25, 1e-5);
}
