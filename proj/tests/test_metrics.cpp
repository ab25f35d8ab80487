#include <gtest/gtest.h>

#include <cmath>

#include "dqof/metrics.hpp"

using namespace dqof;

TEST(Metrics, ApproximationRatio) {
  EXPECT_EQ(approximation_ratio(-10, -10).value, 1.0);
  EXPECT_DOUBLE_EQ(approximation_ratio(-9.9, -10).value, 0.99);
  EXPECT_EQ(approximation_ratio(0, -10).value, 0.0);
  EXPECT_EQ(approximation_ratio(0, 0).value, 1.0);
  EXPECT_TRUE(approximation_ratio(0, 0).comparable);
}

TEST(Metrics, ApproximationRatioFlagsNonNegativeOptimum) {
  const auto r = approximation_ratio(1.0, 0.0);
  EXPECT_FALSE(r.comparable);
  EXPECT_TRUE(std::isnan(r.value));
  EXPECT_FALSE(approximation_ratio(3.0, 2.0).comparable);
}

TEST(Metrics, RelativeAccuracy) {
  EXPECT_EQ(relative_accuracy(-5, -5, 1).value, 1.0);
  EXPECT_EQ(relative_accuracy(1, -5, 1).value, 0.0);
  EXPECT_DOUBLE_EQ(relative_accuracy(-2, -5, 1).value, 0.5);
  EXPECT_EQ(relative_accuracy(-9, -5, 1).value, 1.0);
  EXPECT_EQ(relative_accuracy(4, -5, 1).value, 0.0);
}

TEST(Metrics, RelativeAccuracyDegenerate) {
  const auto r = relative_accuracy(3, 3, 3);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_THROW(relative_accuracy(0, 1, 0), std::invalid_argument);
}
