#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dqof/brute_force.hpp"
#include "dqof/error.hpp"
#include "dqof/fm.hpp"
#include "oracles.hpp"

using namespace dqof;

namespace {

FactorizationMachine random_fm(std::size_t n, std::size_t k, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> h(n), v(n * k);
  for (auto& a : h) a = rng.normal() * scale;
  for (auto& a : v) a = rng.normal() * scale;
  return FactorizationMachine(rng.normal() * scale, h, v, k);
}

// The model written as explicit sums over pairs and triples.
double fm_oracle(const FactorizationMachine& fm, const Assignment& x) {
  const std::size_t n = fm.size(), k = fm.rank();
  double y = fm.bias();
  for (std::size_t i = 0; i < n; ++i) y += fm.linear()[i] * x[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t f = 0; f < k; ++f) {
        y += fm.factor(i, f) * fm.factor(j, f) * x[i] * x[j];
        for (std::size_t r = j + 1; r < n; ++r) y += fm.factor(i, f) * fm.factor(j, f) * fm.factor(r, f) * x[i] * x[j] * x[r];
      }
  return y;
}

}  // namespace

TEST(FmPredict, HandExamples) {
  const FactorizationMachine two(0.0, {0.0, 0.0}, {1.0, 1.0}, 1);
  EXPECT_DOUBLE_EQ(fm_predict(two, Assignment{1, 1}), 1.0);
  const FactorizationMachine three(0.0, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, 1);
  EXPECT_DOUBLE_EQ(fm_predict(three, Assignment{1, 1, 1}), 4.0);
  const auto r = random_fm(5, 3, 1);
  EXPECT_DOUBLE_EQ(fm_predict(r, Assignment(5, 0)), r.bias());
  EXPECT_THROW(fm_predict(r, Assignment(4, 0)), DimensionError);
}

TEST(FmPredict, MatchesExplicitSums) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto fm = random_fm(3 + s % 6, 1 + s % 4, s);
    for (std::uint64_t b = 0; b < (1ull << fm.size()); ++b) {
      const auto x = oracle::bits(b, fm.size());
      ASSERT_NEAR(fm_predict(fm, x), fm_oracle(fm, x), 1e-10);
    }
  }
}

TEST(FmToHubo, Coefficients) {
  const FactorizationMachine fm(0.5, {1.0, -1.0}, {2.0, 3.0}, 1);
  const auto m = fm_to_hubo(fm);
  EXPECT_EQ(m.hubo.find(0, 1), 6.0);
  EXPECT_EQ(m.bias, 0.5);
  EXPECT_EQ(m.hubo.linear().size(), 2u);
  const FactorizationMachine flat(0.0, {1.0, 2.0, 3.0}, std::vector<double>(6, 0.0), 2);
  const auto f = fm_to_hubo(flat);
  EXPECT_TRUE(f.hubo.quadratic().empty());
  EXPECT_TRUE(f.hubo.cubic().empty());
  EXPECT_EQ(f.hubo.linear().size(), 3u);
}

TEST(FmToHubo, ExhaustiveIdentity) {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto fm = random_fm(n, k, 10 * n + k);
      const auto m = fm_to_hubo(fm);
      for (std::uint64_t b = 0; b < (1ull << n); ++b) {
        const auto x = bits_from_index(b, n);
        ASSERT_NEAR(fm_predict(fm, x), m.bias + evaluate(m.hubo, x), 1e-9) << n << "," << k;
      }
    }
  }
}

TEST(FmToHubo, ArgminUnaffectedByBias) {
  auto fm = random_fm(8, 2, 3);
  const auto a = brute_force(fm_to_hubo(fm).hubo).x;
  auto p = fm.parameters();
  p[0] += 100.0;
  fm.set_parameters(p);
  EXPECT_EQ(brute_force(fm_to_hubo(fm).hubo).x, a);
}

TEST(FmGradient, MatchesCentralDifferences) {
  Rng rng(4);
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 2 + rng.below(8), k = 1 + rng.below(4);
    const auto fm = random_fm(n, k, rng.next());
    Assignment x(n);
    for (auto& b : x) b = rng.bit();
    const auto g = fm_gradient(fm, x);
    const auto p = fm.parameters();
    ASSERT_EQ(g.size(), p.size());
    for (std::size_t q = 0; q < p.size(); ++q) {
      const double step = 1e-5;
      auto hi = fm, lo = fm;
      auto ph = p, pl = p;
      ph[q] += step;
      pl[q] -= step;
      hi.set_parameters(ph);
      lo.set_parameters(pl);
      const double fd = (fm_predict(hi, x) - fm_predict(lo, x)) / (2 * step);
      ASSERT_LE(std::abs(fd - g[q]), 1e-5 * std::max(1.0, std::abs(g[q]))) << "param " << q;
    }
  }
}

// The objective is non-convex (the cubic part is odd in V), and plain SGD
// from small random factors recovers a planted model exactly only from
// some starts; the rest settle in local minima well below the target
// spread. Both behaviours are pinned here.
TEST(FmFit, RecoversPlantedModels) {
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto truth = random_fm(8, 2, seed, 0.5);
    Dataset data;
    for (std::uint64_t b = 0; b < 256; ++b) {
      data.x.push_back(bits_from_index(b, 8));
      data.y.push_back(fm_predict(truth, data.x.back()));
    }
    const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / data.size();
    double var = 0.0;
    for (double y : data.y) var += (y - mean) * (y - mean);
    const double stddev = std::sqrt(var / data.size());
    FmFitOptions opts;
    opts.seed = 1;
    const auto r = fm_fit(data, opts);
    EXPECT_EQ(r.train_rows + r.validation_rows, 256u);
    EXPECT_EQ(r.validation_rows, 51u);
    EXPECT_LE(r.best_validation_rmse, 0.3 * stddev) << "seed " << seed;
    if (r.best_validation_rmse <= 1e-2 * stddev) ++recovered;
  }
  EXPECT_GE(recovered, 3);
}

TEST(FmFit, ConstantTargets) {
  Dataset data;
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    Assignment x(5);
    for (auto& b : x) b = rng.bit();
    data.x.push_back(x);
    data.y.push_back(3.0);
  }
  FmFitOptions opts;
  opts.init_scale = 0.0;
  opts.l2 = 1e-2;
  const auto r = fm_fit(data, opts);
  EXPECT_NEAR(r.model.bias(), 3.0, 1e-2);
  for (std::uint64_t b = 0; b < 32; ++b) EXPECT_NEAR(fm_predict(r.model, bits_from_index(b, 5)), 3.0, 1e-2);
}

TEST(FmFit, HistoryNonIncreasingAndDeterministic) {
  Dataset data;
  Rng rng(7);
  for (int i = 0; i < 60; ++i) {
    Assignment x(6);
    for (auto& b : x) b = rng.bit();
    data.x.push_back(x);
    data.y.push_back(rng.normal());
  }
  FmFitOptions opts;
  opts.epochs = 50;
  const auto a = fm_fit(data, opts);
  for (std::size_t e = 1; e < a.history.size(); ++e) EXPECT_LE(a.history[e], a.history[e - 1]);
  const auto b = fm_fit(data, opts);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.history, b.history);
}

TEST(FmFit, Errors) {
  EXPECT_THROW(fm_fit(Dataset{}, {}), std::invalid_argument);
  Dataset ragged{{Assignment{0, 1}, Assignment{1}}, {1.0, 2.0}};
  EXPECT_THROW(fm_fit(ragged, {}), std::invalid_argument);
  Dataset one{{Assignment{1, 0}}, {2.0}};
  const auto r = fm_fit(one, {});
  EXPECT_EQ(r.train_rows, 1u);
  EXPECT_EQ(r.validation_rows, 1u);
  EXPECT_THROW(FactorizationMachine(0, 1), std::invalid_argument);
  EXPECT_THROW(FactorizationMachine(0.0, {1.0}, {1.0, 2.0, 3.0}, 2), std::invalid_argument);
}

TEST(FmIo, JsonAndCsvRoundTrip) {
  const auto fm = random_fm(6, 3, 8);
  EXPECT_EQ(fm_from_json(fm_to_json(fm)), fm);
  EXPECT_EQ(fm_from_json(nlohmann::json::parse(fm_to_json(fm).dump())), fm);

  Dataset d{{Assignment{0, 1, 1}, Assignment{1, 0, 0}}, {0.1, -2.5e-7}};
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const auto back = read_dataset_csv(ss);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.y, d.y);
  std::istringstream bad("0,1,x\n");
  EXPECT_THROW(read_dataset_csv(bad), ParseError);
  std::istringstream headerless("0,1,2.5\n1,1,3\n");
  EXPECT_EQ(read_dataset_csv(headerless).size(), 2u);
}
