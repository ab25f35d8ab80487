#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

#include "dqof/cluster.hpp"
#include "dqof/error.hpp"
#include "dqof/rng.hpp"
#include "oracles.hpp"

using namespace dqof;

namespace {

std::vector<SubHubo> blocks_of(const HuboProblem& p, std::size_t m, std::size_t n) {
  std::vector<SubHubo> subs;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<Index> s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = static_cast<Index>(k * n + j);
    subs.push_back(extract_sub_hubo(p, s));
  }
  return subs;
}

BlockParams random_params(std::size_t m, std::size_t depth, Rng& rng) {
  BlockParams ps;
  for (std::size_t k = 0; k < m; ++k) {
    QaoaParams q;
    for (std::size_t l = 0; l < depth; ++l) {
      q.gammas.push_back(rng.uniform() * 3);
      q.betas.push_back(rng.uniform() * 3);
    }
    ps.push_back(q);
  }
  return ps;
}

}  // namespace

TEST(Combine, WidthAndErrors) {
  const auto p = random_hubo(32, 1);
  EXPECT_EQ(combine(blocks_of(p, 8, 4)).total_width(), 32u);
  auto mixed = blocks_of(p, 2, 4);
  std::vector<Index> three{8, 9, 10};
  mixed.push_back(extract_sub_hubo(p, three));
  EXPECT_THROW(combine(mixed), std::invalid_argument);
  EXPECT_THROW(combine({}), std::invalid_argument);
}

TEST(Combine, SingleBlockBehavesLikeTheSubProblem) {
  const auto p = random_hubo(5, 2);
  const auto comb = combine(blocks_of(p, 1, 5));
  const auto params = BlockParams{QaoaParams::constant(2, 0.3, 0.6)};
  const auto blocks = simulate_combined_blockwise(comb, params);
  const auto alone = run_circuit(build_cost_diagonal(p), params[0]);
  EXPECT_EQ(blocks[0].amplitudes(), alone.amplitudes());
  EXPECT_EQ(joint_expectation(blocks, comb), expectation(alone, build_cost_diagonal(p)));
}

// Every (m, n) with m * n <= 14.
TEST(Blockwise, EqualsDenseJointOracle) {
  Rng rng(3);
  for (std::size_t m = 1; m <= 14; ++m) {
    for (std::size_t n = 1; m * n <= 14; ++n) {
      const auto p = random_hubo(m * n, rng.next());
      const auto comb = combine(blocks_of(p, m, n));
      const auto params = random_params(m, 2, rng);
      const auto blocks = simulate_combined_blockwise(comb, params);
      const auto product = joint_state(blocks, 14).probabilities();
      const auto oracle = oracle::combined_state(comb, params);
      double dense_e = 0.0;
      std::vector<double> joint_diag(oracle.size(), 0.0);
      for (std::size_t z = 0; z < oracle.size(); ++z) {
        ASSERT_NEAR(product[z], std::norm(oracle[z]), 1e-10) << "m=" << m << " n=" << n;
        for (std::size_t k = 0; k < m; ++k) {
          joint_diag[z] += comb.blocks()[k].diag.energies[(z >> (k * n)) & ((1u << n) - 1)];
        }
        dense_e += std::norm(oracle[z]) * joint_diag[z];
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) sum += expectation(blocks[k], comb.blocks()[k].diag);
      EXPECT_EQ(joint_expectation(blocks, comb), sum);
      EXPECT_NEAR(joint_expectation(blocks, comb), dense_e, 1e-10);
    }
  }
}

TEST(Blockwise, LibraryDensePathAgrees) {
  Rng rng(4);
  const auto p = random_hubo(12, 5);
  const auto comb = combine(blocks_of(p, 3, 4));
  const auto params = random_params(3, 2, rng);
  const auto dense = simulate_combined_dense(comb, params).probabilities();
  const auto product = joint_state(simulate_combined_blockwise(comb, params)).probabilities();
  for (std::size_t z = 0; z < dense.size(); ++z) ASSERT_NEAR(dense[z], product[z], 1e-10);
  EXPECT_THROW(simulate_combined_dense(comb, params, 10), CapExceeded);
}

TEST(Blockwise, ZeroParametersLeaveBlocksUniform) {
  const auto comb = combine(blocks_of(random_hubo(9, 6), 3, 3));
  BlockParams params(3, QaoaParams::constant(2, 0.0, 0.0));
  for (const auto& s : simulate_combined_blockwise(comb, params))
    for (double q : s.probabilities()) EXPECT_NEAR(q, 1.0 / 8, 1e-15);
}

TEST(Blockwise, DuplicateBlocksDoubleTheExpectation) {
  const auto p = random_hubo(4, 7);
  std::vector<Index> all{0, 1, 2, 3};
  const auto sub = extract_sub_hubo(p, all);
  const auto comb = combine({sub, sub});
  const BlockParams params(2, QaoaParams::constant(2, 0.4, 0.2));
  const auto blocks = simulate_combined_blockwise(comb, params);
  EXPECT_EQ(joint_expectation(blocks, comb), 2 * expectation(blocks[0], comb.blocks()[0].diag));
}

TEST(Blockwise, ArgmaxFactorizes) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto comb = combine(blocks_of(random_hubo(12, rng.next()), 3, 4));
    const auto params = random_params(3, 2, rng);
    const auto blocks = simulate_combined_blockwise(comb, params);
    const auto joint = joint_state(blocks).probabilities();
    const auto jmax = std::max_element(joint.begin(), joint.end()) - joint.begin();
    std::uint64_t concat = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto p = blocks[k].probabilities();
      concat |= static_cast<std::uint64_t>(std::max_element(p.begin(), p.end()) - p.begin()) << (4 * k);
    }
    EXPECT_EQ(static_cast<std::uint64_t>(jmax), concat);
  }
}

TEST(Split, PositionalAndRoundTrip) {
  const Assignment x{0, 0, 0, 0, 1, 1, 1, 1};
  const auto parts = split_bitstring(x, 2, 4);
  EXPECT_EQ(parts[0], Assignment(4, 0));
  EXPECT_EQ(parts[1], Assignment(4, 1));
  EXPECT_EQ(concatenate(parts), x);
  EXPECT_EQ(split_bitstring(x, 1, 8)[0], x);
  EXPECT_THROW(split_bitstring(x, 3, 3), DimensionError);
}

namespace {

// First-fit packing of supports into layers of pairwise-disjoint masks.
std::size_t first_fit(const std::vector<std::uint64_t>& supports) {
  std::vector<std::uint64_t> layers;
  for (auto s : supports) {
    bool placed = false;
    for (auto& l : layers) {
      if ((l & s) == 0) {
        l |= s;
        placed = true;
        break;
      }
    }
    if (!placed) layers.push_back(s);
  }
  return layers.size();
}

}  // namespace

TEST(DepthWidth, InvariantInBlockCount) {
  // One dense 4-variable block: 4 + 6 + 4 supports, lexicographic per order.
  std::vector<std::uint64_t> block;
  for (int i = 0; i < 4; ++i) block.push_back(1u << i);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) block.push_back((1u << i) | (1u << j));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int r = j + 1; r < 4; ++r) block.push_back((1u << i) | (1u << j) | (1u << r));
  const std::size_t expected = 2 * (first_fit(block) + 1);

  for (std::size_t m = 1; m <= 8; ++m) {
    const auto rep = depth_width_report(combine(blocks_of(random_hubo(4 * m, m), m, 4)), 2);
    EXPECT_EQ(rep.width, 4 * m);
    EXPECT_EQ(rep.depth_proxy, expected);
    EXPECT_EQ(rep.gate_counts[2], 4 * m);
    if (m >= 2) {
      EXPECT_GT(rep.dense_depth_proxy, rep.depth_proxy);
    }
  }
}

TEST(DepthWidth, DenseCounterfactualMatchesFirstFit) {
  for (std::size_t w : {4u, 8u, 12u}) {
    const auto supports = dense_supports(w);
    EXPECT_EQ(supports.size(), w + w * (w - 1) / 2 + w * (w - 1) * (w - 2) / 6);
    EXPECT_EQ(greedy_phase_layers(supports), first_fit(supports));
  }
}

TEST(SolveCombined, IndependentModeMatchesLoneSolves) {
  const auto p = random_hubo(12, 9);
  const auto subs = blocks_of(p, 3, 4);
  const auto comb = combine(subs);
  QaoaSettings s;
  s.shots = 2000;
  const std::vector<std::uint64_t> seeds{11, 22, 33};
  const auto r = solve_combined(comb, s, seeds);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto lone = solve_sub_hubo(subs[k], s, seeds[k]);
    EXPECT_EQ(r.solutions[k].x, lone.x);
    EXPECT_EQ(r.solutions[k].energy, lone.energy);
  }
  EXPECT_EQ(r.joint_bitstring, concatenate(std::vector<Assignment>{r.solutions[0].x, r.solutions[1].x, r.solutions[2].x}));
}

TEST(SolveCombined, IdenticalBlocksIdenticalAnswers) {
  const auto p = random_hubo(4, 10);
  std::vector<Index> all{0, 1, 2, 3};
  const auto sub = extract_sub_hubo(p, all);
  const std::vector<std::uint64_t> seeds{5, 5};
  for (auto mode : {ClusterParamMode::kIndependent, ClusterParamMode::kJoint, ClusterParamMode::kShared}) {
    const auto r = solve_combined(combine({sub, sub}), QaoaSettings{}, seeds, mode);
    EXPECT_EQ(r.solutions[0].x, r.solutions[1].x);
  }
}
