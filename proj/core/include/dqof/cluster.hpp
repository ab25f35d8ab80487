#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dqof/hubo.hpp"
#include "dqof/qaoa.hpp"

namespace dqof {

/// m sub-problems of equal size n laid side by side on m*n qubits. Block k
/// occupies qubits [k*n, (k+1)*n); there are no cross-block terms.
class CombinedHamiltonian {
 public:
  struct Block {
    SubHubo sub;
    CostDiagonal diag;
  };

  CombinedHamiltonian(std::vector<Block> blocks, std::size_t block_size)
      : blocks_(std::move(blocks)), block_size_(block_size) {}

  std::span<const Block> blocks() const noexcept { return blocks_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t total_width() const noexcept { return blocks_.size() * block_size_; }

 private:
  std::vector<Block> blocks_;
  std::size_t block_size_;
};

/// Throws std::invalid_argument when `subs` is empty or sizes differ.
CombinedHamiltonian combine(std::vector<SubHubo> subs, std::size_t qubit_cap = kDefaultQubitCap);

/// One parameter set per block, all of the same depth.
using BlockParams = std::vector<QaoaParams>;

/// Product-state simulation: one n-qubit state per block.
std::vector<StateVector> simulate_combined_blockwise(const CombinedHamiltonian& comb,
                                                     const BlockParams& params);

/// The same circuit on the full m*n-qubit register. Validation path only;
/// throws CapExceeded when the width exceeds `width_cap`.
StateVector simulate_combined_dense(const CombinedHamiltonian& comb, const BlockParams& params,
                                    std::size_t width_cap = 20);

/// Kronecker product of per-block states in block order (block 0 holds the
/// low-order bits). Validation helper with the same width cap.
StateVector joint_state(std::span<const StateVector> block_states, std::size_t width_cap = 20);

/// Sum of per-block expectations, which equals <H_comb> for a product state.
double joint_expectation(std::span<const StateVector> block_states,
                         const CombinedHamiltonian& comb);

/// Block k receives bits [k*n, (k+1)*n).
std::vector<Assignment> split_bitstring(std::span<const std::uint8_t> x, std::size_t m,
                                        std::size_t n);
Assignment concatenate(std::span<const Assignment> parts);

/// Circuit-size accounting for a combined Hamiltonian.
struct DepthWidthReport {
  std::size_t width = 0;
  std::size_t layers = 0;
  /// Sequential phase-term layers of the deepest block under greedy
  /// first-fit scheduling of disjoint-support terms.
  std::size_t phase_layers = 0;
  /// layers * (phase_layers + 1 mixer layer).
  std::size_t depth_proxy = 0;
  /// Linear, quadratic and cubic term totals over all blocks.
  std::array<std::size_t, 3> gate_counts{};
  /// The same proxy for one fully dense HUBO on `width` variables; zero
  /// when width exceeds kDenseCounterfactualCap.
  std::size_t dense_depth_proxy = 0;
};

inline constexpr std::size_t kDenseCounterfactualCap = 64;

/// Number of layers produced by first-fit packing of term supports (given
/// as bit masks over at most 64 qubits) into layers of disjoint supports.
std::size_t greedy_phase_layers(std::span<const std::uint64_t> supports);
/// Supports of every 1-, 2- and 3-subset of `width` variables, lexicographic
/// within each order.
std::vector<std::uint64_t> dense_supports(std::size_t width);

DepthWidthReport depth_width_report(const CombinedHamiltonian& comb, std::size_t layers);

enum class ClusterParamMode {
  /// Each block has its own angles, optimized on its own expectation.
  kIndependent,
  /// Each block has its own angles, optimized together on the summed
  /// expectation by one optimizer run.
  kJoint,
  /// One set of angles shared by every block.
  kShared,
};

struct ClusterSolveResult {
  BlockParams params;
  double joint_expectation = 0.0;
  /// Most probable joint bitstring, block 0 first.
  Assignment joint_bitstring;
  std::vector<SubSolution> solutions;
};

/// Optimize, sample and split for a combined circuit. `block_seeds[k]`
/// drives block k exactly as solve_sub_hubo would drive it alone. Shots
/// are drawn block by block from the product distribution, and the most
/// probable joint bitstring is the concatenation of per-block modes, so in
/// kIndependent mode every block's solution equals its unclustered one.
ClusterSolveResult solve_combined(const CombinedHamiltonian& comb, const QaoaSettings& settings,
                                  std::span<const std::uint64_t> block_seeds,
                                  ClusterParamMode mode = ClusterParamMode::kIndependent);

}  // namespace dqof
