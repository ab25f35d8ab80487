#include "dqof/cluster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dqof/cobyla.hpp"
#include "dqof/error.hpp"
#include "dqof/rng.hpp"

namespace dqof {

CombinedHamiltonian combine(std::vector<SubHubo> subs, std::size_t qubit_cap) {
  if (subs.empty()) throw std::invalid_argument("combine: need at least one sub-problem");
  const std::size_t n = subs.front().size();
  std::vector<CombinedHamiltonian::Block> blocks;
  blocks.reserve(subs.size());
  for (auto& sub : subs) {
    if (sub.size() != n) throw std::invalid_argument("combine: sub-problems differ in size");
    CostDiagonal diag = build_cost_diagonal(sub, qubit_cap);
    blocks.push_back({std::move(sub), std::move(diag)});
  }
  return CombinedHamiltonian(std::move(blocks), n);
}

namespace {

void check_arity(const CombinedHamiltonian& comb, const BlockParams& params) {
  if (params.size() != comb.block_count()) {
    throw DimensionError("combined: " + std::to_string(params.size()) + " parameter sets for " +
                         std::to_string(comb.block_count()) + " blocks");
  }
  for (const auto& p : params) {
    p.validate();
    if (p.depth() != params.front().depth()) {
      throw std::invalid_argument("combined: blocks must share the circuit depth");
    }
  }
}

}  // namespace

std::vector<StateVector> simulate_combined_blockwise(const CombinedHamiltonian& comb,
                                                     const BlockParams& params) {
  check_arity(comb, params);
  std::vector<StateVector> states;
  states.reserve(comb.block_count());
  for (std::size_t k = 0; k < comb.block_count(); ++k) {
    states.push_back(run_circuit(comb.blocks()[k].diag, params[k]));
  }
  return states;
}

StateVector simulate_combined_dense(const CombinedHamiltonian& comb, const BlockParams& params,
                                    std::size_t width_cap) {
  check_arity(comb, params);
  const std::size_t width = comb.total_width();
  const std::size_t n = comb.block_size();
  if (width > width_cap) {
    throw CapExceeded("dense combined simulation: width " + std::to_string(width) +
                      " exceeds cap " + std::to_string(width_cap));
  }
  StateVector state = StateVector::uniform(width);
  auto& amps = state.amplitudes();
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  for (std::size_t layer = 0; layer < params.front().depth(); ++layer) {
    for (std::size_t b = 0; b < amps.size(); ++b) {
      double phase = 0.0;
      for (std::size_t k = 0; k < comb.block_count(); ++k) {
        const auto local = (b >> (k * n)) & mask;
        phase -= params[k].gammas[layer] * comb.blocks()[k].diag.energies[local];
      }
      amps[b] *= StateVector::Amplitude(std::cos(phase), std::sin(phase));
    }
    for (std::size_t k = 0; k < comb.block_count(); ++k) {
      for (std::size_t q = 0; q < n; ++q) apply_mixer_qubit(state, k * n + q, params[k].betas[layer]);
    }
  }
  return state;
}

StateVector joint_state(std::span<const StateVector> block_states, std::size_t width_cap) {
  std::size_t width = 0;
  for (const auto& s : block_states) width += s.num_qubits();
  if (width > width_cap) throw CapExceeded("joint_state: width exceeds cap");
  std::vector<StateVector::Amplitude> amps{1.0};
  std::size_t shift = 0;
  for (const auto& s : block_states) {
    std::vector<StateVector::Amplitude> next(amps.size() * s.dimension());
    for (std::size_t hi = 0; hi < s.dimension(); ++hi) {
      for (std::size_t lo = 0; lo < amps.size(); ++lo) next[(hi << shift) | lo] = s[hi] * amps[lo];
    }
    shift += s.num_qubits();
    amps = std::move(next);
  }
  return StateVector(std::move(amps));
}

double joint_expectation(std::span<const StateVector> block_states,
                         const CombinedHamiltonian& comb) {
  if (block_states.size() != comb.block_count()) {
    throw DimensionError("joint_expectation: state count does not match block count");
  }
  double e = 0.0;
  for (std::size_t k = 0; k < block_states.size(); ++k) {
    e += expectation(block_states[k], comb.blocks()[k].diag);
  }
  return e;
}

std::vector<Assignment> split_bitstring(std::span<const std::uint8_t> x, std::size_t m,
                                        std::size_t n) {
  if (x.size() != m * n) {
    throw DimensionError("split_bitstring: length " + std::to_string(x.size()) + " != m*n = " +
                         std::to_string(m * n));
  }
  std::vector<Assignment> parts(m);
  for (std::size_t k = 0; k < m; ++k) {
    parts[k].assign(x.begin() + static_cast<std::ptrdiff_t>(k * n),
                    x.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return parts;
}

Assignment concatenate(std::span<const Assignment> parts) {
  Assignment x;
  for (const auto& p : parts) x.insert(x.end(), p.begin(), p.end());
  return x;
}

std::size_t greedy_phase_layers(std::span<const std::uint64_t> supports) {
  std::vector<std::uint64_t> layers;
  for (std::uint64_t s : supports) {
    auto it = std::find_if(layers.begin(), layers.end(),
                           [s](std::uint64_t used) { return (used & s) == 0; });
    if (it == layers.end()) {
      layers.push_back(s);
    } else {
      *it |= s;
    }
  }
  return layers.size();
}

std::vector<std::uint64_t> dense_supports(std::size_t width) {
  if (width > 64) throw std::invalid_argument("dense_supports: width above 64");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < width; ++i) out.push_back(1ULL << i);
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = i + 1; j < width; ++j) out.push_back((1ULL << i) | (1ULL << j));
  }
  for (std::size_t i = 0; i < width; ++i) {
    for (std::size_t j = i + 1; j < width; ++j) {
      for (std::size_t r = j + 1; r < width; ++r) {
        out.push_back((1ULL << i) | (1ULL << j) | (1ULL << r));
      }
    }
  }
  return out;
}

namespace {

std::vector<std::uint64_t> supports_of(const HuboProblem& p) {
  std::vector<std::uint64_t> out;
  for (const auto& t : p.linear()) out.push_back(1ULL << t.i);
  for (const auto& t : p.quadratic()) out.push_back((1ULL << t.i) | (1ULL << t.j));
  for (const auto& t : p.cubic()) out.push_back((1ULL << t.i) | (1ULL << t.j) | (1ULL << t.r));
  return out;
}

}  // namespace

DepthWidthReport depth_width_report(const CombinedHamiltonian& comb, std::size_t layers) {
  DepthWidthReport rep;
  rep.width = comb.total_width();
  rep.layers = layers;
  for (const auto& block : comb.blocks()) {
    const auto& p = block.sub.problem;
    rep.gate_counts[0] += p.linear().size();
    rep.gate_counts[1] += p.quadratic().size();
    rep.gate_counts[2] += p.cubic().size();
    rep.phase_layers = std::max(rep.phase_layers, greedy_phase_layers(supports_of(p)));
  }
  rep.depth_proxy = layers * (rep.phase_layers + 1);
  if (rep.width <= kDenseCounterfactualCap) {
    rep.dense_depth_proxy = layers * (greedy_phase_layers(dense_supports(rep.width)) + 1);
  }
  return rep;
}

namespace {

std::vector<double> flatten(const BlockParams& params) {
  std::vector<double> v;
  for (const auto& p : params) {
    v.insert(v.end(), p.gammas.begin(), p.gammas.end());
    v.insert(v.end(), p.betas.begin(), p.betas.end());
  }
  return v;
}

BlockParams unflatten(std::span<const double> v, std::size_t blocks, std::size_t depth) {
  BlockParams out(blocks);
  for (std::size_t k = 0; k < blocks; ++k) {
    auto base = v.begin() + static_cast<std::ptrdiff_t>(k * 2 * depth);
    out[k].gammas.assign(base, base + static_cast<std::ptrdiff_t>(depth));
    out[k].betas.assign(base + static_cast<std::ptrdiff_t>(depth),
                        base + static_cast<std::ptrdiff_t>(2 * depth));
  }
  return out;
}

}  // namespace

ClusterSolveResult solve_combined(const CombinedHamiltonian& comb, const QaoaSettings& settings,
                                  std::span<const std::uint64_t> block_seeds,
                                  ClusterParamMode mode) {
  const std::size_t m = comb.block_count();
  if (block_seeds.size() != m) throw DimensionError("solve_combined: one seed per block required");
  const std::size_t depth = settings.depth;
  ClusterSolveResult out;

  // Circuits run on per-block rescaled energies; sampling picks by raw ones.
  std::vector<CombinedHamiltonian::Block> scaled;
  for (const auto& b : comb.blocks()) scaled.push_back({b.sub, circuit_diagonal(b.diag, settings.energy_scale)});
  const CombinedHamiltonian circuit(std::move(scaled), comb.block_size());

  CobylaOptions opt;
  opt.rho_begin = settings.rho_begin;
  opt.rho_end = settings.rho_end;
  opt.max_evaluations = settings.budget;

  switch (mode) {
    case ClusterParamMode::kIndependent:
      for (std::size_t k = 0; k < m; ++k) {
        auto res = optimize_params(circuit.blocks()[k].diag, settings.initial_params(), settings,
                                   derive_seed(block_seeds[k], {1}));
        out.params.push_back(std::move(res.params));
      }
      break;
    case ClusterParamMode::kJoint: {
      BlockParams init(m, settings.initial_params());
      Objective f = [&](std::span<const double> v) {
        auto states = simulate_combined_blockwise(circuit, unflatten(v, m, depth));
        return joint_expectation(states, circuit);
      };
      auto res = depth == 0 ? CobylaResult{{}, 0.0, 0} : cobyla_minimize(f, flatten(init), opt);
      out.params = depth == 0 ? init : unflatten(res.x, m, depth);
      break;
    }
    case ClusterParamMode::kShared: {
      QaoaParams init = settings.initial_params();
      Objective f = [&](std::span<const double> v) {
        auto shared = unflatten(v, 1, depth).front();
        auto states = simulate_combined_blockwise(circuit, BlockParams(m, shared));
        return joint_expectation(states, circuit);
      };
      QaoaParams best = init;
      if (depth > 0) best = unflatten(cobyla_minimize(f, flatten({init}), opt).x, 1, depth).front();
      out.params.assign(m, best);
      break;
    }
  }

  auto states = simulate_combined_blockwise(circuit, out.params);
  out.joint_expectation = joint_expectation(states, comb);
  std::vector<Assignment> parts;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& diag = comb.blocks()[k].diag;
    auto hist = sample(states[k], settings.shots, derive_seed(block_seeds[k], {2}));
    out.solutions.push_back(select_solution(hist, diag));
    parts.push_back(out.solutions.back().x);
  }
  out.joint_bitstring = concatenate(parts);
  return out;
}

}  // namespace dqof
