#include "dqof/qaoa.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <unistd.h>

#include "dqof/cobyla.hpp"
#include "dqof/error.hpp"
#include "dqof/rng.hpp"

namespace dqof {

std::size_t CostDiagonal::num_qubits() const noexcept {
  return energies.empty() ? 0 : static_cast<std::size_t>(std::countr_zero(energies.size()));
}

namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw CapExceeded("simulator: " + std::to_string(n) + " qubits exceeds the cap of " +
                      std::to_string(cap));
  }
  // Amplitudes, diagonal and sampling table must fit in physical memory.
  const double bytes = std::ldexp(16.0 + 8.0 + 8.0, static_cast<int>(n));
  const double physical = static_cast<double>(sysconf(_SC_PHYS_PAGES)) *
                          static_cast<double>(sysconf(_SC_PAGE_SIZE));
  if (physical > 0 && bytes > physical) {
    throw CapExceeded("simulator: " + std::to_string(n) +
                      " qubits need more memory than the machine has");
  }
}

// Adds c to every entry whose index contains all bits of `mask`.
void add_on_superset(std::vector<double>& diag, std::uint64_t mask, double c) {
  const std::uint64_t full = diag.size() - 1;
  const std::uint64_t free = full & ~mask;
  std::uint64_t sub = 0;
  do {
    diag[sub | mask] += c;
    sub = (sub - free) & free;
  } while (sub != 0);
}

}  // namespace

CostDiagonal build_cost_diagonal(const HuboProblem& problem, std::size_t qubit_cap) {
  const std::size_t n = problem.size();
  check_cap(n, qubit_cap);
  CostDiagonal diag;
  diag.energies.assign(std::size_t{1} << n, 0.0);
  for (const auto& t : problem.linear()) add_on_superset(diag.energies, 1ULL << t.i, t.coeff);
  for (const auto& t : problem.quadratic()) {
    add_on_superset(diag.energies, (1ULL << t.i) | (1ULL << t.j), t.coeff);
  }
  for (const auto& t : problem.cubic()) {
    add_on_superset(diag.energies, (1ULL << t.i) | (1ULL << t.j) | (1ULL << t.r), t.coeff);
  }
  return diag;
}

CostDiagonal build_cost_diagonal(const SubHubo& sub, std::size_t qubit_cap) {
  return build_cost_diagonal(sub.problem, qubit_cap);
}

StateVector::StateVector(std::vector<Amplitude> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty() || !std::has_single_bit(amplitudes_.size())) {
    throw DimensionError("StateVector: dimension must be a power of two");
  }
  num_qubits_ = static_cast<std::size_t>(std::countr_zero(amplitudes_.size()));
}

StateVector StateVector::uniform(std::size_t num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  return StateVector(std::vector<Amplitude>(dim, Amplitude(a, 0.0)));
}

StateVector StateVector::basis(std::size_t num_qubits, std::uint64_t index) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  if (index >= dim) throw std::out_of_range("StateVector::basis: index out of range");
  std::vector<Amplitude> amps(dim, Amplitude(0.0, 0.0));
  amps[index] = 1.0;
  return StateVector(std::move(amps));
}

double StateVector::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return s;
}

std::vector<double> StateVector::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = std::norm(amplitudes_[b]);
  return p;
}

void QaoaParams::validate() const {
  if (gammas.size() != betas.size()) {
    throw std::invalid_argument("QaoaParams: gammas and betas differ in length");
  }
  for (double v : gammas) {
    if (!std::isfinite(v)) throw std::invalid_argument("QaoaParams: non-finite angle");
  }
  for (double v : betas) {
    if (!std::isfinite(v)) throw std::invalid_argument("QaoaParams: non-finite angle");
  }
}

void apply_phase(StateVector& state, const CostDiagonal& diag, double gamma) {
  if (state.dimension() != diag.dimension()) {
    throw DimensionError("apply_phase: state and diagonal dimensions differ");
  }
  if (gamma == 0.0) return;
  auto& amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const double theta = -gamma * diag.energies[b];
    amps[b] *= StateVector::Amplitude(std::cos(theta), std::sin(theta));
  }
}

void apply_mixer_qubit(StateVector& state, std::size_t qubit, double beta) {
  if (qubit >= state.num_qubits()) throw std::out_of_range("apply_mixer_qubit: bad qubit");
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  auto& amps = state.amplitudes();
  const std::size_t stride = std::size_t{1} << qubit;
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const auto a0 = amps[k];
      const auto a1 = amps[k + stride];
      // (a0, a1) -> (c a0 - i s a1, c a1 - i s a0)
      amps[k] = {c * a0.real() + s * a1.imag(), c * a0.imag() - s * a1.real()};
      amps[k + stride] = {c * a1.real() + s * a0.imag(), c * a1.imag() - s * a0.real()};
    }
  }
}

void apply_mixer(StateVector& state, double beta) {
  if (beta == 0.0) return;
  for (std::size_t q = 0; q < state.num_qubits(); ++q) apply_mixer_qubit(state, q, beta);
}

StateVector run_circuit(const CostDiagonal& diag, const QaoaParams& params) {
  params.validate();
  StateVector state = StateVector::uniform(diag.num_qubits());
  for (std::size_t layer = 0; layer < params.depth(); ++layer) {
    apply_phase(state, diag, params.gammas[layer]);
    apply_mixer(state, params.betas[layer]);
  }
  return state;
}

double expectation(const StateVector& state, const CostDiagonal& diag) {
  if (state.dimension() != diag.dimension()) {
    throw DimensionError("expectation: state and diagonal dimensions differ");
  }
  double e = 0.0;
  const auto& amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) e += std::norm(amps[b]) * diag.energies[b];
  return e;
}

SampleHistogram sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample: shots must be >= 1");
  const auto& amps = state.amplitudes();
  std::vector<double> cdf(amps.size());
  double acc = 0.0;
  for (std::size_t b = 0; b < amps.size(); ++b) {
    acc += std::norm(amps[b]);
    cdf[b] = acc;
  }
  Rng rng(seed);
  SampleHistogram hist;
  hist.shots = shots;
  // Amplitudes with zero probability can never be drawn: searching for the
  // first cdf entry strictly above u skips them.
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) it = std::prev(cdf.end());
    ++hist.counts[static_cast<std::uint64_t>(it - cdf.begin())];
  }
  return hist;
}

std::uint64_t most_frequent(const SampleHistogram& histogram, const CostDiagonal& diag) {
  if (histogram.counts.empty()) throw std::invalid_argument("most_frequent: empty histogram");
  auto best = histogram.counts.begin();
  for (auto it = std::next(best); it != histogram.counts.end(); ++it) {
    if (it->second > best->second ||
        (it->second == best->second && diag.energies.at(it->first) < diag.energies.at(best->first))) {
      best = it;
    }
  }
  return best->first;
}

OptimizeResult optimize_params(const CostDiagonal& diag, const QaoaParams& init,
                               const QaoaSettings& settings, std::uint64_t seed) {
  init.validate();
  if (settings.budget == 0) throw std::invalid_argument("optimize_params: budget must be >= 1");
  const std::size_t depth = init.depth();
  auto unpack = [depth](std::span<const double> v) {
    QaoaParams p;
    p.gammas.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(depth));
    p.betas.assign(v.begin() + static_cast<std::ptrdiff_t>(depth), v.end());
    return p;
  };
  std::vector<double> x0 = init.gammas;
  x0.insert(x0.end(), init.betas.begin(), init.betas.end());

  Rng noise(seed);
  Objective objective = [&](std::span<const double> v) {
    StateVector state = run_circuit(diag, unpack(v));
    if (settings.objective_shots == 0) return expectation(state, diag);
    auto hist = sample(state, settings.objective_shots, noise.next());
    double e = 0.0;
    for (const auto& [b, c] : hist.counts) e += static_cast<double>(c) * diag.energies[b];
    return e / static_cast<double>(hist.shots);
  };

  OptimizeResult out;
  out.initial_expectation = expectation(run_circuit(diag, init), diag);
  if (x0.empty()) {
    out.params = init;
    out.expectation = out.initial_expectation;
    out.evaluations = 0;
    return out;
  }
  CobylaOptions opt;
  opt.rho_begin = settings.rho_begin;
  opt.rho_end = settings.rho_end;
  opt.max_evaluations = settings.budget;
  auto res = cobyla_minimize(objective, x0, opt);
  out.params = unpack(res.x);
  out.evaluations = res.evaluations;
  out.expectation = settings.objective_shots == 0
                        ? res.value
                        : expectation(run_circuit(diag, out.params), diag);
  return out;
}

SubSolution select_solution(const SampleHistogram& histogram, const CostDiagonal& diag) {
  const std::uint64_t b = most_frequent(histogram, diag);
  return {bits_from_index(b, diag.num_qubits()), diag.energies[b]};
}

CostDiagonal circuit_diagonal(const CostDiagonal& diag, double target) {
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw std::invalid_argument("energy_scale must be finite and non-negative");
  }
  double peak = 0.0;
  for (double e : diag.energies) peak = std::max(peak, std::abs(e));
  if (target == 0.0 || peak == 0.0) return diag;
  CostDiagonal out = diag;
  const double f = target / peak;
  for (double& e : out.energies) e *= f;
  return out;
}

SubSolution solve_diagonal(const CostDiagonal& diag, const QaoaSettings& settings,
                           std::uint64_t seed) {
  const CostDiagonal circuit = circuit_diagonal(diag, settings.energy_scale);
  auto opt = optimize_params(circuit, settings.initial_params(), settings, derive_seed(seed, {1}));
  StateVector state = run_circuit(circuit, opt.params);
  auto hist = sample(state, settings.shots, derive_seed(seed, {2}));
  return select_solution(hist, diag);
}

SubSolution solve_sub_hubo(const SubHubo& sub, const QaoaSettings& settings, std::uint64_t seed) {
  return solve_diagonal(build_cost_diagonal(sub, settings.qubit_cap), settings, seed);
}

}  // namespace dqof
