#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "dqof/hubo.hpp"

namespace dqof {

inline constexpr std::size_t kDefaultQubitCap = 30;

/// Diagonal of a cost Hamiltonian in the computational basis. Entry b is the
/// energy of the assignment whose bit j equals bit j of b.
struct CostDiagonal {
  std::vector<double> energies;

  std::size_t num_qubits() const noexcept;
  std::size_t dimension() const noexcept { return energies.size(); }
};

/// Builds the diagonal term by term: a term on index mask M adds its
/// coefficient to the 2^(n-t) entries b with (b & M) == M. Terms are added in
/// the same order `evaluate` sums them, so entries agree with it bit for bit.
/// Throws CapExceeded when n > qubit_cap.
CostDiagonal build_cost_diagonal(const HuboProblem& problem,
                                 std::size_t qubit_cap = kDefaultQubitCap);
CostDiagonal build_cost_diagonal(const SubHubo& sub, std::size_t qubit_cap = kDefaultQubitCap);

class StateVector {
 public:
  using Amplitude = std::complex<double>;

  StateVector() = default;
  explicit StateVector(std::vector<Amplitude> amplitudes);

  /// |+>^n.
  static StateVector uniform(std::size_t num_qubits);
  static StateVector basis(std::size_t num_qubits, std::uint64_t index);

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::vector<Amplitude>& amplitudes() noexcept { return amplitudes_; }
  const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
  const Amplitude& operator[](std::size_t b) const { return amplitudes_[b]; }

  double norm_squared() const noexcept;
  std::vector<double> probabilities() const;

 private:
  std::vector<Amplitude> amplitudes_;
  std::size_t num_qubits_ = 0;
};

/// Variational angles for l layers, in radians.
struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t depth() const noexcept { return gammas.size(); }
  static QaoaParams constant(std::size_t depth, double gamma, double beta) {
    return {std::vector<double>(depth, gamma), std::vector<double>(depth, beta)};
  }
  /// Throws std::invalid_argument on length mismatch or non-finite angles.
  void validate() const;
  friend bool operator==(const QaoaParams&, const QaoaParams&) = default;
};

/// amplitude[b] *= exp(-i gamma diag[b]).
void apply_phase(StateVector& state, const CostDiagonal& diag, double gamma);
/// exp(-i beta X) on a single qubit.
void apply_mixer_qubit(StateVector& state, std::size_t qubit, double beta);
/// exp(-i beta X) on every qubit.
void apply_mixer(StateVector& state, double beta);

/// |+>^n followed by l alternating phase and mixer layers.
StateVector run_circuit(const CostDiagonal& diag, const QaoaParams& params);

/// sum_b |amplitude_b|^2 diag_b.
double expectation(const StateVector& state, const CostDiagonal& diag);

struct SampleHistogram {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t shots = 0;
};

/// Multinomial draw of `shots` basis states from |amplitude|^2,
/// deterministic per seed.
SampleHistogram sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

/// Highest count; ties go to the lower energy, then the lower index.
std::uint64_t most_frequent(const SampleHistogram& histogram, const CostDiagonal& diag);

struct QaoaSettings {
  std::size_t depth = 2;
  std::uint64_t shots = 10000;
  /// Objective evaluations available to the classical optimizer.
  std::size_t budget = 200;
  double init_gamma = std::numbers::pi / 4.0;
  double init_beta = std::numbers::pi / 8.0;
  double rho_begin = 1.0;
  double rho_end = 1e-4;
  /// 0: exact expectation as the optimizer objective. Otherwise the
  /// objective is estimated from this many shots per evaluation.
  std::uint64_t objective_shots = 0;
  std::size_t qubit_cap = kDefaultQubitCap;
  /// The circuit sees the diagonal rescaled to max|E| == energy_scale, so
  /// the initial angles mean the same thing whatever the coefficient
  /// magnitudes. 0 runs on raw energies. Selection always uses raw energies.
  double energy_scale = 0.25;

  QaoaParams initial_params() const { return QaoaParams::constant(depth, init_gamma, init_beta); }
};

/// diag * (target / max|diag|); unchanged when target is 0 or the diagonal
/// is all zeros.
CostDiagonal circuit_diagonal(const CostDiagonal& diag, double target);

struct OptimizeResult {
  QaoaParams params;
  /// Exact expectation at `params`.
  double expectation = 0.0;
  double initial_expectation = 0.0;
  std::size_t evaluations = 0;
};

/// Derivative-free minimization of the circuit expectation over the angles,
/// starting from `init`. `seed` only matters in shot-estimated mode.
OptimizeResult optimize_params(const CostDiagonal& diag, const QaoaParams& init,
                               const QaoaSettings& settings, std::uint64_t seed = 0);

struct SubSolution {
  Assignment x;
  double energy = 0.0;
};

/// Picks the reported bitstring from a histogram and scores it.
SubSolution select_solution(const SampleHistogram& histogram, const CostDiagonal& diag);

/// Optimize, sample and select for one sub-problem. The optimizer stream
/// and the sampling stream are both derived from `seed`.
SubSolution solve_sub_hubo(const SubHubo& sub, const QaoaSettings& settings, std::uint64_t seed);
SubSolution solve_diagonal(const CostDiagonal& diag, const QaoaSettings& settings,
                           std::uint64_t seed);

}  // namespace dqof
