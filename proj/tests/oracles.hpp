#pragma once

// Reference implementations used only by tests. Each one is written the
// slow, obvious way and shares no code with the library paths it checks.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "dqof/cluster.hpp"
#include "dqof/hubo.hpp"
#include "dqof/qaoa.hpp"
#include "dqof/rng.hpp"

namespace oracle {

using dqof::Assignment;
using dqof::Index;

struct Terms {
  std::size_t n = 0;
  std::map<Index, double> h;
  std::map<std::array<Index, 2>, double> J;
  std::map<std::array<Index, 3>, double> K;

  dqof::HuboProblem build() const {
    std::vector<dqof::LinearTerm> l;
    std::vector<dqof::QuadraticTerm> q;
    std::vector<dqof::CubicTerm> c;
    for (auto& [i, v] : h) l.push_back({i, v});
    for (auto& [k, v] : J) q.push_back({k[0], k[1], v});
    for (auto& [k, v] : K) c.push_back({k[0], k[1], k[2], v});
    return dqof::HuboProblem(n, l, q, c);
  }
};

inline Terms terms_of(const dqof::HuboProblem& p) {
  Terms t;
  t.n = p.size();
  for (auto& x : p.linear()) t.h[x.i] = x.coeff;
  for (auto& x : p.quadratic()) t.J[{x.i, x.j}] = x.coeff;
  for (auto& x : p.cubic()) t.K[{x.i, x.j, x.r}] = x.coeff;
  return t;
}

/// Sparse random terms with independent uniform coefficients.
inline Terms random_terms(std::size_t n, double density, std::uint64_t seed) {
  dqof::Rng rng(seed);
  Terms t;
  t.n = n;
  for (Index i = 0; i < n; ++i) {
    if (rng.uniform() < density) t.h[i] = rng.uniform() * 4 - 2;
    for (Index j = i + 1; j < n; ++j) {
      if (rng.uniform() < density) t.J[{i, j}] = rng.uniform() * 4 - 2;
      for (Index r = j + 1; r < n; ++r) {
        if (rng.uniform() < density) t.K[{i, j, r}] = rng.uniform() * 4 - 2;
      }
    }
  }
  return t;
}

inline double energy(const Terms& t, const Assignment& x) {
  double e = 0.0;
  for (auto& [i, v] : t.h) e += v * x[i];
  for (auto& [k, v] : t.J) e += v * x[k[0]] * x[k[1]];
  for (auto& [k, v] : t.K) e += v * x[k[0]] * x[k[1]] * x[k[2]];
  return e;
}

inline Assignment bits(std::uint64_t b, std::size_t n) {
  Assignment x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = (b >> j) & 1;
  return x;
}

struct Minimum {
  std::uint64_t index;
  double energy;
};

/// First index reaching the minimum energy (tolerance relative to scale).
inline Minimum exhaustive_min(const Terms& t, double tol = 1e-9) {
  std::vector<double> e(std::uint64_t{1} << t.n);
  for (std::uint64_t b = 0; b < e.size(); ++b) e[b] = energy(t, bits(b, t.n));
  double m = e[0];
  for (double v : e) m = std::min(m, v);
  for (std::uint64_t b = 0; b < e.size(); ++b) {
    if (e[b] <= m + tol * (1 + std::abs(m))) return {b, e[b]};
  }
  return {0, e[0]};
}

using Complex = std::complex<double>;
using Matrix = std::vector<std::vector<Complex>>;

inline Matrix identity(std::size_t d) {
  Matrix m(d, std::vector<Complex>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t d = a.size();
  Matrix c(d, std::vector<Complex>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// a (x) b with b on the low-order bits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t da = a.size(), db = b.size();
  Matrix c(da * db, std::vector<Complex>(da * db, 0.0));
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) c[i * db + k][j * db + l] = a[i][j] * b[k][l];
  return c;
}

/// exp(-i beta X) = cos(beta) I - i sin(beta) X.
inline Matrix rx(double beta) {
  const Complex c = std::cos(beta), s = Complex(0, -std::sin(beta));
  return {{c, s}, {s, c}};
}

inline Matrix mixer(std::size_t n, double beta) {
  Matrix m = identity(1);
  for (std::size_t q = 0; q < n; ++q) m = kron(m, rx(beta));
  return m;
}

inline Matrix phase(const std::vector<double>& diag, double gamma) {
  Matrix m(diag.size(), std::vector<Complex>(diag.size(), 0.0));
  for (std::size_t b = 0; b < diag.size(); ++b) m[b][b] = std::exp(Complex(0, -gamma * diag[b]));
  return m;
}

/// U = prod_l M(beta_l) P(gamma_l) applied to |+>^n by dense matrices.
inline std::vector<Complex> qaoa_state(const std::vector<double>& diag, std::size_t n,
                                       const std::vector<double>& gammas,
                                       const std::vector<double>& betas) {
  const std::size_t d = diag.size();
  Matrix u = identity(d);
  for (std::size_t l = 0; l < gammas.size(); ++l) {
    u = multiply(phase(diag, gammas[l]), u);
    u = multiply(mixer(n, betas[l]), u);
  }
  std::vector<Complex> psi(d, 0.0);
  const double a = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) psi[i] += u[i][j] * a;
  return psi;
}

/// Full-register simulation of a combined circuit: summed block energies as
/// one diagonal and per-qubit mixers with each block's own angle.
inline std::vector<Complex> combined_state(const dqof::CombinedHamiltonian& comb,
                                           const dqof::BlockParams& params) {
  const std::size_t m = comb.block_count(), n = comb.block_size(), w = m * n;
  const std::size_t dim = std::size_t{1} << w;
  std::vector<Complex> psi(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  for (std::size_t l = 0; l < params[0].depth(); ++l) {
    for (std::size_t z = 0; z < dim; ++z) {
      double phase = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const auto local = (z >> (k * n)) & ((std::size_t{1} << n) - 1);
        phase += params[k].gammas[l] * comb.blocks()[k].diag.energies[local];
      }
      psi[z] *= std::exp(Complex(0, -phase));
    }
    for (std::size_t q = 0; q < w; ++q) {
      const double beta = params[q / n].betas[l];
      const Complex c = std::cos(beta), s(0, -std::sin(beta));
      for (std::size_t z = 0; z < dim; ++z) {
        if (z >> q & 1) continue;
        const auto a0 = psi[z], a1 = psi[z | (std::size_t{1} << q)];
        psi[z] = c * a0 + s * a1;
        psi[z | (std::size_t{1} << q)] = c * a1 + s * a0;
      }
    }
  }
  return psi;
}

}  // namespace oracle
