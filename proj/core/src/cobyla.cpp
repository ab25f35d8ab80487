#include "dqof/cobyla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace dqof {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Inverse of a square matrix by Gauss-Jordan with partial pivoting; empty
// optional when the matrix is numerically singular.
std::optional<Matrix> invert(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double m = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= m * a[col][c];
        inv[r][c] -= m * inv[col][c];
      }
    }
  }
  return inv;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

class Cobyla {
 public:
  Cobyla(const Objective& f, const CobylaOptions& opt) : f_(f), opt_(opt) {}

  CobylaResult run(std::vector<double> x0) {
    const std::size_t n = x0.size();
    CobylaResult out;
    if (opt_.max_evaluations == 0) throw std::invalid_argument("cobyla: budget must be >= 1");
    if (!(opt_.rho_begin > 0.0) || !(opt_.rho_end > 0.0) || opt_.rho_end > opt_.rho_begin) {
      throw std::invalid_argument("cobyla: need 0 < rho_end <= rho_begin");
    }
    points_.push_back(x0);
    values_.push_back(eval(x0));
    double rho = opt_.rho_begin;

    // Initial simplex: coordinate steps of length rho.
    for (std::size_t j = 0; j < n && evals_ < opt_.max_evaluations; ++j) {
      auto p = points_[best()];
      p[j] += rho;
      values_.push_back(eval(p));
      points_.push_back(std::move(p));
    }

    while (points_.size() == n + 1 && evals_ < opt_.max_evaluations && n > 0) {
      const std::size_t pivot = best();
      std::vector<std::size_t> others;
      for (std::size_t k = 0; k <= n; ++k) {
        if (k != pivot) others.push_back(k);
      }
      // Rows of `disp` are vertex displacements from the pivot; rows of
      // `dual` (the inverse transposed) give barycentric coefficients.
      Matrix disp(n, std::vector<double>(n));
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) disp[c][r] = points_[others[r]][c] - points_[pivot][c];
      }
      auto inv = invert(disp);
      if (!inv) {
        if (!repair_degenerate(pivot, others, rho)) break;
        continue;
      }
      // inv * disp = I: row r of inv is orthogonal to every displacement but r.
      const Matrix& dual = *inv;
      std::vector<double> grad(n, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const double df = values_[others[r]] - values_[pivot];
        for (std::size_t c = 0; c < n; ++c) grad[c] += dual[r][c] * df;
      }

      bool acceptable = true;
      std::size_t worst_far = n, worst_flat = n;
      double far = 0.0, flat = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> d(n);
        for (std::size_t c = 0; c < n; ++c) d[c] = points_[others[r]][c] - points_[pivot][c];
        const double eta = norm(d);
        const double sigma = 1.0 / norm(dual[r]);
        if (eta > kBeta * rho && eta > far) {
          far = eta;
          worst_far = r;
        }
        if (sigma < kAlpha * rho && sigma < flat) {
          flat = sigma;
          worst_flat = r;
        }
      }
      if (worst_far < n || worst_flat < n) acceptable = false;

      const double gnorm = norm(grad);
      bool step_failed = true;
      if (gnorm > 0.0) {
        std::vector<double> z = points_[pivot];
        for (std::size_t c = 0; c < n; ++c) z[c] -= rho * grad[c] / gnorm;
        const double fz = eval(z);
        const double predicted = rho * gnorm;
        const double actual = values_[pivot] - fz;
        step_failed = actual <= 0.1 * predicted;

        // Replace the vertex whose barycentric weight for the step is
        // largest, penalising vertices far from the new point.
        std::vector<double> step(n);
        for (std::size_t c = 0; c < n; ++c) step[c] = z[c] - points_[pivot][c];
        std::size_t drop = n;
        double weight_max = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          double w = std::abs(dot(dual[r], step));
          std::vector<double> d(n);
          for (std::size_t c = 0; c < n; ++c) d[c] = points_[others[r]][c] - z[c];
          const double dist = norm(d);
          if (dist > rho) w *= std::pow(dist / rho, 3);
          if (w > weight_max) {
            weight_max = w;
            drop = r;
          }
        }
        if (fz < values_[pivot] || weight_max > 1.0) {
          if (drop == n) drop = 0;
          points_[others[drop]] = std::move(z);
          values_[others[drop]] = fz;
        }
        if (!step_failed) continue;
      }
      if (evals_ >= opt_.max_evaluations) break;

      if (!acceptable) {
        // Geometry step: move the worst-shaped vertex to a point at distance
        // rho/2 from the pivot along its dual direction, on the side where
        // the linear model decreases.
        const std::size_t r = worst_far < n ? worst_far : worst_flat;
        const double dn = norm(dual[r]);
        std::vector<double> z = points_[pivot];
        double sign = dot(grad, dual[r]) > 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) z[c] += sign * kGamma * rho * dual[r][c] / dn;
        values_[others[r]] = eval(z);
        points_[others[r]] = std::move(z);
        continue;
      }
      if (!step_failed) continue;
      if (rho <= opt_.rho_end) break;
      rho *= 0.5;
      if (rho <= 1.5 * opt_.rho_end) rho = opt_.rho_end;
    }

    const std::size_t b = best();
    out.x = points_[b];
    out.value = values_[b];
    out.evaluations = evals_;
    return out;
  }

 private:
  static constexpr double kAlpha = 0.25;
  static constexpr double kBeta = 2.1;
  static constexpr double kGamma = 0.5;

  double eval(std::span<const double> x) {
    ++evals_;
    return f_(x);
  }

  // Lowest value; ties go to the earliest vertex so the choice is stable.
  std::size_t best() const {
    std::size_t b = 0;
    for (std::size_t k = 1; k < values_.size(); ++k) {
      if (values_[k] < values_[b]) b = k;
    }
    return b;
  }

  // Rebuild a coordinate simplex around the pivot when the displacement
  // matrix has collapsed.
  bool repair_degenerate(std::size_t pivot, const std::vector<std::size_t>& others, double rho) {
    const std::size_t n = others.size();
    for (std::size_t r = 0; r < n; ++r) {
      if (evals_ >= opt_.max_evaluations) return false;
      auto p = points_[pivot];
      p[r] += rho;
      values_[others[r]] = eval(p);
      points_[others[r]] = std::move(p);
    }
    return true;
  }

  const Objective& f_;
  CobylaOptions opt_;
  std::vector<std::vector<double>> points_;
  std::vector<double> values_;
  std::size_t evals_ = 0;
};

}  // namespace

CobylaResult cobyla_minimize(const Objective& f, std::vector<double> x0,
                             const CobylaOptions& options) {
  return Cobyla(f, options).run(std::move(x0));
}

}  // namespace dqof
