#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dqof {

using Index = std::uint32_t;

/// A binary decision vector. One byte per variable, each 0 or 1.
using Assignment = std::vector<std::uint8_t>;

struct LinearTerm {
  Index i;
  double coeff;
  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

struct QuadraticTerm {
  Index i, j;
  double coeff;
  friend bool operator==(const QuadraticTerm&, const QuadraticTerm&) = default;
};

struct CubicTerm {
  Index i, j, r;
  double coeff;
  friend bool operator==(const CubicTerm&, const CubicTerm&) = default;
};

/// Per-variable view of a quadratic term: the other endpoint and the weight.
struct PairNeighbor {
  Index other;
  double coeff;
};

/// Per-variable view of a cubic term: the two other indices and the weight.
struct TripleNeighbor {
  Index a, b;
  double coeff;
};

/// Pseudo-Boolean polynomial of degree at most three over `size()` binary
/// variables:
///
///   H(x) = sum_i h_i x_i + sum_{i<j} J_ij x_i x_j + sum_{i<j<r} K_ijr x_i x_j x_r
///
/// Terms are stored sparsely, sorted by their index tuple, and never
/// symmetrized. The object is immutable after construction and copies share
/// the underlying storage, so a problem with tens of millions of cubic terms
/// can be handed to many workers by value.
class HuboProblem {
 public:
  /// An empty problem on zero variables. Only useful as a placeholder.
  HuboProblem();

  /// Validates and takes ownership of the terms. Terms may arrive in any
  /// order; each index tuple must be strictly increasing, in range and
  /// unique, and every coefficient finite. Throws std::invalid_argument
  /// otherwise (including size == 0).
  HuboProblem(std::size_t size, std::vector<LinearTerm> linear,
              std::vector<QuadraticTerm> quadratic = {},
              std::vector<CubicTerm> cubic = {});

  std::size_t size() const noexcept;
  std::span<const LinearTerm> linear() const noexcept;
  std::span<const QuadraticTerm> quadratic() const noexcept;
  std::span<const CubicTerm> cubic() const noexcept;
  std::size_t term_count() const noexcept;

  /// h_i, or 0 when no linear term is stored for i.
  double linear_coefficient(Index i) const;

  std::optional<double> find(Index i) const;
  std::optional<double> find(Index i, Index j) const;
  std::optional<double> find(Index i, Index j, Index r) const;

  std::span<const PairNeighbor> pair_neighbors(Index i) const;
  std::span<const TripleNeighbor> triple_neighbors(Index i) const;

  double max_abs_coefficient() const noexcept;
  /// Sum of |K_ijr| over all cubic terms.
  double cubic_abs_sum() const noexcept;

  /// Content hash of size and terms (FNV-1a over the canonical byte layout).
  /// Computed on first use.
  std::uint64_t fingerprint() const;

  friend bool operator==(const HuboProblem& a, const HuboProblem& b);

 private:
  struct Storage;
  std::shared_ptr<const Storage> data_;
};

/// H(x), summed term by term in storage order.
double evaluate(const HuboProblem& problem, std::span<const std::uint8_t> x);

/// H(flip(x, i)) - H(x), touching only the terms that contain i.
double evaluate_flip_delta(const HuboProblem& problem, std::span<const std::uint8_t> x,
                           Index i);

/// Bit j of `value` becomes variable j.
Assignment bits_from_index(std::uint64_t value, std::size_t n);
/// Inverse of bits_from_index. Requires x.size() <= 64.
std::uint64_t index_from_bits(std::span<const std::uint8_t> x);
/// Renders x as '0'/'1' characters, variable 0 first.
std::string to_bitstring(std::span<const std::uint8_t> x);

/// Distribution used to draw coefficients of one interaction order.
struct CoefficientLaw {
  enum class Kind { kNormal, kUniform };
  Kind kind = Kind::kNormal;
  /// Normal: mean and standard deviation. Uniform: lower and upper bound.
  double a = 0.0;
  double b = 1.0;

  static CoefficientLaw normal(double mean = 0.0, double stddev = 1.0) {
    return {Kind::kNormal, mean, stddev};
  }
  static CoefficientLaw uniform(double lo, double hi) { return {Kind::kUniform, lo, hi}; }

  /// Parses "normal", "normal(mu,sigma)" or "uniform(lo,hi)".
  static CoefficientLaw parse(const std::string& text);
  std::string to_string() const;
};

struct HuboGeneratorOptions {
  /// Fraction of the C(N,t) possible terms kept for orders t = 1, 2, 3.
  std::array<double, 3> density{1.0, 1.0, 1.0};
  std::array<CoefficientLaw, 3> law{CoefficientLaw::normal(), CoefficientLaw::normal(),
                                    CoefficientLaw::normal()};
};

/// Random instance, deterministic in (n, options, seed). Terms are visited
/// in lexicographic order per order; each is kept with probability equal to
/// its order's density and then given a coefficient drawn from its law.
HuboProblem random_hubo(std::size_t n, const HuboGeneratorOptions& options,
                        std::uint64_t seed);
inline HuboProblem random_hubo(std::size_t n, std::uint64_t seed) {
  return random_hubo(n, HuboGeneratorOptions{}, seed);
}

/// Restriction of a parent problem to a subset of its variables.
struct SubHubo {
  /// Strictly increasing global indices; local variable j is subset[j].
  std::vector<Index> subset;
  /// Terms whose indices all lie in the subset, in local coordinates.
  HuboProblem problem;
  /// Fingerprint of the parent problem.
  std::uint64_t origin = 0;

  std::size_t size() const noexcept { return subset.size(); }
};

/// Keeps exactly the 1-, 2- and 3-variable terms whose indices all lie in
/// `subset` and drops every term that crosses the boundary. Throws
/// std::invalid_argument for unsorted, duplicate or out-of-range indices.
SubHubo extract_sub_hubo(const HuboProblem& problem, std::span<const Index> subset);

}  // namespace dqof
