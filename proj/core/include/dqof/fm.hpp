#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqof/hubo.hpp"

namespace dqof {

/// Third-order factorization machine over binary inputs:
///
///   y(x) = b0 + sum_i h_i x_i + sum_{i<j} <v_i, v_j> x_i x_j
///             + sum_{i<j<r} sum_f v_if v_jf v_rf x_i x_j x_r
///
/// Parameters are laid out flat as [b0, h_0..h_{N-1}, V row-major (N x k)].
class FactorizationMachine {
 public:
  /// All-zero model. Throws std::invalid_argument for n == 0 or rank == 0.
  FactorizationMachine(std::size_t n, std::size_t rank);
  /// Throws std::invalid_argument on size mismatch or non-finite values.
  FactorizationMachine(double bias, std::vector<double> linear, std::vector<double> factors,
                       std::size_t rank);

  std::size_t size() const noexcept { return linear_.size(); }
  std::size_t rank() const noexcept { return rank_; }
  double bias() const noexcept { return bias_; }
  std::span<const double> linear() const noexcept { return linear_; }
  std::span<const double> factors() const noexcept { return factors_; }
  double factor(std::size_t i, std::size_t f) const { return factors_[i * rank_ + f]; }

  std::size_t parameter_count() const noexcept { return 1 + linear_.size() + factors_.size(); }
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);

  friend bool operator==(const FactorizationMachine&, const FactorizationMachine&) = default;

 private:
  double bias_ = 0.0;
  std::vector<double> linear_;
  std::vector<double> factors_;
  std::size_t rank_ = 1;
};

/// Power-sum evaluation, O(N k). Throws DimensionError on size mismatch.
double fm_predict(const FactorizationMachine& fm, std::span<const std::uint8_t> x);

/// d fm_predict / d parameter, in the flat parameter layout.
std::vector<double> fm_gradient(const FactorizationMachine& fm, std::span<const std::uint8_t> x);

struct FmHubo {
  HuboProblem hubo;
  /// Constant offset b0; fm_predict(x) == bias + evaluate(hubo, x).
  double bias = 0.0;
};

/// Closed-form coefficients. Every h_i is kept; pair and triple terms whose
/// coefficient is exactly zero are dropped.
FmHubo fm_to_hubo(const FactorizationMachine& fm);

struct Dataset {
  std::vector<Assignment> x;
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dimension() const noexcept { return x.empty() ? 0 : x.front().size(); }
  /// Throws std::invalid_argument on ragged rows, non-bits or count mismatch.
  void validate() const;
};

/// CSV with N bit columns followed by one target column. A header row is
/// written and, on read, skipped when its first field is not a bit.
Dataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

struct FmFitOptions {
  std::size_t rank = 2;
  std::size_t epochs = 1000;
  double learning_rate = 0.01;
  /// L2 weight on h and V; off by default.
  double l2 = 0.0;
  /// Standard deviation of the initial latent factors.
  double init_scale = 0.1;
  std::uint64_t seed = 0;
};

struct FmFitResult {
  FactorizationMachine model;
  double best_validation_rmse = 0.0;
  std::size_t best_epoch = 0;
  /// Best validation RMSE seen after each epoch; non-increasing.
  std::vector<double> history;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
};

/// Plain SGD on squared error. Rows are shuffled once and split 4:1 into
/// training and validation; a single row serves as both. Returns the
/// parameters with the lowest validation RMSE. Throws std::invalid_argument
/// on an empty or malformed dataset.
FmFitResult fm_fit(const Dataset& data, const FmFitOptions& options);

/// Exact round trip: doubles are written in shortest round-trip form.
nlohmann::json fm_to_json(const FactorizationMachine& fm);
FactorizationMachine fm_from_json(const nlohmann::json& j);

}  // namespace dqof
