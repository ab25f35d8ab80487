#include "dqof/fm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dqof/error.hpp"
#include "dqof/hubo_io.hpp"
#include "dqof/rng.hpp"

namespace dqof {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double d : v) {
    if (!std::isfinite(d)) throw std::invalid_argument(std::string("FactorizationMachine: non-finite ") + what);
  }
}

}  // namespace

FactorizationMachine::FactorizationMachine(std::size_t n, std::size_t rank)
    : linear_(n, 0.0), factors_(n * rank, 0.0), rank_(rank) {
  if (n == 0) throw std::invalid_argument("FactorizationMachine: n must be positive");
  if (rank == 0) throw std::invalid_argument("FactorizationMachine: rank must be positive");
}

FactorizationMachine::FactorizationMachine(double bias, std::vector<double> linear,
                                           std::vector<double> factors, std::size_t rank)
    : bias_(bias), linear_(std::move(linear)), factors_(std::move(factors)), rank_(rank) {
  if (linear_.empty()) throw std::invalid_argument("FactorizationMachine: n must be positive");
  if (rank_ == 0) throw std::invalid_argument("FactorizationMachine: rank must be positive");
  if (factors_.size() != linear_.size() * rank_) {
    throw std::invalid_argument("FactorizationMachine: factor matrix must be N x k");
  }
  if (!std::isfinite(bias_)) throw std::invalid_argument("FactorizationMachine: non-finite bias");
  require_finite(linear_, "linear weight");
  require_finite(factors_, "factor");
}

std::vector<double> FactorizationMachine::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  p.push_back(bias_);
  p.insert(p.end(), linear_.begin(), linear_.end());
  p.insert(p.end(), factors_.begin(), factors_.end());
  return p;
}

void FactorizationMachine::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count()) throw DimensionError("set_parameters: wrong parameter count");
  require_finite(p, "parameter");
  bias_ = p[0];
  std::copy(p.begin() + 1, p.begin() + 1 + static_cast<std::ptrdiff_t>(linear_.size()),
            linear_.begin());
  std::copy(p.begin() + 1 + static_cast<std::ptrdiff_t>(linear_.size()), p.end(),
            factors_.begin());
}

namespace {

struct PowerSums {
  std::vector<double> s1, s2, s3;
};

PowerSums power_sums(const FactorizationMachine& fm, std::span<const std::uint8_t> x) {
  if (x.size() != fm.size()) throw DimensionError("fm: assignment size mismatch");
  const std::size_t k = fm.rank();
  PowerSums s{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0),
              std::vector<double>(k, 0.0)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    for (std::size_t f = 0; f < k; ++f) {
      const double v = fm.factor(i, f);
      s.s1[f] += v;
      s.s2[f] += v * v;
      s.s3[f] += v * v * v;
    }
  }
  return s;
}

}  // namespace

double fm_predict(const FactorizationMachine& fm, std::span<const std::uint8_t> x) {
  const auto s = power_sums(fm, x);
  double y = fm.bias();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) y += fm.linear()[i];
  }
  for (std::size_t f = 0; f < fm.rank(); ++f) {
    const double a = s.s1[f], b = s.s2[f], c = s.s3[f];
    y += 0.5 * (a * a - b);
    y += (a * a * a - 3.0 * a * b + 2.0 * c) / 6.0;
  }
  return y;
}

std::vector<double> fm_gradient(const FactorizationMachine& fm, std::span<const std::uint8_t> x) {
  const auto s = power_sums(fm, x);
  const std::size_t n = fm.size(), k = fm.rank();
  std::vector<double> g(fm.parameter_count(), 0.0);
  g[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!x[i]) continue;
    g[1 + i] = 1.0;
    for (std::size_t f = 0; f < k; ++f) {
      const double v = fm.factor(i, f);
      const double a = s.s1[f], b = s.s2[f];
      g[1 + n + i * k + f] = (a - v) + (0.5 * a * a - 0.5 * b - a * v + v * v);
    }
  }
  return g;
}

FmHubo fm_to_hubo(const FactorizationMachine& fm) {
  const std::size_t n = fm.size(), k = fm.rank();
  std::vector<LinearTerm> lin;
  lin.reserve(n);
  for (std::size_t i = 0; i < n; ++i) lin.push_back({static_cast<Index>(i), fm.linear()[i]});

  std::vector<QuadraticTerm> quad;
  std::vector<CubicTerm> cubic;
  std::vector<double> vij(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double jij = 0.0;
      for (std::size_t f = 0; f < k; ++f) {
        vij[f] = fm.factor(i, f) * fm.factor(j, f);
        jij += vij[f];
      }
      if (jij != 0.0) quad.push_back({static_cast<Index>(i), static_cast<Index>(j), jij});
      for (std::size_t r = j + 1; r < n; ++r) {
        double kijr = 0.0;
        for (std::size_t f = 0; f < k; ++f) kijr += vij[f] * fm.factor(r, f);
        if (kijr != 0.0) {
          cubic.push_back(
              {static_cast<Index>(i), static_cast<Index>(j), static_cast<Index>(r), kijr});
        }
      }
    }
  }
  return {HuboProblem(n, std::move(lin), std::move(quad), std::move(cubic)), fm.bias()};
}

void Dataset::validate() const {
  if (x.size() != y.size()) throw std::invalid_argument("Dataset: row/target count mismatch");
  const std::size_t n = dimension();
  for (const auto& row : x) {
    if (row.size() != n) throw std::invalid_argument("Dataset: rows have different lengths");
    for (auto b : row) {
      if (b > 1) throw std::invalid_argument("Dataset: inputs must be 0 or 1");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite target");
  }
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() < 2) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": need bits and a target");
    }
    if (d.size() == 0 && fields[0] != "0" && fields[0] != "1") continue;  // header
    Assignment row;
    for (std::size_t c = 0; c + 1 < fields.size(); ++c) {
      if (fields[c] != "0" && fields[c] != "1") {
        throw ParseError("dataset line " + std::to_string(line_no) + ": column " +
                         std::to_string(c) + " is not a bit");
      }
      row.push_back(fields[c] == "1" ? 1 : 0);
    }
    try {
      d.y.push_back(parse_double(fields.back()));
    } catch (const std::exception& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    d.x.push_back(std::move(row));
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return d;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  data.validate();
  for (std::size_t i = 0; i < data.dimension(); ++i) out << 'x' << i << ',';
  out << "y\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (auto b : data.x[r]) out << static_cast<int>(b) << ',';
    out << format_double(data.y[r]) << '\n';
  }
}

FmFitResult fm_fit(const Dataset& data, const FmFitOptions& options) {
  if (data.size() == 0) throw std::invalid_argument("fm_fit: empty dataset");
  data.validate();
  if (data.dimension() == 0) throw std::invalid_argument("fm_fit: zero-length inputs");
  if (!(options.learning_rate > 0.0)) throw std::invalid_argument("fm_fit: learning rate must be positive");

  Rng rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::size_t> train, valid;
  if (data.size() == 1) {
    train = valid = order;
  } else {
    const std::size_t n_valid = std::max<std::size_t>(1, data.size() / 5);
    train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_valid));
    valid.assign(order.end() - static_cast<std::ptrdiff_t>(n_valid), order.end());
  }

  const std::size_t n = data.dimension(), k = options.rank;
  std::vector<double> factors(n * k);
  for (auto& v : factors) v = options.init_scale * rng.normal();
  FactorizationMachine fm(0.0, std::vector<double>(n, 0.0), std::move(factors), k);

  auto rmse = [&](const FactorizationMachine& m) {
    double s = 0.0;
    for (auto r : valid) {
      const double e = fm_predict(m, data.x[r]) - data.y[r];
      s += e * e;
    }
    return std::sqrt(s / static_cast<double>(valid.size()));
  };

  FmFitResult out{fm, rmse(fm), 0, {}, train.size(), valid.size()};
  std::vector<double> p = fm.parameters();
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = train.size(); i > 1; --i) std::swap(train[i - 1], train[rng.below(i)]);
    bool diverged = false;
    for (auto r : train) {
      const double err = fm_predict(fm, data.x[r]) - data.y[r];
      const auto g = fm_gradient(fm, data.x[r]);
      for (std::size_t q = 0; q < p.size(); ++q) {
        const double reg = q == 0 ? 0.0 : options.l2 * p[q];
        p[q] -= options.learning_rate * (err * g[q] + reg);
      }
      if (!std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); })) {
        diverged = true;
        break;
      }
      fm.set_parameters(p);
    }
    if (!diverged) {
      const double e = rmse(fm);
      if (e < out.best_validation_rmse) {
        out.best_validation_rmse = e;
        out.best_epoch = epoch;
        out.model = fm;
      }
    }
    out.history.push_back(out.best_validation_rmse);
    if (diverged) break;
  }
  return out;
}

nlohmann::json fm_to_json(const FactorizationMachine& fm) {
  return {{"format", "fm"},
          {"N", fm.size()},
          {"rank", fm.rank()},
          {"bias", fm.bias()},
          {"linear", std::vector<double>(fm.linear().begin(), fm.linear().end())},
          {"factors", std::vector<double>(fm.factors().begin(), fm.factors().end())}};
}

FactorizationMachine fm_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "fm") throw ParseError("model: format is not \"fm\"");
    const auto n = j.at("N").get<std::size_t>();
    auto lin = j.at("linear").get<std::vector<double>>();
    if (lin.size() != n) throw ParseError("model: linear length differs from N");
    return FactorizationMachine(j.at("bias").get<double>(), std::move(lin),
                                j.at("factors").get<std::vector<double>>(),
                                j.at("rank").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

}  // namespace dqof
