#include "dqof/hubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "dqof/error.hpp"
#include "dqof/rng.hpp"

namespace dqof {

struct HuboProblem::Storage {
  std::size_t size = 0;
  std::vector<LinearTerm> linear;
  std::vector<QuadraticTerm> quadratic;
  std::vector<CubicTerm> cubic;
  std::vector<double> linear_dense;

  // CSR adjacency: entries for variable i live in [offsets[i], offsets[i+1]).
  std::vector<std::size_t> pair_offsets;
  std::vector<PairNeighbor> pair_entries;
  std::vector<std::size_t> triple_offsets;
  std::vector<TripleNeighbor> triple_entries;

  double max_abs = 0.0;
  double cubic_abs = 0.0;

  mutable std::once_flag fingerprint_once;
  mutable std::uint64_t fingerprint = 0;
};

namespace {

bool finite(double v) { return std::isfinite(v); }

template <class Term, class Key>
void sort_and_check(std::vector<Term>& terms, Key key, const char* what) {
  auto less = [&](const Term& a, const Term& b) { return key(a) < key(b); };
  if (!std::is_sorted(terms.begin(), terms.end(), less)) {
    std::sort(terms.begin(), terms.end(), less);
  }
  for (std::size_t t = 1; t < terms.size(); ++t) {
    if (key(terms[t - 1]) == key(terms[t])) {
      throw std::invalid_argument(std::string("HuboProblem: duplicate ") + what + " term");
    }
  }
}

template <class Entry>
void build_csr(std::size_t n, const std::vector<std::size_t>& counts,
               std::vector<std::size_t>& offsets, std::vector<Entry>& entries) {
  offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + counts[i];
  entries.resize(offsets[n]);
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < len; ++k) {
    h ^= p[k];
    h *= 0x100000001B3ULL;
  }
}

}  // namespace

HuboProblem::HuboProblem() : data_(std::make_shared<Storage>()) {}

HuboProblem::HuboProblem(std::size_t size, std::vector<LinearTerm> linear,
                         std::vector<QuadraticTerm> quadratic, std::vector<CubicTerm> cubic) {
  if (size == 0) throw std::invalid_argument("HuboProblem: size must be positive");
  if (size > std::numeric_limits<Index>::max()) {
    throw std::invalid_argument("HuboProblem: size exceeds index range");
  }
  auto s = std::make_shared<Storage>();
  s->size = size;

  for (const auto& t : linear) {
    if (t.i >= size) throw std::invalid_argument("HuboProblem: linear index out of range");
    if (!finite(t.coeff)) throw std::invalid_argument("HuboProblem: non-finite coefficient");
  }
  for (const auto& t : quadratic) {
    if (!(t.i < t.j)) throw std::invalid_argument("HuboProblem: pair indices must be i<j");
    if (t.j >= size) throw std::invalid_argument("HuboProblem: pair index out of range");
    if (!finite(t.coeff)) throw std::invalid_argument("HuboProblem: non-finite coefficient");
  }
  for (const auto& t : cubic) {
    if (!(t.i < t.j && t.j < t.r)) {
      throw std::invalid_argument("HuboProblem: triple indices must be i<j<r");
    }
    if (t.r >= size) throw std::invalid_argument("HuboProblem: triple index out of range");
    if (!finite(t.coeff)) throw std::invalid_argument("HuboProblem: non-finite coefficient");
  }
  sort_and_check(linear, [](const LinearTerm& t) { return t.i; }, "linear");
  sort_and_check(
      quadratic, [](const QuadraticTerm& t) { return std::pair{t.i, t.j}; }, "quadratic");
  sort_and_check(
      cubic, [](const CubicTerm& t) { return std::tuple{t.i, t.j, t.r}; }, "cubic");

  s->linear = std::move(linear);
  s->quadratic = std::move(quadratic);
  s->cubic = std::move(cubic);

  s->linear_dense.assign(size, 0.0);
  for (const auto& t : s->linear) {
    s->linear_dense[t.i] = t.coeff;
    s->max_abs = std::max(s->max_abs, std::abs(t.coeff));
  }

  std::vector<std::size_t> counts(size, 0);
  for (const auto& t : s->quadratic) {
    ++counts[t.i];
    ++counts[t.j];
    s->max_abs = std::max(s->max_abs, std::abs(t.coeff));
  }
  build_csr(size, counts, s->pair_offsets, s->pair_entries);
  {
    std::vector<std::size_t> cursor(s->pair_offsets.begin(), s->pair_offsets.end() - 1);
    for (const auto& t : s->quadratic) {
      s->pair_entries[cursor[t.i]++] = {t.j, t.coeff};
      s->pair_entries[cursor[t.j]++] = {t.i, t.coeff};
    }
  }

  std::fill(counts.begin(), counts.end(), 0);
  for (const auto& t : s->cubic) {
    ++counts[t.i];
    ++counts[t.j];
    ++counts[t.r];
    s->max_abs = std::max(s->max_abs, std::abs(t.coeff));
    s->cubic_abs += std::abs(t.coeff);
  }
  build_csr(size, counts, s->triple_offsets, s->triple_entries);
  {
    std::vector<std::size_t> cursor(s->triple_offsets.begin(), s->triple_offsets.end() - 1);
    for (const auto& t : s->cubic) {
      s->triple_entries[cursor[t.i]++] = {t.j, t.r, t.coeff};
      s->triple_entries[cursor[t.j]++] = {t.i, t.r, t.coeff};
      s->triple_entries[cursor[t.r]++] = {t.i, t.j, t.coeff};
    }
  }
  data_ = std::move(s);
}

std::size_t HuboProblem::size() const noexcept { return data_->size; }
std::span<const LinearTerm> HuboProblem::linear() const noexcept { return data_->linear; }
std::span<const QuadraticTerm> HuboProblem::quadratic() const noexcept {
  return data_->quadratic;
}
std::span<const CubicTerm> HuboProblem::cubic() const noexcept { return data_->cubic; }
std::size_t HuboProblem::term_count() const noexcept {
  return data_->linear.size() + data_->quadratic.size() + data_->cubic.size();
}

double HuboProblem::linear_coefficient(Index i) const {
  if (i >= data_->size) throw std::out_of_range("HuboProblem: index out of range");
  return data_->linear_dense[i];
}

std::optional<double> HuboProblem::find(Index i) const {
  const auto& v = data_->linear;
  auto it = std::lower_bound(v.begin(), v.end(), i,
                             [](const LinearTerm& t, Index key) { return t.i < key; });
  if (it != v.end() && it->i == i) return it->coeff;
  return std::nullopt;
}

std::optional<double> HuboProblem::find(Index i, Index j) const {
  const auto& v = data_->quadratic;
  const auto key = std::pair{i, j};
  auto it = std::lower_bound(v.begin(), v.end(), key, [](const QuadraticTerm& t, const auto& k) {
    return std::pair{t.i, t.j} < k;
  });
  if (it != v.end() && it->i == i && it->j == j) return it->coeff;
  return std::nullopt;
}

std::optional<double> HuboProblem::find(Index i, Index j, Index r) const {
  const auto& v = data_->cubic;
  const auto key = std::tuple{i, j, r};
  auto it = std::lower_bound(v.begin(), v.end(), key, [](const CubicTerm& t, const auto& k) {
    return std::tuple{t.i, t.j, t.r} < k;
  });
  if (it != v.end() && it->i == i && it->j == j && it->r == r) return it->coeff;
  return std::nullopt;
}

std::span<const PairNeighbor> HuboProblem::pair_neighbors(Index i) const {
  const auto& s = *data_;
  return {s.pair_entries.data() + s.pair_offsets[i], s.pair_offsets[i + 1] - s.pair_offsets[i]};
}

std::span<const TripleNeighbor> HuboProblem::triple_neighbors(Index i) const {
  const auto& s = *data_;
  return {s.triple_entries.data() + s.triple_offsets[i],
          s.triple_offsets[i + 1] - s.triple_offsets[i]};
}

double HuboProblem::max_abs_coefficient() const noexcept { return data_->max_abs; }
double HuboProblem::cubic_abs_sum() const noexcept { return data_->cubic_abs; }

std::uint64_t HuboProblem::fingerprint() const {
  const Storage& s = *data_;
  std::call_once(s.fingerprint_once, [&s] {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    const std::uint64_t n = s.size;
    fnv_mix(h, &n, sizeof n);
    auto mix_index = [&h](Index v) { fnv_mix(h, &v, sizeof v); };
    auto mix_coeff = [&h](double v) { fnv_mix(h, &v, sizeof v); };
    for (const auto& t : s.linear) {
      mix_index(1);
      mix_index(t.i);
      mix_coeff(t.coeff);
    }
    for (const auto& t : s.quadratic) {
      mix_index(2);
      mix_index(t.i);
      mix_index(t.j);
      mix_coeff(t.coeff);
    }
    for (const auto& t : s.cubic) {
      mix_index(3);
      mix_index(t.i);
      mix_index(t.j);
      mix_index(t.r);
      mix_coeff(t.coeff);
    }
    s.fingerprint = h;
  });
  return s.fingerprint;
}

bool operator==(const HuboProblem& a, const HuboProblem& b) {
  if (a.data_ == b.data_) return true;
  return a.size() == b.size() && std::ranges::equal(a.linear(), b.linear()) &&
         std::ranges::equal(a.quadratic(), b.quadratic()) &&
         std::ranges::equal(a.cubic(), b.cubic());
}

double evaluate(const HuboProblem& problem, std::span<const std::uint8_t> x) {
  if (x.size() != problem.size()) {
    throw DimensionError("evaluate: assignment length " + std::to_string(x.size()) +
                         " does not match problem size " + std::to_string(problem.size()));
  }
  double e = 0.0;
  for (const auto& t : problem.linear()) {
    if (x[t.i]) e += t.coeff;
  }
  for (const auto& t : problem.quadratic()) {
    if (x[t.i] & x[t.j]) e += t.coeff;
  }
  for (const auto& t : problem.cubic()) {
    if (x[t.i] & x[t.j] & x[t.r]) e += t.coeff;
  }
  return e;
}

double evaluate_flip_delta(const HuboProblem& problem, std::span<const std::uint8_t> x,
                           Index i) {
  if (x.size() != problem.size()) throw DimensionError("evaluate_flip_delta: size mismatch");
  if (i >= problem.size()) throw std::out_of_range("evaluate_flip_delta: index out of range");
  double field = problem.linear_coefficient(i);
  for (const auto& nb : problem.pair_neighbors(i)) {
    if (x[nb.other]) field += nb.coeff;
  }
  for (const auto& nb : problem.triple_neighbors(i)) {
    if (x[nb.a] & x[nb.b]) field += nb.coeff;
  }
  return x[i] ? -field : field;
}

Assignment bits_from_index(std::uint64_t value, std::size_t n) {
  Assignment x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<std::uint8_t>((value >> j) & 1U);
  return x;
}

std::uint64_t index_from_bits(std::span<const std::uint8_t> x) {
  if (x.size() > 64) throw std::invalid_argument("index_from_bits: more than 64 bits");
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < x.size(); ++j) v |= static_cast<std::uint64_t>(x[j] & 1U) << j;
  return v;
}

std::string to_bitstring(std::span<const std::uint8_t> x) {
  std::string s(x.size(), '0');
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j]) s[j] = '1';
  }
  return s;
}

CoefficientLaw CoefficientLaw::parse(const std::string& text) {
  std::string name = text;
  std::vector<double> args;
  if (auto open = text.find('('); open != std::string::npos) {
    auto close = text.rfind(')');
    if (close == std::string::npos || close < open) {
      throw ParseError("coefficient law: unbalanced parentheses in '" + text + "'");
    }
    name = text.substr(0, open);
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        args.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ParseError("coefficient law: bad number '" + item + "'");
      }
    }
  }
  if (name == "normal") {
    if (args.empty()) return normal();
    if (args.size() != 2 || !(args[1] > 0)) throw ParseError("normal(mean,stddev) expected");
    return normal(args[0], args[1]);
  }
  if (name == "uniform") {
    if (args.size() != 2 || !(args[0] < args[1])) throw ParseError("uniform(lo,hi) expected");
    return uniform(args[0], args[1]);
  }
  throw ParseError("unknown coefficient law '" + name + "'");
}

std::string CoefficientLaw::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind == Kind::kNormal ? "normal(" : "uniform(") << a << ',' << b << ')';
  return os.str();
}

namespace {

double draw(const CoefficientLaw& law, Rng& rng) {
  switch (law.kind) {
    case CoefficientLaw::Kind::kNormal:
      return law.a + law.b * rng.normal();
    case CoefficientLaw::Kind::kUniform:
      return law.a + (law.b - law.a) * rng.uniform();
  }
  return 0.0;
}

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

}  // namespace

HuboProblem random_hubo(std::size_t n, const HuboGeneratorOptions& options,
                        std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("random_hubo: size must be positive");
  for (double d : options.density) {
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("random_hubo: density must be in (0,1]");
  }
  Rng rng(seed);
  auto keep = [&rng](double density) { return density >= 1.0 || rng.uniform() < density; };

  std::vector<LinearTerm> lin;
  lin.reserve(n);
  for (Index i = 0; i < n; ++i) {
    if (keep(options.density[0])) lin.push_back({i, draw(options.law[0], rng)});
  }
  std::vector<QuadraticTerm> quad;
  quad.reserve(static_cast<std::size_t>(options.density[1] * choose(n, 2)) + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (keep(options.density[1])) quad.push_back({i, j, draw(options.law[1], rng)});
    }
  }
  std::vector<CubicTerm> cub;
  cub.reserve(static_cast<std::size_t>(options.density[2] * choose(n, 3)) + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      for (Index r = j + 1; r < n; ++r) {
        if (keep(options.density[2])) cub.push_back({i, j, r, draw(options.law[2], rng)});
      }
    }
  }
  return HuboProblem(n, std::move(lin), std::move(quad), std::move(cub));
}

SubHubo extract_sub_hubo(const HuboProblem& problem, std::span<const Index> subset) {
  const std::size_t n = subset.size();
  if (n == 0) throw std::invalid_argument("extract_sub_hubo: empty subset");
  for (std::size_t k = 0; k < n; ++k) {
    if (subset[k] >= problem.size()) {
      throw std::invalid_argument("extract_sub_hubo: index " + std::to_string(subset[k]) +
                                  " out of range");
    }
    if (k > 0 && subset[k - 1] >= subset[k]) {
      throw std::invalid_argument(
          "extract_sub_hubo: subset must be strictly increasing without duplicates");
    }
  }

  std::vector<LinearTerm> lin;
  std::vector<QuadraticTerm> quad;
  std::vector<CubicTerm> cub;

  // Either probe the parent for every tuple inside the subset, or scan every
  // parent term and keep those that map inside. Pick whichever touches less.
  const double probes = static_cast<double>(n) * n * n / 6.0;
  const bool probe = probes < static_cast<double>(problem.term_count());
  if (probe) {
    for (Index a = 0; a < n; ++a) {
      if (auto c = problem.find(subset[a])) lin.push_back({a, *c});
    }
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        if (auto c = problem.find(subset[a], subset[b])) quad.push_back({a, b, *c});
      }
    }
    if (!problem.cubic().empty()) {
      for (Index a = 0; a < n; ++a) {
        for (Index b = a + 1; b < n; ++b) {
          for (Index r = b + 1; r < n; ++r) {
            if (auto c = problem.find(subset[a], subset[b], subset[r])) {
              cub.push_back({a, b, r, *c});
            }
          }
        }
      }
    }
  } else {
    constexpr Index kAbsent = std::numeric_limits<Index>::max();
    std::vector<Index> local(problem.size(), kAbsent);
    for (Index a = 0; a < n; ++a) local[subset[a]] = a;
    for (const auto& t : problem.linear()) {
      if (local[t.i] != kAbsent) lin.push_back({local[t.i], t.coeff});
    }
    for (const auto& t : problem.quadratic()) {
      if (local[t.i] != kAbsent && local[t.j] != kAbsent) {
        quad.push_back({local[t.i], local[t.j], t.coeff});
      }
    }
    for (const auto& t : problem.cubic()) {
      if (local[t.i] != kAbsent && local[t.j] != kAbsent && local[t.r] != kAbsent) {
        cub.push_back({local[t.i], local[t.j], local[t.r], t.coeff});
      }
    }
  }
  SubHubo sub;
  sub.subset.assign(subset.begin(), subset.end());
  sub.problem = HuboProblem(n, std::move(lin), std::move(quad), std::move(cub));
  sub.origin = problem.fingerprint();
  return sub;
}

}  // namespace dqof
