#include "dqof/milp.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>
#include <regex>
#include <stdexcept>

#include "dqof/hubo_io.hpp"

namespace dqof {

MilpModel linearize_to_milp(const HuboProblem& hubo) {
  using Sense = MilpModel::Constraint::Sense;
  MilpModel m;
  const std::size_t n = hubo.size();
  m.original_size = n;
  m.names.reserve(n + hubo.quadratic().size() + hubo.cubic().size());
  for (std::size_t i = 0; i < n; ++i) m.names.push_back("x" + std::to_string(i));
  for (const auto& t : hubo.linear()) m.objective.push_back({t.i, t.coeff});

  for (const auto& t : hubo.quadratic()) {
    const std::size_t y = m.names.size();
    const std::string name = "y" + std::to_string(t.i) + "_" + std::to_string(t.j);
    m.names.push_back(name);
    m.objective.push_back({y, t.coeff});
    m.constraints.push_back({name + "_a", {{y, 1.0}, {t.i, -1.0}}, Sense::kLessEqual, 0.0});
    m.constraints.push_back({name + "_b", {{y, 1.0}, {t.j, -1.0}}, Sense::kLessEqual, 0.0});
    m.constraints.push_back(
        {name + "_c", {{y, 1.0}, {t.i, -1.0}, {t.j, -1.0}}, Sense::kGreaterEqual, -1.0});
  }
  for (const auto& t : hubo.cubic()) {
    const std::size_t z = m.names.size();
    const std::string name = "z" + std::to_string(t.i) + "_" + std::to_string(t.j) + "_" +
                             std::to_string(t.r);
    m.names.push_back(name);
    m.objective.push_back({z, t.coeff});
    m.constraints.push_back({name + "_a", {{z, 1.0}, {t.i, -1.0}}, Sense::kLessEqual, 0.0});
    m.constraints.push_back({name + "_b", {{z, 1.0}, {t.j, -1.0}}, Sense::kLessEqual, 0.0});
    m.constraints.push_back({name + "_c", {{z, 1.0}, {t.r, -1.0}}, Sense::kLessEqual, 0.0});
    m.constraints.push_back({name + "_d",
                             {{z, 1.0}, {t.i, -1.0}, {t.j, -1.0}, {t.r, -1.0}},
                             Sense::kGreaterEqual,
                             -2.0});
  }
  return m;
}

std::vector<double> implied_values(const HuboProblem& hubo, const MilpModel& model,
                                   std::span<const std::uint8_t> x) {
  if (x.size() != model.original_size || hubo.size() != model.original_size) {
    throw std::invalid_argument("implied_values: dimension mismatch");
  }
  std::vector<double> v;
  v.reserve(model.variable_count());
  for (auto b : x) v.push_back(b ? 1.0 : 0.0);
  for (const auto& t : hubo.quadratic()) v.push_back((x[t.i] & x[t.j]) ? 1.0 : 0.0);
  for (const auto& t : hubo.cubic()) v.push_back((x[t.i] & x[t.j] & x[t.r]) ? 1.0 : 0.0);
  return v;
}

double milp_objective(const MilpModel& model, std::span<const double> values) {
  if (values.size() != model.variable_count()) {
    throw std::invalid_argument("milp_objective: dimension mismatch");
  }
  double s = 0.0;
  for (const auto& e : model.objective) s += e.coeff * values[e.var];
  return s;
}

bool milp_feasible(const MilpModel& model, std::span<const double> values, double tol) {
  if (values.size() != model.variable_count()) return false;
  for (double v : values) {
    if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
  }
  for (const auto& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& e : c.terms) lhs += e.coeff * values[e.var];
    if (c.sense == MilpModel::Constraint::Sense::kLessEqual ? lhs > c.rhs + tol
                                                            : lhs < c.rhs - tol) {
      return false;
    }
  }
  return true;
}

namespace {

void write_linear(std::ostream& out, const MilpModel& model,
                  const std::vector<MilpModel::Entry>& terms) {
  bool first = true;
  std::size_t on_line = 0;
  for (const auto& e : terms) {
    const double a = std::abs(e.coeff);
    out << (e.coeff < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << format_double(a) << ' '
        << model.names[e.var];
    first = false;
    // LP readers limit line length.
    if (++on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
  }
  if (first) out << "0 " << (model.names.empty() ? "x0" : model.names[0]);
}

}  // namespace

void write_lp(std::ostream& out, const MilpModel& model) {
  out << "\\ HUBO linearization: " << model.original_size << " original variables, "
      << model.variable_count() << " binaries, " << model.constraints.size() << " constraints\n";
  out << "Minimize\n obj: ";
  write_linear(out, model, model.objective);
  out << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    out << ' ' << c.name << ": ";
    write_linear(out, model, c.terms);
    out << (c.sense == MilpModel::Constraint::Sense::kLessEqual ? " <= " : " >= ")
        << format_double(c.rhs) << '\n';
  }
  out << "Binary\n";
  for (std::size_t k = 0; k < model.names.size(); ++k) {
    out << ' ' << model.names[k];
    if ((k + 1) % 10 == 0 || k + 1 == model.names.size()) out << '\n';
  }
  out << "End\n";
}

void write_lp(const std::filesystem::path& path, const MilpModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_lp: cannot open " + path.string());
  write_lp(out, model);
  if (!out) throw std::runtime_error("write_lp: write failed for " + path.string());
}

std::optional<double> parse_solver_objective(const std::string& output) {
  static const std::regex re(R"(objective[^0-9+\-]*([+\-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+\-]?\d+)?))",
                             std::regex::icase);
  std::smatch m;
  if (!std::regex_search(output, m, re)) return std::nullopt;
  return parse_double(m[1].str());
}

std::optional<double> solve_with_external(const std::filesystem::path& lp_path) {
  const char* solver = std::getenv(kMilpSolverEnv);
  if (solver == nullptr || *solver == '\0') return std::nullopt;
  const std::string cmd = std::string("\"") + solver + "\" \"" + lp_path.string() + "\"";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("milp: cannot start solver " + std::string(solver));
  std::string output;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get()) != nullptr) output += buf.data();
  const int status = pclose(pipe.release());
  if (status != 0) throw std::runtime_error("milp: solver exited with status " + std::to_string(status));
  auto obj = parse_solver_objective(output);
  if (!obj) throw std::runtime_error("milp: solver printed no objective");
  return obj;
}

}  // namespace dqof
