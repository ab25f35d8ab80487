#include "dqof/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "dqof/error.hpp"
#include "dqof/hubo_io.hpp"

namespace dqof {

std::string to_string(ClusterParamMode mode) {
  switch (mode) {
    case ClusterParamMode::kIndependent: return "independent";
    case ClusterParamMode::kJoint: return "joint";
    case ClusterParamMode::kShared: return "shared";
  }
  return "independent";
}

ClusterParamMode parse_cluster_mode(const std::string& text) {
  if (text == "independent") return ClusterParamMode::kIndependent;
  if (text == "joint") return ClusterParamMode::kJoint;
  if (text == "shared") return ClusterParamMode::kShared;
  throw ParseError("unknown cluster mode '" + text + "'");
}

nlohmann::json config_to_json(const DqofConfig& c) {
  return {{"n", c.sub_size},
          {"m", c.subs_per_iteration},
          {"P", c.instances},
          {"T", c.iterations},
          {"cluster_size", c.cluster_size},
          {"cluster_mode", to_string(c.cluster_mode)},
          {"seed", c.seed},
          {"qaoa",
           {{"depth", c.qaoa.depth},
            {"shots", c.qaoa.shots},
            {"budget", c.qaoa.budget},
            {"init_gamma", c.qaoa.init_gamma},
            {"init_beta", c.qaoa.init_beta},
            {"rho_begin", c.qaoa.rho_begin},
            {"rho_end", c.qaoa.rho_end},
            {"objective_shots", c.qaoa.objective_shots},
            {"energy_scale", c.qaoa.energy_scale},
            {"qubit_cap", c.qaoa.qubit_cap}}}};
}

namespace {

template <class T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ParseError(where + ": unknown key '" + k + "'");
  }
}

}  // namespace

DqofConfig config_from_json(const nlohmann::json& j) {
  DqofConfig c;
  try {
    if (!j.is_object()) throw ParseError("dqof config must be an object");
    reject_unknown(j, {"n", "m", "P", "T", "cluster_size", "cluster_mode", "seed", "qaoa", "workers"},
                   "dqof config");
    take(j, "n", c.sub_size);
    take(j, "m", c.subs_per_iteration);
    take(j, "P", c.instances);
    take(j, "T", c.iterations);
    take(j, "cluster_size", c.cluster_size);
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
    if (auto it = j.find("cluster_mode"); it != j.end()) {
      c.cluster_mode = parse_cluster_mode(it->get<std::string>());
    }
    if (auto it = j.find("qaoa"); it != j.end()) {
      const auto& q = *it;
      reject_unknown(q, {"depth", "shots", "budget", "init_gamma", "init_beta", "rho_begin", "rho_end",
                         "objective_shots", "qubit_cap", "energy_scale"},
                     "qaoa config");
      take(q, "depth", c.qaoa.depth);
      take(q, "shots", c.qaoa.shots);
      take(q, "budget", c.qaoa.budget);
      take(q, "init_gamma", c.qaoa.init_gamma);
      take(q, "init_beta", c.qaoa.init_beta);
      take(q, "rho_begin", c.qaoa.rho_begin);
      take(q, "rho_end", c.qaoa.rho_end);
      take(q, "objective_shots", c.qaoa.objective_shots);
      take(q, "energy_scale", c.qaoa.energy_scale);
      take(q, "qubit_cap", c.qaoa.qubit_cap);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dqof config: ") + e.what());
  }
  return c;
}

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

nlohmann::json timings_json(const PhaseTimings& t, bool stable) {
  if (stable) return {{"decompose", 0.0}, {"solve", 0.0}, {"aggregate", 0.0}, {"total", 0.0}};
  return {{"decompose", t.decompose}, {"solve", t.solve}, {"aggregate", t.aggregate}, {"total", t.total}};
}

}  // namespace

nlohmann::json run_report_to_json(const RunReport& r, bool stable) {
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& s : r.instances) {
    instances.push_back({{"id", s.id},
                         {"energy", s.energy},
                         {"assignment", to_bitstring(s.x)},
                         {"trace", s.trace},
                         {"timings", timings_json(s.timings, stable)}});
  }
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016" PRIx64, r.problem_fingerprint);
  nlohmann::json j = {{"solver", "dqof"},
                      {"config", config_to_json(r.config)},
                      {"N", r.problem_size},
                      {"problem_fingerprint", fp},
                      {"resolved_m", r.resolved_subs},
                      {"best_energy", r.best_energy},
                      {"best_instance", r.best_instance},
                      {"best_assignment", to_bitstring(r.best_assignment)},
                      {"instances", instances},
                      {"timings", timings_json(r.timings, stable)}};
  j["reference_energy"] = r.reference_energy ? nlohmann::json(*r.reference_energy) : nlohmann::json();
  if (r.approximation && r.approximation->comparable) {
    j["approximation_ratio"] = r.approximation->value;
  } else {
    j["approximation_ratio"] = nullptr;
  }
  return j;
}

nlohmann::json depth_width_to_json(const DepthWidthReport& r) {
  return {{"width", r.width},
          {"layers", r.layers},
          {"phase_layers", r.phase_layers},
          {"depth_proxy", r.depth_proxy},
          {"gate_counts", r.gate_counts},
          {"dense_depth_proxy", r.dense_depth_proxy}};
}

const std::string& result_csv_header() {
  static const std::string h =
      "experiment,solver,instance_seed,N,n,m,P,T,energy,reference_energy,reference_source,"
      "approximation_ratio,relative_accuracy,decompose_s,solve_s,aggregate_s,total_s,seed,"
      "config_hash,status";
  return h;
}

void write_result_header(std::ostream& out) { out << result_csv_header() << '\n'; }

namespace {

constexpr std::size_t kColumns = 20;

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

// Free-text fields must not carry separators.
std::string text_cell(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("result row: text field contains a separator: " + s);
  }
  return s;
}

}  // namespace

void write_result_row(std::ostream& out, const ResultRow& r) {
  out << text_cell(r.experiment) << ',' << text_cell(r.solver) << ',' << r.instance_seed << ','
      << r.N << ',' << cell(r.n) << ',' << cell(r.m) << ',' << cell(r.P) << ',' << cell(r.T) << ','
      << cell(r.energy) << ',' << cell(r.reference_energy) << ',' << text_cell(r.reference_source)
      << ',' << cell(r.approximation_ratio) << ',' << cell(r.relative_accuracy) << ','
      << format_double(r.decompose_s) << ',' << format_double(r.solve_s) << ','
      << format_double(r.aggregate_s) << ',' << format_double(r.total_s) << ',' << r.seed << ','
      << text_cell(r.config_hash) << ',' << text_cell(r.status) << '\n';
}

namespace {

std::optional<double> opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}
std::optional<std::size_t> opt_size(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(s));
}

}  // namespace

std::vector<ResultRow> read_result_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("results: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != result_csv_header()) throw ParseError("results: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      f.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.size() != kColumns) {
      throw ParseError("results line " + std::to_string(line_no) + ": expected " +
                       std::to_string(kColumns) + " fields, got " + std::to_string(f.size()));
    }
    try {
      ResultRow r;
      r.experiment = f[0];
      r.solver = f[1];
      r.instance_seed = std::stoull(f[2]);
      r.N = std::stoull(f[3]);
      r.n = opt_size(f[4]);
      r.m = opt_size(f[5]);
      r.P = opt_size(f[6]);
      r.T = opt_size(f[7]);
      r.energy = opt_double(f[8]);
      r.reference_energy = opt_double(f[9]);
      r.reference_source = f[10];
      r.approximation_ratio = opt_double(f[11]);
      r.relative_accuracy = opt_double(f[12]);
      r.decompose_s = parse_double(f[13]);
      r.solve_s = parse_double(f[14]);
      r.aggregate_s = parse_double(f[15]);
      r.total_s = parse_double(f[16]);
      r.seed = std::stoull(f[17]);
      r.config_hash = f[18];
      r.status = f[19];
      rows.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("results line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace dqof
