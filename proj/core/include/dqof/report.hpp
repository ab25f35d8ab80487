#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqof/cluster.hpp"
#include "dqof/engine.hpp"

namespace dqof {

std::string to_string(ClusterParamMode mode);
ClusterParamMode parse_cluster_mode(const std::string& text);

/// Configuration echo, without the decomposition operator.
nlohmann::json config_to_json(const DqofConfig& config);
/// Fields absent from `j` keep their defaults. Throws ParseError on unknown
/// keys or wrong types.
DqofConfig config_from_json(const nlohmann::json& j);
/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

/// `stable` zeroes every timing field.
nlohmann::json run_report_to_json(const RunReport& report, bool stable);
nlohmann::json depth_width_to_json(const DepthWidthReport& report);

/// One flat result line. Optional fields print as empty cells.
struct ResultRow {
  std::string experiment;
  std::string solver;
  std::uint64_t instance_seed = 0;
  std::size_t N = 0;
  std::optional<std::size_t> n, m, P, T;
  std::optional<double> energy;
  std::optional<double> reference_energy;
  /// "brute", "best", "pinned" or empty.
  std::string reference_source;
  std::optional<double> approximation_ratio;
  std::optional<double> relative_accuracy;
  double decompose_s = 0.0;
  double solve_s = 0.0;
  double aggregate_s = 0.0;
  double total_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  /// "ok", "exported only", ...
  std::string status = "ok";

  void zero_timings() { decompose_s = solve_s = aggregate_s = total_s = 0.0; }
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// The fixed CSV header line, without newline.
const std::string& result_csv_header();
void write_result_header(std::ostream& out);
void write_result_row(std::ostream& out, const ResultRow& row);
/// Throws ParseError when the header differs or a row is malformed.
std::vector<ResultRow> read_result_csv(std::istream& in);

}  // namespace dqof
