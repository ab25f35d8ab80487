#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "dqof/hubo.hpp"

namespace dqof {

/// Line-oriented text format:
///
///   HUBO N=<int>
///   <order> <i> [<j> [<r>]] <coeff>
///
/// one term per line, indices ascending within a term, linear terms first,
/// then quadratic, then cubic, each group in lexicographic order. Blank lines
/// and lines starting with '#' are ignored on input. Coefficients are written
/// as shortest round-trip decimals; hex-float input ("0x1.8p+1") is accepted.
void write_hubo_text(std::ostream& os, const HuboProblem& problem);
HuboProblem read_hubo_text(std::istream& is);

/// Structured form: {"format":"hubo","N":..,"linear":[[i,c],..],
/// "quadratic":[[i,j,c],..],"cubic":[[i,j,r,c],..]}.
nlohmann::json hubo_to_json(const HuboProblem& problem);
HuboProblem hubo_from_json(const nlohmann::json& doc);

/// Dispatches on extension: ".json" uses the structured form, anything else
/// the text form.
void save_hubo(const std::filesystem::path& path, const HuboProblem& problem);
HuboProblem load_hubo(const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);
/// Parses a decimal or hex-float double; throws ParseError on junk.
double parse_double(std::string_view text);

}  // namespace dqof
