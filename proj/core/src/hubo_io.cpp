#include "dqof/hubo_io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "dqof/error.hpp"

namespace dqof {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  double value = 0.0;
  std::from_chars_result res{};
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    body.remove_prefix(2);
    res = std::from_chars(body.data(), body.data() + body.size(), value,
                          std::chars_format::hex);
  } else {
    res = std::from_chars(body.data(), body.data() + body.size(), value);
  }
  if (res.ec != std::errc{} || res.ptr != body.data() + body.size() || body.empty()) {
    throw ParseError("invalid number '" + std::string(text) + "'");
  }
  return negative ? -value : value;
}

void write_hubo_text(std::ostream& os, const HuboProblem& problem) {
  os << "HUBO N=" << problem.size() << '\n';
  for (const auto& t : problem.linear()) os << "1 " << t.i << ' ' << format_double(t.coeff) << '\n';
  for (const auto& t : problem.quadratic()) {
    os << "2 " << t.i << ' ' << t.j << ' ' << format_double(t.coeff) << '\n';
  }
  for (const auto& t : problem.cubic()) {
    os << "3 " << t.i << ' ' << t.j << ' ' << t.r << ' ' << format_double(t.coeff) << '\n';
  }
}

namespace {

Index parse_index(std::string_view tok, std::size_t line_no) {
  Index v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad index '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
    std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

}  // namespace

HuboProblem read_hubo_text(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<LinearTerm> lin;
  std::vector<QuadraticTerm> quad;
  std::vector<CubicTerm> cub;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (!have_header) {
      if (toks.size() != 2 || toks[0] != "HUBO" || toks[1].substr(0, 2) != "N=") {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'HUBO N=<int>'");
      }
      auto digits = toks[1].substr(2);
      auto res = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || n == 0) {
        throw ParseError("line " + std::to_string(line_no) + ": bad size in header");
      }
      have_header = true;
      continue;
    }
    auto order = parse_index(toks[0], line_no);
    if (order < 1 || order > 3 || toks.size() != order + 2) {
      throw ParseError("line " + std::to_string(line_no) + ": expected '<order> <indices> <coeff>'");
    }
    double c = 0.0;
    try {
      c = parse_double(toks[order + 1]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (order == 1) {
      lin.push_back({parse_index(toks[1], line_no), c});
    } else if (order == 2) {
      quad.push_back({parse_index(toks[1], line_no), parse_index(toks[2], line_no), c});
    } else {
      cub.push_back({parse_index(toks[1], line_no), parse_index(toks[2], line_no),
                     parse_index(toks[3], line_no), c});
    }
  }
  if (!have_header) throw ParseError("missing 'HUBO N=<int>' header");
  try {
    return HuboProblem(n, std::move(lin), std::move(quad), std::move(cub));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

nlohmann::json hubo_to_json(const HuboProblem& problem) {
  nlohmann::json doc;
  doc["format"] = "hubo";
  doc["N"] = problem.size();
  auto& lin = doc["linear"] = nlohmann::json::array();
  for (const auto& t : problem.linear()) lin.push_back({t.i, t.coeff});
  auto& quad = doc["quadratic"] = nlohmann::json::array();
  for (const auto& t : problem.quadratic()) quad.push_back({t.i, t.j, t.coeff});
  auto& cub = doc["cubic"] = nlohmann::json::array();
  for (const auto& t : problem.cubic()) cub.push_back({t.i, t.j, t.r, t.coeff});
  return doc;
}

HuboProblem hubo_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "hubo") throw ParseError("not a hubo document");
    const auto n = doc.at("N").get<std::size_t>();
    std::vector<LinearTerm> lin;
    std::vector<QuadraticTerm> quad;
    std::vector<CubicTerm> cub;
    for (const auto& t : doc.value("linear", nlohmann::json::array())) {
      lin.push_back({t.at(0).get<Index>(), t.at(1).get<double>()});
    }
    for (const auto& t : doc.value("quadratic", nlohmann::json::array())) {
      quad.push_back({t.at(0).get<Index>(), t.at(1).get<Index>(), t.at(2).get<double>()});
    }
    for (const auto& t : doc.value("cubic", nlohmann::json::array())) {
      cub.push_back({t.at(0).get<Index>(), t.at(1).get<Index>(), t.at(2).get<Index>(),
                     t.at(3).get<double>()});
    }
    return HuboProblem(n, std::move(lin), std::move(quad), std::move(cub));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("hubo json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("hubo json: ") + e.what());
  }
}

void save_hubo(const std::filesystem::path& path, const HuboProblem& problem) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (path.extension() == ".json") {
    os << hubo_to_json(problem).dump() << '\n';
  } else {
    write_hubo_text(os, problem);
  }
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

HuboProblem load_hubo(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path.string() + "'");
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    return hubo_from_json(doc);
  }
  return read_hubo_text(is);
}

}  // namespace dqof
