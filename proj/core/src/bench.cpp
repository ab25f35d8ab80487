#include "dqof/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <stdexcept>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "dqof/anneal.hpp"
#include "dqof/brute_force.hpp"
#include "dqof/error.hpp"
#include "dqof/hubo_io.hpp"
#include "dqof/metrics.hpp"
#include "dqof/milp.hpp"
#include "dqof/quadratize.hpp"
#include "dqof/rng.hpp"

namespace dqof {

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names{"dqof",  "sa",        "sa-quadratized",
                                              "brute", "export-lp", "consensus"};
  return names;
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": options must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; })) {
      throw std::invalid_argument(where + ": unknown option '" + k + "'");
    }
  }
}

template <class T>
T opt(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::invalid_argument(std::string("option '") + key + "' has the wrong type");
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

SolverSpec solver_spec(std::string name, std::string label, nlohmann::json options) {
  SolverSpec s;
  s.name = std::move(name);
  s.label = std::move(label);
  s.options = std::move(options);
  return s;
}

AnnealSchedule schedule_from(const nlohmann::json& o, const HuboProblem& p) {
  auto s = AnnealSchedule::defaults(p);
  s.t0 = opt(o, "t0", s.t0);
  s.tf = opt(o, "tf", s.tf);
  s.sweeps = opt(o, "sweeps", s.sweeps);
  s.validate();
  return s;
}

struct AnnealBest {
  AnnealResult result;
  std::size_t restart = 0;
};

// Best of `restarts` independent runs, each on derive_seed(seed, {r}).
template <class Problem>
AnnealBest anneal_restarts(const Problem& p, const AnnealSchedule& s, std::uint64_t seed,
                           std::size_t restarts, const AnnealOptions& ao) {
  AnnealBest best;
  for (std::size_t r = 0; r < restarts; ++r) {
    auto res = simulated_annealing(p, s, derive_seed(seed, {r}), ao);
    if (r == 0 || res.energy < best.result.energy) best = {std::move(res), r};
  }
  return best;
}

nlohmann::json base_report(const std::string& solver, const HuboProblem& p,
                           const nlohmann::json& options) {
  return {{"solver", solver}, {"N", p.size()}, {"problem_fingerprint", hex64(p.fingerprint())},
          {"options", options}};
}

void finish(SolveOutcome& out, const HuboProblem& p, double seconds, bool stable) {
  out.timings.total = seconds;
  if (!out.x.empty()) {
    out.energy = evaluate(p, out.x);
    out.report["energy"] = *out.energy;
    out.report["assignment"] = to_bitstring(out.x);
  } else {
    out.report["energy"] = nullptr;
    out.report["assignment"] = nullptr;
  }
  out.report["status"] = out.status;
  out.report["timings"] = {{"decompose", 0.0}, {"solve", 0.0}, {"aggregate", 0.0},
                           {"total", stable ? 0.0 : seconds}};
}

SolveOutcome solve_dqof(const SolverSpec& spec, const HuboProblem& p, const SolveContext& ctx) {
  nlohmann::json o = spec.options;
  if (!o.contains("n")) o["n"] = std::min<std::size_t>(8, p.size());
  DqofConfig cfg;
  try {
    cfg = config_from_json(o);
  } catch (const ParseError& e) {
    throw std::invalid_argument(e.what());
  }
  cfg.seed = ctx.seed;
  cfg.workers = ctx.workers;
  cfg.validate(p.size());
  auto canonical = config_to_json(cfg);
  canonical.erase("seed");
  SolveOutcome out;
  out.config_hash = config_hash({{"solver", "dqof"}, {"config", canonical}});
  auto rep = run_dqof(p, cfg);
  out.x = rep.best_assignment;
  out.energy = rep.best_energy;
  out.timings = rep.timings;
  out.n = cfg.sub_size;
  out.m = rep.resolved_subs;
  out.P = cfg.instances;
  out.T = cfg.iterations;
  out.report = run_report_to_json(rep, ctx.stable);
  out.report["status"] = out.status;
  return out;
}

SolveOutcome solve_sa(const SolverSpec& spec, const HuboProblem& p, const SolveContext& ctx) {
  const auto& o = spec.options;
  check_keys(o, {"t0", "tf", "sweeps", "restarts"}, "sa");
  const auto s = schedule_from(o, p);
  const auto restarts = opt<std::size_t>(o, "restarts", 1);
  if (restarts == 0) throw std::invalid_argument("sa: restarts must be >= 1");
  SolveOutcome out;
  nlohmann::json resolved = {{"t0", s.t0}, {"tf", s.tf}, {"sweeps", s.sweeps}, {"restarts", restarts}};
  out.config_hash = config_hash({{"solver", "sa"}, {"options", resolved}});
  AnnealOptions ao;
  ao.time_limit_seconds = ctx.time_limit_seconds;
  if (ao.time_limit_seconds) resolved["time_limit_s"] = ctx.stable ? 0.0 : *ao.time_limit_seconds;
  const auto start = clock_type::now();
  auto best = anneal_restarts(p, s, ctx.seed, restarts, ao);
  out.x = std::move(best.result.x);
  out.report = base_report("sa", p, resolved);
  out.report["sweeps_done"] = best.result.sweeps;
  out.report["best_restart"] = best.restart;
  finish(out, p, seconds_since(start), ctx.stable);
  return out;
}

SolveOutcome solve_sa_quadratized(const SolverSpec& spec, const HuboProblem& p,
                                  const SolveContext& ctx) {
  const auto& o = spec.options;
  check_keys(o, {"penalty", "t0", "tf", "sweeps", "restarts"}, "sa-quadratized");
  const double penalty = opt(o, "penalty", 5.0);
  const auto restarts = opt<std::size_t>(o, "restarts", 1);
  if (restarts == 0) throw std::invalid_argument("sa-quadratized: restarts must be >= 1");
  const auto start = clock_type::now();
  const auto q = quadratize(p, penalty);
  const auto s = schedule_from(o, q.qubo);
  SolveOutcome out;
  nlohmann::json resolved = {{"penalty", penalty}, {"t0", s.t0}, {"tf", s.tf},
                             {"sweeps", s.sweeps}, {"restarts", restarts}};
  out.config_hash = config_hash({{"solver", "sa-quadratized"}, {"options", resolved}});
  AnnealOptions ao;
  if (ctx.time_limit_seconds) {
    // Quadratization counts against the budget.
    ao.time_limit_seconds = std::max(1e-3, *ctx.time_limit_seconds - seconds_since(start));
    resolved["time_limit_s"] = ctx.stable ? 0.0 : *ctx.time_limit_seconds;
  }
  auto best = anneal_restarts(q, s, ctx.seed, restarts, ao);
  out.x = project(q, best.result.x);
  out.report = base_report("sa-quadratized", p, resolved);
  out.report["qubo_size"] = q.size();
  out.report["auxiliaries"] = q.aux.size();
  out.report["qubo_energy"] = best.result.energy;
  out.report["sweeps_done"] = best.result.sweeps;
  std::size_t violated = 0;
  for (const auto& a : q.aux) violated += best.result.x[a.aux] != (best.result.x[a.i] & best.result.x[a.j]);
  out.report["violated_auxiliaries"] = violated;
  finish(out, p, seconds_since(start), ctx.stable);
  return out;
}

SolveOutcome solve_brute(const SolverSpec& spec, const HuboProblem& p, const SolveContext& ctx) {
  const auto& o = spec.options;
  check_keys(o, {"cap"}, "brute");
  const auto cap = opt<std::size_t>(o, "cap", kDefaultBruteForceCap);
  SolveOutcome out;
  out.config_hash = config_hash({{"solver", "brute"}, {"options", {{"cap", cap}}}});
  const auto start = clock_type::now();
  auto res = brute_force(p, cap);
  out.x = std::move(res.x);
  out.report = base_report("brute", p, {{"cap", cap}});
  finish(out, p, seconds_since(start), ctx.stable);
  return out;
}

SolveOutcome solve_export_lp(const SolverSpec& spec, const HuboProblem& p, const SolveContext& ctx) {
  check_keys(spec.options, {}, "export-lp");
  if (ctx.output_dir.empty()) throw std::invalid_argument("export-lp: needs an output directory");
  SolveOutcome out;
  out.config_hash = config_hash({{"solver", "export-lp"}});
  const auto start = clock_type::now();
  const auto model = linearize_to_milp(p);
  std::filesystem::create_directories(ctx.output_dir);
  const auto path = ctx.output_dir / (ctx.stem + ".lp");
  write_lp(path, model);
  out.report = base_report("export-lp", p, nlohmann::json::object());
  out.report["lp_file"] = path.filename().string();
  out.report["variables"] = model.variable_count();
  out.report["constraints"] = model.constraints.size();
  if (auto obj = solve_with_external(path)) {
    out.report["external_objective"] = *obj;
    out.energy = *obj;
    out.status = "external solver";
  } else {
    out.status = "exported only";
  }
  finish(out, p, seconds_since(start), ctx.stable);
  if (out.x.empty() && out.energy) out.report["energy"] = *out.energy;
  return out;
}

// Best of a long multi-restart anneal and a DQOF run.
SolveOutcome solve_consensus(const SolverSpec& spec, const HuboProblem& p, const SolveContext& ctx) {
  const auto& o = spec.options;
  check_keys(o, {"restarts", "sweeps", "dqof"}, "consensus");
  const auto restarts = opt<std::size_t>(o, "restarts", 16);
  auto sched = AnnealSchedule::defaults(p);
  sched.sweeps = opt<std::size_t>(o, "sweeps", 5000);
  sched.validate();
  const auto start = clock_type::now();
  auto sa = anneal_restarts(p, sched, derive_seed(ctx.seed, {1}), restarts, {});
  auto d = solver_spec("dqof", "dqof", o.value("dqof", nlohmann::json::object()));
  SolveContext dctx = ctx;
  dctx.seed = derive_seed(ctx.seed, {2});
  auto dq = solve_dqof(d, p, dctx);

  SolveOutcome out;
  nlohmann::json resolved = {{"restarts", restarts}, {"sweeps", sched.sweeps}, {"dqof", d.options}};
  out.config_hash = config_hash({{"solver", "consensus"}, {"options", resolved}});
  const bool sa_wins = sa.result.energy <= *dq.energy;
  out.x = sa_wins ? sa.result.x : dq.x;
  out.report = base_report("consensus", p, resolved);
  out.report["sa_energy"] = sa.result.energy;
  out.report["dqof_energy"] = *dq.energy;
  out.report["agree"] = std::abs(sa.result.energy - *dq.energy) <= 1e-9 * (1.0 + std::abs(sa.result.energy));
  finish(out, p, seconds_since(start), ctx.stable);
  return out;
}

}  // namespace

SolveOutcome run_solver(const SolverSpec& spec, const HuboProblem& problem,
                        const SolveContext& context) {
  SolveOutcome out;
  if (spec.name == "dqof") {
    out = solve_dqof(spec, problem, context);
  } else if (spec.name == "sa") {
    out = solve_sa(spec, problem, context);
  } else if (spec.name == "sa-quadratized") {
    out = solve_sa_quadratized(spec, problem, context);
  } else if (spec.name == "brute") {
    out = solve_brute(spec, problem, context);
  } else if (spec.name == "export-lp") {
    out = solve_export_lp(spec, problem, context);
  } else if (spec.name == "consensus") {
    out = solve_consensus(spec, problem, context);
  } else {
    throw std::invalid_argument("unknown solver '" + spec.name + "'");
  }
  out.solver = spec.label.empty() ? spec.name : spec.label;
  out.report["label"] = out.solver;
  out.report["seed"] = context.seed;
  out.report["config_hash"] = out.config_hash;
  return out;
}

ResultRow make_row(const std::string& experiment, const SolveOutcome& o, std::size_t N,
                   std::uint64_t inst_seed, std::uint64_t seed, bool stable) {
  ResultRow r;
  r.experiment = experiment;
  r.solver = o.solver;
  r.instance_seed = inst_seed;
  r.N = N;
  r.n = o.n;
  r.m = o.m;
  r.P = o.P;
  r.T = o.T;
  r.energy = o.energy;
  r.decompose_s = o.timings.decompose;
  r.solve_s = o.timings.solve;
  r.aggregate_s = o.timings.aggregate;
  r.total_s = o.timings.total;
  r.seed = seed;
  r.config_hash = o.config_hash;
  r.status = o.status;
  if (stable) r.zero_timings();
  return r;
}

void BenchSpec::validate() const {
  if (experiment.empty()) throw std::invalid_argument("bench: experiment id is empty");
  if (experiment.find_first_of(",/\\\"\n") != std::string::npos) {
    throw std::invalid_argument("bench: experiment id must not contain separators");
  }
  if (depth_sweep_m > 0) {
    if (depth_sweep_n == 0 || depth_sweep_layers == 0) {
      throw std::invalid_argument("bench: depth sweep needs n and layers >= 1");
    }
    return;
  }
  if (sizes.empty()) throw std::invalid_argument("bench: no sizes");
  if (solvers.empty()) throw std::invalid_argument("bench: no solvers");
  if (repetitions == 0) throw std::invalid_argument("bench: repetitions must be >= 1");
  std::set<std::string> labels;
  for (const auto& s : solvers) {
    const auto& names = solver_names();
    if (std::find(names.begin(), names.end(), s.name) == names.end()) {
      throw std::invalid_argument("bench: unknown solver '" + s.name + "'");
    }
    const auto label = s.label.empty() ? s.name : s.label;
    if (!labels.insert(label).second) throw std::invalid_argument("bench: duplicate label '" + label + "'");
  }
  for (const auto& s : solvers) {
    if (s.match_time_of.empty()) continue;
    if (s.name != "sa" && s.name != "sa-quadratized") {
      throw std::invalid_argument("bench: match_time_of applies to annealers only");
    }
    if (!labels.count(s.match_time_of)) {
      throw std::invalid_argument("bench: match_time_of names unknown label '" + s.match_time_of + "'");
    }
  }
}

BenchSpec bench_spec_from_json(const nlohmann::json& j) {
  BenchSpec s;
  try {
    if (!j.is_object()) throw ParseError("bench spec must be an object");
    for (const auto& [k, v] : j.items()) {
      static const std::set<std::string> known{"experiment", "sizes", "solvers", "repetitions",
                                               "seed_base", "generator", "brute_reference_cap",
                                               "depth_sweep"};
      if (!known.count(k)) throw ParseError("bench spec: unknown key '" + k + "'");
    }
    s.experiment = j.at("experiment").get<std::string>();
    s.sizes = j.value("sizes", std::vector<std::size_t>{});
    s.repetitions = j.value("repetitions", std::size_t{1});
    s.seed_base = j.value("seed_base", std::uint64_t{0});
    s.brute_reference_cap = j.value("brute_reference_cap", std::size_t{24});
    if (auto it = j.find("generator"); it != j.end()) {
      if (auto d = it->find("density"); d != it->end()) s.generator.density = d->get<std::array<double, 3>>();
      if (auto l = it->find("law"); l != it->end()) {
        const auto laws = l->get<std::array<std::string, 3>>();
        for (int t = 0; t < 3; ++t) s.generator.law[t] = CoefficientLaw::parse(laws[t]);
      }
    }
    if (auto it = j.find("depth_sweep"); it != j.end()) {
      s.depth_sweep_m = it->at("m_max").get<std::size_t>();
      s.depth_sweep_n = it->value("n", std::size_t{4});
      s.depth_sweep_layers = it->value("layers", std::size_t{2});
    }
    for (const auto& sj : j.value("solvers", nlohmann::json::array())) {
      for (const auto& [k, v] : sj.items()) {
        static const std::set<std::string> known{"name", "label", "options", "min_n", "max_n",
                                                 "match_time_of"};
        if (!known.count(k)) throw ParseError("bench spec: unknown solver key '" + k + "'");
      }
      SolverSpec sp;
      sp.name = sj.at("name").get<std::string>();
      sp.label = sj.value("label", sp.name);
      sp.options = sj.value("options", nlohmann::json::object());
      sp.min_n = sj.value("min_n", std::size_t{0});
      sp.max_n = sj.value("max_n", SIZE_MAX);
      sp.match_time_of = sj.value("match_time_of", std::string());
      s.solvers.push_back(std::move(sp));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bench spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bench spec: ") + e.what());
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return s;
}

nlohmann::json bench_spec_to_json(const BenchSpec& s) {
  nlohmann::json solvers = nlohmann::json::array();
  for (const auto& sp : s.solvers) {
    nlohmann::json o = {{"name", sp.name}, {"label", sp.label.empty() ? sp.name : sp.label},
                        {"options", sp.options}};
    if (sp.min_n != 0) o["min_n"] = sp.min_n;
    if (sp.max_n != SIZE_MAX) o["max_n"] = sp.max_n;
    if (!sp.match_time_of.empty()) o["match_time_of"] = sp.match_time_of;
    solvers.push_back(std::move(o));
  }
  std::array<std::string, 3> laws;
  for (int t = 0; t < 3; ++t) laws[t] = s.generator.law[t].to_string();
  nlohmann::json j = {{"experiment", s.experiment},
                      {"sizes", s.sizes},
                      {"solvers", solvers},
                      {"repetitions", s.repetitions},
                      {"seed_base", s.seed_base},
                      {"brute_reference_cap", s.brute_reference_cap},
                      {"generator", {{"density", s.generator.density}, {"law", laws}}}};
  if (s.depth_sweep_m > 0) {
    j["depth_sweep"] = {{"m_max", s.depth_sweep_m}, {"n", s.depth_sweep_n}, {"layers", s.depth_sweep_layers}};
  }
  return j;
}

BenchSpec bench_preset(const std::string& name) {
  BenchSpec s;
  s.experiment = name;
  if (name == "fig1b") {
    s.sizes = {8, 12, 16, 20, 24, 32, 40};
    s.repetitions = 3;
    s.seed_base = 1;
    s.solvers.push_back(solver_spec("dqof", "dqof", {{"P", 10}, {"T", 50}}));
    auto ref = solver_spec("consensus", "consensus", {{"restarts", 16}, {"sweeps", 5000}});
    ref.min_n = 25;
    s.solvers.push_back(ref);
  } else if (name == "fig3") {
    s.sizes = {20, 50, 100, 200, 500};
    s.repetitions = 1;
    s.seed_base = 3;
    s.solvers.push_back(solver_spec("dqof", "dqof", {{"n", 8}, {"P", 4}, {"T", 50}}));
    s.solvers.push_back(solver_spec("sa-quadratized", "sa-quadratized", {{"penalty", 5.0}, {"sweeps", 200}}));
    s.solvers.push_back(solver_spec("sa", "sa-native", {{"sweeps", 200}}));
    auto lp = solver_spec("export-lp", "milp", nlohmann::json::object());
    lp.max_n = 50;
    s.solvers.push_back(lp);
  } else if (name == "fig1d") {
    s.depth_sweep_m = 8;
    s.depth_sweep_n = 4;
    s.depth_sweep_layers = 2;
    s.seed_base = 4;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (expected fig1b, fig3 or fig1d)");
  }
  s.validate();
  return s;
}

std::uint64_t instance_seed(const BenchSpec& spec, std::size_t N, std::size_t rep) {
  return derive_seed(spec.seed_base, {N, rep});
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool row_less(const ResultRow& a, const ResultRow& b) {
  return std::tie(a.experiment, a.solver, a.N, a.instance_seed) <
         std::tie(b.experiment, b.solver, b.N, b.instance_seed);
}

}  // namespace

ComparisonTable compare(std::vector<ResultRow> rows) {
  ComparisonTable t;
  if (rows.empty()) return t;
  for (const auto& r : rows) {
    if (r.experiment != rows.front().experiment) {
      throw std::invalid_argument("compare: rows mix experiments '" + rows.front().experiment +
                                  "' and '" + r.experiment + "'");
    }
  }
  // Instance sets per (N, solver) must agree across solvers at each N.
  std::map<std::size_t, std::map<std::string, std::set<std::uint64_t>>> seen;
  for (const auto& r : rows) {
    if (!seen[r.N][r.solver].insert(r.instance_seed).second) {
      throw std::invalid_argument("compare: duplicate row for solver '" + r.solver + "'");
    }
  }
  for (const auto& [N, by_solver] : seen) {
    const auto& first = by_solver.begin()->second;
    for (const auto& [solver, seeds] : by_solver) {
      if (seeds != first) {
        throw std::invalid_argument("compare: solvers '" + by_solver.begin()->first + "' and '" +
                                    solver + "' ran different instances at N=" + std::to_string(N));
      }
    }
  }
  std::map<std::pair<std::size_t, std::uint64_t>, std::pair<double, double>> range;
  for (const auto& r : rows) {
    if (!r.energy) continue;
    const auto key = std::pair{r.N, r.instance_seed};
    auto [it, fresh] = range.try_emplace(key, *r.energy, *r.energy);
    if (!fresh) {
      it->second.first = std::min(it->second.first, *r.energy);
      it->second.second = std::max(it->second.second, *r.energy);
    }
  }
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> acc;
  for (auto& r : rows) {
    if (!r.energy) {
      r.relative_accuracy.reset();
      continue;
    }
    const auto [best, worst] = range.at({r.N, r.instance_seed});
    r.relative_accuracy = relative_accuracy(*r.energy, best, worst).value;
    acc[{r.solver, r.N}].push_back(*r.relative_accuracy);
  }
  std::sort(rows.begin(), rows.end(), row_less);
  t.rows = std::move(rows);
  for (auto& [key, v] : acc) {
    std::sort(v.begin(), v.end());
    t.entries.push_back({key.first, key.second, v.size(), quantile(v, 0.5), quantile(v, 0.25),
                         quantile(v, 0.75)});
  }
  return t;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& t) {
  out << "solver,N,instances,median_relative_accuracy,q1,q3,iqr\n";
  for (const auto& e : t.entries) {
    out << e.solver << ',' << e.N << ',' << e.instances << ',' << format_double(e.median) << ','
        << format_double(e.q1) << ',' << format_double(e.q3) << ',' << format_double(e.q3 - e.q1)
        << '\n';
  }
}

std::vector<DepthWidthReport> depth_sweep(std::size_t m_max, std::size_t n, std::size_t layers,
                                          std::uint64_t seed) {
  std::vector<DepthWidthReport> out;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const auto problem = random_hubo(m * n, derive_seed(seed, {m}));
    std::vector<SubHubo> subs;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<Index> subset(n);
      for (std::size_t j = 0; j < n; ++j) subset[j] = static_cast<Index>(k * n + j);
      subs.push_back(extract_sub_hubo(problem, subset));
    }
    out.push_back(depth_width_report(combine(std::move(subs)), layers));
  }
  return out;
}

void write_depth_csv(std::ostream& out, const std::vector<DepthWidthReport>& reports,
                     std::size_t n) {
  out << "m,n,width,layers,phase_layers,depth_proxy,dense_depth_proxy,linear_terms,"
         "quadratic_terms,cubic_terms\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    out << k + 1 << ',' << n << ',' << r.width << ',' << r.layers << ',' << r.phase_layers << ','
        << r.depth_proxy << ',' << r.dense_depth_proxy << ',' << r.gate_counts[0] << ','
        << r.gate_counts[1] << ',' << r.gate_counts[2] << '\n';
  }
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

BenchOutcome run_bench(const BenchSpec& spec, std::size_t workers, bool stable,
                       const std::filesystem::path& output_dir) {
  spec.validate();
  BenchOutcome result;
  if (!output_dir.empty()) std::filesystem::create_directories(output_dir / "reports");

  if (spec.depth_sweep_m > 0) {
    result.depth = depth_sweep(spec.depth_sweep_m, spec.depth_sweep_n, spec.depth_sweep_layers,
                               spec.seed_base);
    if (!output_dir.empty()) {
      std::ostringstream csv;
      write_depth_csv(csv, result.depth, spec.depth_sweep_n);
      write_text(output_dir / (spec.experiment + ".csv"), csv.str());
    }
    return result;
  }

  const std::size_t threads = workers == 0 ? tbb::info::default_concurrency() : workers;
  tbb::task_arena arena(static_cast<int>(threads));
  std::vector<ResultRow> rows;
  std::vector<std::pair<ResultRow, nlohmann::json>> runs;

  for (std::size_t N : spec.sizes) {
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
      const std::uint64_t iseed = instance_seed(spec, N, rep);
      const auto problem = random_hubo(N, spec.generator, iseed);
      const std::string stem = spec.experiment + "_N" + std::to_string(N) + "_" + hex64(iseed);

      std::vector<std::size_t> first, second;
      for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
        const auto& sp = spec.solvers[s];
        if (N < sp.min_n || N > sp.max_n) continue;
        (sp.match_time_of.empty() ? first : second).push_back(s);
      }
      std::vector<std::optional<SolveOutcome>> outcomes(spec.solvers.size());
      auto run_one = [&](std::size_t s) {
        const auto& sp = spec.solvers[s];
        const auto label = sp.label.empty() ? sp.name : sp.label;
        SolveContext ctx;
        ctx.seed = derive_seed(iseed, {fnv1a(label)});
        ctx.workers = 1;
        ctx.stable = stable;
        ctx.output_dir = output_dir;
        ctx.stem = stem + "_" + label;
        if (!sp.match_time_of.empty()) {
          for (std::size_t o = 0; o < spec.solvers.size(); ++o) {
            const auto& other = spec.solvers[o];
            if ((other.label.empty() ? other.name : other.label) == sp.match_time_of &&
                outcomes[o]) {
              ctx.time_limit_seconds = std::max(1e-3, outcomes[o]->timings.total);
            }
          }
        }
        outcomes[s] = run_solver(sp, problem, ctx);
      };
      for (const auto* batch : {&first, &second}) {
        arena.execute([&] {
          tbb::parallel_for(std::size_t{0}, batch->size(),
                            [&](std::size_t k) { run_one((*batch)[k]); });
        });
      }

      std::optional<double> reference;
      std::string source;
      if (N <= spec.brute_reference_cap) {
        reference = brute_force(problem, spec.brute_reference_cap).energy;
        source = "brute";
      } else {
        for (const auto& o : outcomes) {
          if (o && o->energy && !o->x.empty() && (!reference || *o->energy < *reference)) {
            reference = o->energy;
            source = "best";
          }
        }
      }
      for (std::size_t s = 0; s < outcomes.size(); ++s) {
        if (!outcomes[s]) continue;
        auto row = make_row(spec.experiment, *outcomes[s], N, iseed,
                            outcomes[s]->report.value("seed", std::uint64_t{0}), stable);
        row.reference_energy = reference;
        row.reference_source = reference ? source : "";
        if (reference && row.energy) {
          const auto ar = approximation_ratio(*row.energy, *reference);
          if (ar.comparable) row.approximation_ratio = ar.value;
        }
        auto report = outcomes[s]->report;
        report["experiment"] = spec.experiment;
        report["instance_seed"] = iseed;
        runs.emplace_back(std::move(row), std::move(report));
      }
    }
  }

  std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return row_less(a.first, b.first); });
  for (auto& [row, report] : runs) rows.push_back(row);
  result.table = compare(std::move(rows));
  for (auto& r : runs) result.reports.push_back(std::move(r.second));

  if (!output_dir.empty()) {
    std::ostringstream csv;
    write_result_header(csv);
    for (const auto& r : result.table.rows) write_result_row(csv, r);
    write_text(output_dir / (spec.experiment + ".csv"), csv.str());
    std::ostringstream cmp;
    write_comparison_csv(cmp, result.table);
    write_text(output_dir / (spec.experiment + "_comparison.csv"), cmp.str());
    for (std::size_t k = 0; k < result.table.rows.size(); ++k) {
      const auto& r = result.table.rows[k];
      const auto name = spec.experiment + "_" + r.solver + "_N" + std::to_string(r.N) + "_" +
                        hex64(r.instance_seed) + ".json";
      write_text(output_dir / "reports" / name, result.reports[k].dump(2) + "\n");
    }
  }
  return result;
}

}  // namespace dqof
