#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dqof/bench.hpp"
#include "dqof/brute_force.hpp"
#include "dqof/error.hpp"
#include "dqof/fm.hpp"
#include "dqof/hubo_io.hpp"
#include "dqof/invariants.hpp"
#include "dqof/metrics.hpp"
#include "dqof/report.hpp"
#include "dqof/rng.hpp"

namespace dqof::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool stable = false;
  std::string out = ".";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--workers", c.workers, "Worker threads (0: all cores)")->capture_default_str();
  app->add_flag("--stable-output", c.stable, "Zero timing fields so outputs compare byte for byte");
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void append_row(const fs::path& csv, const ResultRow& row) {
  const bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
  if (!fresh) {
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    if (header != result_csv_header()) {
      throw ParseError(csv.string() + " has a different header; refusing to append");
    }
  }
  std::ofstream f(csv, std::ios::app | std::ios::binary);
  if (!f) throw std::runtime_error("cannot append to " + csv.string());
  if (fresh) write_result_header(f);
  write_result_row(f, row);
}

// "key=value"; value is JSON when it parses, a string otherwise.
void apply_setting(nlohmann::json& options, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError("--option expects key=value, got '" + kv + "'");
  const auto key = kv.substr(0, eq);
  const auto value = kv.substr(eq + 1);
  auto parsed = nlohmann::json::parse(value, nullptr, false);
  nlohmann::json* target = &options;
  std::string leaf = key;
  // Dotted keys address nested objects, e.g. qaoa.depth=1.
  for (std::size_t dot; (dot = leaf.find('.')) != std::string::npos;) {
    target = &(*target)[leaf.substr(0, dot)];
    leaf = leaf.substr(dot + 1);
  }
  (*target)[leaf] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
}

struct SolveArgs {
  std::string input;
  std::string solver = "dqof";
  std::string label;
  std::string config;
  std::vector<std::string> settings;
  std::string experiment = "solve";
  std::optional<double> reference;
  std::size_t reference_cap = 20;
  std::optional<double> time_limit;
};

int do_solve(const SolveArgs& a, const Common& c, std::ostream& out) {
  const auto problem = load_hubo(a.input);
  SolverSpec spec;
  spec.name = a.solver;
  spec.label = a.label.empty() ? a.solver : a.label;
  if (!a.config.empty()) spec.options = read_json(a.config);
  if (!spec.options.is_object()) throw ParseError("solver config must be a JSON object");
  for (const auto& s : a.settings) apply_setting(spec.options, s);

  SolveContext ctx;
  ctx.seed = c.seed;
  ctx.workers = c.workers;
  ctx.stable = c.stable;
  ctx.output_dir = c.out;
  ctx.stem = fs::path(a.input).stem().string() + "_" + spec.label;
  ctx.time_limit_seconds = a.time_limit;
  auto outcome = run_solver(spec, problem, ctx);

  auto row = make_row(a.experiment, outcome, problem.size(), problem.fingerprint(), c.seed, c.stable);
  if (a.reference) {
    row.reference_energy = a.reference;
    row.reference_source = "pinned";
  } else if (problem.size() <= a.reference_cap) {
    row.reference_energy = brute_force(problem, a.reference_cap).energy;
    row.reference_source = "brute";
  }
  if (row.reference_energy && row.energy) {
    const auto ar = approximation_ratio(*row.energy, *row.reference_energy);
    if (ar.comparable) row.approximation_ratio = ar.value;
    row.relative_accuracy = 1.0;
  } else if (row.energy) {
    row.relative_accuracy = 1.0;
  }
  outcome.report["experiment"] = a.experiment;
  outcome.report["reference_energy"] = row.reference_energy ? nlohmann::json(*row.reference_energy) : nlohmann::json();
  outcome.report["approximation_ratio"] =
      row.approximation_ratio ? nlohmann::json(*row.approximation_ratio) : nlohmann::json();

  const fs::path dir(c.out);
  write_file(dir / (ctx.stem + ".json"), outcome.report.dump(2) + "\n");
  append_row(dir / "results.csv", row);

  out << spec.label << ": N=" << problem.size() << " status=" << outcome.status;
  if (outcome.energy) out << " energy=" << format_double(*outcome.energy);
  if (row.reference_energy) out << " reference=" << format_double(*row.reference_energy);
  if (row.approximation_ratio) out << " ratio=" << format_double(*row.approximation_ratio);
  if (!outcome.x.empty()) out << " x=" << to_bitstring(outcome.x);
  out << '\n';
  return kOk;
}

struct GenerateArgs {
  std::size_t n = 0;
  std::vector<double> density{1.0, 1.0, 1.0};
  std::vector<std::string> law{"normal(0,1)"};
  std::string name;
};

int do_generate(const GenerateArgs& a, const Common& c, std::ostream& out) {
  if (a.density.size() != 3) throw ParseError("--density takes three values (linear, quadratic, cubic)");
  if (a.law.size() != 1 && a.law.size() != 3) throw ParseError("--law takes one or three laws");
  HuboGeneratorOptions opts;
  for (int t = 0; t < 3; ++t) {
    opts.density[t] = a.density[t];
    opts.law[t] = CoefficientLaw::parse(a.law.size() == 1 ? a.law[0] : a.law[t]);
  }
  const auto p = random_hubo(a.n, opts, c.seed);
  const auto name = a.name.empty() ? "hubo_N" + std::to_string(a.n) + "_s" + std::to_string(c.seed) + ".txt"
                                   : a.name;
  const fs::path path = fs::path(c.out) / name;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_hubo(path, p);
  out << path.string() << ": N=" << p.size() << " terms=" << p.term_count() << '\n';
  return kOk;
}

struct BenchArgs {
  std::string preset;
  std::string config;
};

int do_bench(const BenchArgs& a, const Common& c, std::ostream& out) {
  if (a.preset.empty() == a.config.empty()) throw ParseError("bench: give exactly one of a preset or --config");
  auto spec = a.config.empty() ? bench_preset(a.preset) : bench_spec_from_json(read_json(a.config));
  // --seed offsets the spec's seed base so sweeps can be repeated on fresh instances.
  if (c.seed != 0) spec.seed_base = derive_seed(spec.seed_base, {c.seed});
  const auto result = run_bench(spec, c.workers, c.stable, c.out);
  write_file(fs::path(c.out) / (spec.experiment + "_spec.json"), bench_spec_to_json(spec).dump(2) + "\n");
  if (!result.depth.empty()) {
    write_depth_csv(out, result.depth, spec.depth_sweep_n);
  } else {
    write_comparison_csv(out, result.table);
  }
  return kOk;
}

struct FmArgs {
  std::string data, model, name;
  FmFitOptions fit;
};

int do_fm_fit(const FmArgs& a, const Common& c, std::ostream& out) {
  std::ifstream in(a.data);
  if (!in) throw ParseError("cannot open " + a.data);
  const auto data = read_dataset_csv(in);
  auto opts = a.fit;
  opts.seed = c.seed;
  const auto res = fm_fit(data, opts);
  const fs::path dir(c.out);
  write_file(dir / (a.name.empty() ? "fm_model.json" : a.name), fm_to_json(res.model).dump(2) + "\n");
  nlohmann::json report = {{"solver", "fm-fit"},
                           {"rows", data.size()},
                           {"train_rows", res.train_rows},
                           {"validation_rows", res.validation_rows},
                           {"rank", opts.rank},
                           {"epochs", opts.epochs},
                           {"learning_rate", opts.learning_rate},
                           {"l2", opts.l2},
                           {"seed", c.seed},
                           {"best_epoch", res.best_epoch},
                           {"best_validation_rmse", res.best_validation_rmse},
                           {"history", res.history}};
  write_file(dir / "fm_fit.json", report.dump(2) + "\n");
  out << "fm fit: rows=" << data.size() << " best_epoch=" << res.best_epoch
      << " validation_rmse=" << format_double(res.best_validation_rmse) << '\n';
  return kOk;
}

int do_fm_extract(const FmArgs& a, const Common& c, std::ostream& out) {
  const auto fm = fm_from_json(read_json(a.model));
  const auto ex = fm_to_hubo(fm);
  const fs::path dir(c.out);
  const auto name = a.name.empty() ? fs::path(a.model).stem().string() + "_hubo.txt" : a.name;
  fs::create_directories(dir);
  save_hubo(dir / name, ex.hubo);
  write_file(dir / (fs::path(name).stem().string() + "_bias.json"),
             nlohmann::json{{"bias", ex.bias}, {"N", fm.size()}, {"rank", fm.rank()}}.dump(2) + "\n");
  out << (dir / name).string() << ": N=" << ex.hubo.size() << " terms=" << ex.hubo.term_count()
      << " bias=" << format_double(ex.bias) << '\n';
  return kOk;
}

int do_fm_verify(const FmArgs& a, const Common& c, std::ostream& out) {
  const auto fm = fm_from_json(read_json(a.model));
  const auto ex = fm_to_hubo(fm);
  const std::size_t n = fm.size();
  const bool exhaustive = n <= 16;
  const std::uint64_t count = exhaustive ? (std::uint64_t{1} << n) : 4096;
  Rng rng(c.seed);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < count; ++s) {
    Assignment x(n);
    if (exhaustive) {
      x = bits_from_index(s, n);
    } else {
      for (auto& b : x) b = rng.bit() ? 1 : 0;
    }
    const double p = fm_predict(fm, x);
    const double e = ex.bias + evaluate(ex.hubo, x);
    worst = std::max(worst, std::abs(p - e) / (1.0 + std::abs(p)));
  }
  const bool ok = worst <= 1e-9;
  out << "fm verify: " << (exhaustive ? "exhaustive " : "sampled ") << count
      << " assignments, max relative error " << format_double(worst) << (ok ? " PASS" : " FAIL") << '\n';
  return ok ? kOk : kCheckFailed;
}

int do_verify(const Common& c, std::ostream& out) {
  const auto results = run_invariant_suites(c.seed);
  bool ok = true;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << '\n';
    ok = ok && r.passed;
    report.push_back({{"check", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  write_file(fs::path(c.out) / "verify.json", nlohmann::json{{"seed", c.seed}, {"checks", report}}.dump(2) + "\n");
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed QAOA optimizer for higher-order binary problems"};
  app.require_subcommand(1);

  Common common;
  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random HUBO file");
  add_common(generate, common);
  generate->add_option("-N,--size", gen.n, "Number of variables")->required();
  generate->add_option("--density", gen.density, "Term densities for orders 1,2,3")->expected(3);
  generate->add_option("--law", gen.law, "Coefficient law, e.g. normal(0,1) or uniform(-1,1)")->expected(1, 3);
  generate->add_option("--name", gen.name, "File name inside --out (.json selects JSON)");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Run one solver on a HUBO file");
  add_common(solve, common);
  solve->add_option("input", sa.input, "HUBO file")->required()->check(CLI::ExistingFile);
  solve->add_option("--solver", sa.solver, "dqof | sa | sa-quadratized | brute | export-lp | consensus")
      ->capture_default_str();
  solve->add_option("--label", sa.label, "Solver name in outputs");
  solve->add_option("--config", sa.config, "JSON file with solver options")->check(CLI::ExistingFile);
  solve->add_option("-o,--option", sa.settings, "Solver option key=value (repeatable)");
  solve->add_option("--experiment", sa.experiment, "Experiment id for the result row")->capture_default_str();
  solve->add_option("--reference", sa.reference, "Pinned reference energy");
  solve->add_option("--reference-cap", sa.reference_cap, "Largest N given a brute-force reference")
      ->capture_default_str();
  solve->add_option("--time-limit", sa.time_limit, "Wall-clock limit in seconds (annealers)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  add_common(bench, common);
  bench->add_option("preset", ba.preset, "fig1b | fig3 | fig1d");
  bench->add_option("--config", ba.config, "JSON bench spec")->check(CLI::ExistingFile);

  FmArgs fa;
  auto* fm = app.add_subcommand("fm", "Factorization-machine surrogates");
  fm->require_subcommand(1);
  auto* fit = fm->add_subcommand("fit", "Fit a model to a CSV dataset");
  add_common(fit, common);
  fit->add_option("data", fa.data, "CSV: bit columns then target")->required()->check(CLI::ExistingFile);
  fit->add_option("--rank", fa.fit.rank)->capture_default_str();
  fit->add_option("--epochs", fa.fit.epochs)->capture_default_str();
  fit->add_option("--lr", fa.fit.learning_rate)->capture_default_str();
  fit->add_option("--l2", fa.fit.l2)->capture_default_str();
  fit->add_option("--init-scale", fa.fit.init_scale)->capture_default_str();
  fit->add_option("--name", fa.name, "Model file name inside --out");
  auto* extract = fm->add_subcommand("extract", "Write the HUBO encoded by a model");
  add_common(extract, common);
  extract->add_option("model", fa.model)->required()->check(CLI::ExistingFile);
  extract->add_option("--name", fa.name, "HUBO file name inside --out");
  auto* fmverify = fm->add_subcommand("verify", "Check prediction against the extracted HUBO");
  add_common(fmverify, common);
  fmverify->add_option("model", fa.model)->required()->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  add_common(verify, common);

  if (args.size() > 1 && !args[1].empty() && args[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args[1];
    if (!known) {
      err << "error: unknown subcommand '" << args[1] << "'\n";
      return kUsage;
    }
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return do_generate(gen, common, out);
    if (*solve) return do_solve(sa, common, out);
    if (*bench) return do_bench(ba, common, out);
    if (*fit) return do_fm_fit(fa, common, out);
    if (*extract) return do_fm_extract(fa, common, out);
    if (*fmverify) return do_fm_verify(fa, common, out);
    if (*verify) return do_verify(common, out);
  } catch (const CapExceeded& e) {
    err << "error: size cap exceeded: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const ParseError& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: invalid argument: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  err << "error: no subcommand\n";
  return kUsage;
}

}  // namespace dqof::cli
