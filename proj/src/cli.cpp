#include "shrinkreg/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/io.hpp"

#ifndef SHRINKREG_VERSION
#define SHRINKREG_VERSION "0.0.0"
#endif

namespace shrinkreg {

namespace {

constexpr std::array<const char*, 9> kCommands = {
    "simulate", "estimate", "select", "improve", "table1", "table2", "oracle-check", "verify",
    "audit"};

// Flag values for one subcommand; `set(opt)` tells explicit flags (or their
// environment variables) from defaults.
struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string scale = "desk";
  std::string out = "out";

  std::vector<std::string> signals;
  std::vector<double> coeffs;
  int s2_truncation = kDefaultS2Truncation;
  int n = 0;
  std::vector<int> n_values;
  int p = 0;
  int reps = 0;
  double a = 0, rho1 = 0, rho2 = 0, jump_intensity = 0, a_max = 0, rho_lower = 0, varsigma_star = 0;
  std::string jump_law;
  std::string family_mode;
  double rho = 0;
  double k0 = 0;
  int k_star = 0, m = 0;
  double epsilon = 0;

  std::string input;
  int d = 0;
  bool no_shrink = false;
  int max_members = 0;
  int d_max = 200;
  int paths = 20000;
  int resolution = kDirichletDefaultResolution;

  std::map<std::string, CLI::Option*> opts;

  bool set(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

template <class T>
void add(CLI::App* app, Flags& f, const std::string& name, T& target, const std::string& help) {
  auto* opt = app->add_option("--" + name, target, help);
  std::string env = "SHRINKREG_" + name;
  std::transform(env.begin(), env.end(), env.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  opt->envname(env);
  f.opts[name] = opt;
}

void add_common(CLI::App* app, Flags& f) {
  add(app, f, "config", f.config, "JSON experiment config");
  add(app, f, "seed", f.seed, "master seed");
  add(app, f, "workers", f.workers, "worker threads (0 = all cores)");
  add(app, f, "scale", f.scale, "desk or paper");
  add(app, f, "out", f.out, "output directory");
}

void add_model(CLI::App* app, Flags& f) {
  add(app, f, "signal", f.signals, "s1, s2 or custom-coeffs (repeatable)");
  add(app, f, "coeffs", f.coeffs, "Trg coefficients for custom-coeffs");
  add(app, f, "s2-truncation", f.s2_truncation, "series length of s2");
  add(app, f, "p", f.p, "observations per period (even values are reduced by one)");
  add(app, f, "a", f.a, "OU drift a <= 0");
  add(app, f, "rho1", f.rho1, "diffusion coefficient");
  add(app, f, "rho2", f.rho2, "jump coefficient");
  add(app, f, "jump-intensity", f.jump_intensity, "Poisson intensity");
  add(app, f, "jump-law", f.jump_law, "standard_normal or rademacher");
  add(app, f, "a-max", f.a_max, "bound on |a|");
  add(app, f, "rho-lower", f.rho_lower, "lower bound on rho1^2");
  add(app, f, "varsigma-star", f.varsigma_star, "upper bound on sigma_Q");
}

void add_family(CLI::App* app, Flags& f) {
  add(app, f, "family-mode", f.family_mode, "simulation or theory");
  add(app, f, "rho", f.rho, "selection penalty weight in (0, 1/2)");
  add(app, f, "k0", f.k0, "theory-mode offset for k*");
  add(app, f, "k-star", f.k_star, "number of beta values");
  add(app, f, "m", f.m, "number of r values");
  add(app, f, "epsilon", f.epsilon, "r spacing");
}

ExperimentConfig resolve_config(const Flags& f, std::ostream& err) {
  ExperimentConfig cfg;
  if (f.set("config")) merge_config(cfg, read_json(f.config));
  if (f.set("scale")) {
    const auto preset =
        parse_scale(f.scale) == Scale::paper ? ExperimentConfig::paper() : ExperimentConfig::desk();
    cfg.n_values = preset.n_values;
    cfg.p = preset.p;
    cfg.replications = preset.replications;
    if (parse_scale(f.scale) == Scale::paper)
      err << "warning: paper scale simulates about 1e9 path steps per table cell\n";
  }
  if (f.set("seed")) cfg.master_seed = f.seed;
  if (f.set("workers")) cfg.workers = f.workers;
  if (f.set("signal")) cfg.signals = f.signals;
  if (f.set("coeffs")) cfg.custom_coeffs = f.coeffs;
  if (f.set("s2-truncation")) cfg.s2_truncation = f.s2_truncation;
  if (f.set("n-values")) cfg.n_values = f.n_values;
  if (f.set("p")) cfg.p = f.p;
  if (f.set("reps")) cfg.replications = f.reps;
  if (f.set("a")) cfg.noise.a = f.a;
  if (f.set("rho1")) cfg.noise.rho1 = f.rho1;
  if (f.set("rho2")) cfg.noise.rho2 = f.rho2;
  if (f.set("jump-intensity")) cfg.noise.jump_intensity = f.jump_intensity;
  if (f.set("jump-law")) cfg.noise.jump_law = parse_jump_law(f.jump_law);
  if (f.set("a-max")) cfg.noise.a_max = f.a_max;
  if (f.set("rho-lower")) cfg.noise.rho_lower = f.rho_lower;
  if (f.set("varsigma-star")) cfg.noise.varsigma_star = f.varsigma_star;
  if (f.set("family-mode")) cfg.family_mode = parse_family_mode(f.family_mode);
  if (f.set("rho")) cfg.rho = f.rho;
  if (f.set("k0")) cfg.family_overrides.k0 = f.k0;
  if (f.set("k-star")) cfg.family_overrides.k_star = f.k_star;
  if (f.set("m")) cfg.family_overrides.m = f.m;
  if (f.set("epsilon")) cfg.family_overrides.epsilon = f.epsilon;
  if (f.set("max-members")) cfg.oracle_max_members = f.max_members;
  if (cfg.replications < 1) throw ValidationError("replications must be >= 1");
  cfg.noise.validate();
  for (const auto& s : cfg.signals) signal_by_name(s, cfg.custom_coeffs, cfg.s2_truncation);
  return cfg;
}

SignalModel first_signal(const ExperimentConfig& cfg) {
  if (cfg.signals.empty()) throw ValidationError("no signal given");
  return signal_by_name(cfg.signals.front(), cfg.custom_coeffs, cfg.s2_truncation);
}

// The single n of path-level commands: --n, else the first configured n.
int single_n(const Flags& f, const ExperimentConfig& cfg) {
  if (f.set("n")) return f.n;
  if (cfg.n_values.empty()) throw ValidationError("no n given");
  return cfg.n_values.front();
}

ObservationPath load_or_simulate(const Flags& f, const ExperimentConfig& cfg) {
  if (f.set("input")) {
    const fs::path in(f.input);
    return in.extension() == ".bin" ? read_path_binary(in) : read_path_csv(in);
  }
  const GridSpec grid = make_grid(single_n(f, cfg), cfg.p);
  return simulate_observations(first_signal(cfg), cfg.noise, grid,
                               derive_seed(cfg.master_seed, 0, kNoiseStream), false);
}

struct Run {
  fs::path dir;
  std::vector<fs::path> outputs;
  json summary;
  int code = kExitOk;

  fs::path file(const std::string& name) {
    outputs.push_back(dir / name);
    return outputs.back();
  }
};

void cmd_simulate(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const GridSpec grid = make_grid(single_n(f, cfg), cfg.p);
  const auto seed = derive_seed(cfg.master_seed, 0, kNoiseStream);
  const auto path = simulate_observations(first_signal(cfg), cfg.noise, grid, seed, false);
  write_path_csv(run.file("path.csv"), path);
  write_path_binary(run.file("path.bin"), path);
  out << "simulated n=" << grid.n << " p=" << grid.p << " N=" << grid.N << '\n';
}

void cmd_estimate(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const auto path = load_or_simulate(f, cfg);
  const GridSpec& g = path.grid;
  const auto folded = fold_increments(path.increments, g);
  const auto raw = coeffs_from_folded(folded, g, g.p);
  std::vector<CoeffSet> sets{raw};
  json summary = {{"n", g.n}, {"p", g.p}, {"energy", coefficient_energy(folded, g)}};
  if (g.p > std::sqrt(static_cast<double>(g.n)))
    summary["sigma_hat"] = proxy_variance_from_folded(folded, g, raw);
  if (f.set("d")) {
    const auto consts = h2_constants(f.d, g.n, cfg.noise, default_r_n(g.n));
    const auto star = shrink(raw, consts);
    sets.push_back(star);
    summary["constants"] = to_json(consts);
    summary["degenerate"] = star.degenerate;
    summary["over_shrunk"] = star.over_shrunk;
  }
  write_coeffs_csv(run.file("coeffs.csv"), sets);
  const std::vector<double> ones(static_cast<std::size_t>(g.p), 1.0);
  write_reconstruction_csv(run.file("reconstruction.csv"), reconstruct(sets.back(), ones, g));
  write_json(run.file("estimate.json"), summary);
  out << "estimated " << g.p << " coefficients\n";
}

void cmd_select(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const auto path = load_or_simulate(f, cfg);
  const GridSpec& g = path.grid;
  const auto folded = fold_increments(path.increments, g);
  const auto raw = coeffs_from_folded(folded, g, g.p);
  const double sigma_hat = proxy_variance_from_folded(folded, g, raw);
  const auto family =
      build_family(g.n, g.p, cfg.noise.varsigma_star, cfg.family_mode, cfg.family_overrides);
  const SelectionSettings settings{g.n, sigma_hat, rho_for(cfg, g.n), NoiseBounds::from(cfg.noise),
                                   !f.no_shrink};
  const auto result = select(raw, family, settings);
  write_family_csv(run.file("family.csv"), family);
  write_j_values_csv(run.file("j_values.csv"), result);
  auto est = raw;
  est.values = weighted_estimate(raw, result.gamma_star, result.consts_star);
  est.values.resize(static_cast<std::size_t>(g.p), 0.0);
  est.role = CoeffRole::shrunk;
  write_coeffs_csv(run.file("coeffs.csv"), {est});
  const std::vector<double> ones(static_cast<std::size_t>(g.p), 1.0);
  write_reconstruction_csv(run.file("reconstruction.csv"), reconstruct(est, ones, g));
  write_json(run.file("selection.json"),
             {{"n", g.n},
              {"p", g.p},
              {"index", result.index},
              {"beta", result.gamma_star.beta},
              {"r", result.gamma_star.r},
              {"d_gamma", result.gamma_star.d_gamma},
              {"support", result.gamma_star.support},
              {"J_min", result.J_min},
              {"ties", result.ties},
              {"sigma_hat", result.sigma_hat},
              {"rho", result.rho},
              {"shrinkage", settings.shrinkage},
              {"constants", to_json(result.consts_star)},
              {"family_size", family.members.size()},
              {"nu", family.nu},
              {"nu_star", family.nu_star}});
  out << "selected member " << result.index << " of " << family.members.size() << '\n';
}

void cmd_improve(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const auto signal = first_signal(cfg);
  const int n = f.set("n") ? f.n : cfg.improve_n;
  const int d = f.set("d") ? f.d : cfg.improve_d;
  int p = 0;
  if (f.set("p")) p = f.p;
  else if (cfg.improve_p) p = *cfg.improve_p;
  else p = improvement_frequency(n, d, cfg.noise, signal.lipschitz_L().value_or(0.0));
  const auto result = improvement_experiment(signal, n, p, d, cfg.noise, cfg.replications,
                                             cfg.master_seed, cfg.workers);
  write_json(run.file("improve.json"), to_json(result));
  out << "delta_hat=" << result.delta_hat << " stderr=" << result.stderr
      << " bound=" << result.bound << '\n';
}

void cmd_table(const ExperimentConfig& cfg, TableMode mode, Run& run, std::ostream& out) {
  const auto report = table_experiment(cfg, mode);
  write_risk_csv(run.file("risk_table.csv"), report);
  for (const auto& fig : report.figures)
    write_figure_csv(run.file("figure_" + fig.signal + "_n" + std::to_string(fig.n) + ".csv"), fig);
  write_json(run.file("report.json"), to_json(report));
  for (const auto& r : report.rows) {
    out << r.signal << " n=" << r.n << ' ' << r.estimator << " risk=" << r.risk;
    if (r.ratio) out << " ratio=" << *r.ratio;
    out << '\n';
  }
}

void cmd_oracle(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const auto signal = first_signal(cfg);
  const int n = f.set("n") ? f.n : cfg.oracle_n;
  const GridSpec grid = make_grid(n, cfg.p);
  const auto family =
      build_family(n, grid.p, cfg.noise.varsigma_star, cfg.family_mode, cfg.family_overrides);
  const auto report = oracle_check(signal, n, grid.p, cfg.noise, family, rho_for(cfg, n),
                                   cfg.replications, cfg.master_seed, cfg.workers,
                                   cfg.oracle_max_members);
  write_json(run.file("oracle.json"), to_json(report));
  out << "ratio=" << report.ratio << " constant=" << report.constant
      << " holds=" << (report.holds ? "yes" : "no") << '\n';
}

void cmd_verify(const Flags& f, const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  bool ok = true;
  json report;
  report["constants"] = {{"a_check", a_check(cfg.noise.a_max)},
                         {"d0", d_zero(cfg.noise.a_max)},
                         {"kappa_star", 2.0 * cfg.noise.varsigma_star},
                         {"sigma_q", cfg.noise.sigma_q()}};

  const auto dir = dirichlet_check(f.d_max, cfg.workers, f.resolution);
  report["dirichlet"] = to_json(dir);
  ok = ok && dir.pass;

  json grams = json::array();
  for (int d : {58, 100, 150}) {
    if (d > f.d_max) continue;
    const auto g = gram_check(d, 2, 2 * d + 1, -cfg.noise.a_max);
    grams.push_back(to_json(g));
    ok = ok && g.trace_above_half && g.lambda_max_at_most_3;
  }
  report["gram"] = grams;

  NoiseModel noise = cfg.noise;
  const auto var = noise_variance_check(noise, 100, 1.0, f.paths, cfg.master_seed, cfg.workers);
  report["noise_variance"] = to_json(var);
  ok = ok && var.pass;

  json covs = json::array();
  const std::vector<std::pair<int, int>> pairs{{1, 1}, {2, 2}, {2, 3}, {4, 7}};
  for (double a : {0.0, -1.0}) {
    noise.a = std::max(a, -noise.a_max);
    for (const auto& c :
         covariance_mc_check(noise, make_grid(2, 21), pairs, f.paths, cfg.master_seed, cfg.workers)) {
      covs.push_back(to_json(c));
      ok = ok && c.pass;
    }
  }
  report["covariance"] = covs;
  report["pass"] = ok;
  write_json(run.file("verify.json"), report);
  out << "verify: " << (ok ? "pass" : "FAIL") << '\n';
  if (!ok) run.code = kExitAssertion;
}

void cmd_audit(const ExperimentConfig& cfg, Run& run, std::ostream& out) {
  const auto report = condition_audit(cfg);
  write_json(run.file("audit.json"), to_json(report));
  for (const auto& e : report.entries)
    out << "n=" << e.n << " p=" << e.p << " family=" << e.family_size
        << " c*_n=" << e.c_star_n << " D=" << (e.condition_D ? "yes" : "no") << '\n';
  if (!report.family_invariants) {
    out << "audit: family invariants violated\n";
    run.code = kExitAssertion;
  }
}

}  // namespace

std::string usage_text() {
  std::string text = "usage: shrinkreg <command> [options]\n\ncommands:\n";
  for (const char* c : kCommands) text += std::string("  ") + c + '\n';
  text += "\nRun `shrinkreg <command> --help` for the options of a command.\n";
  return text;
}

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.size() < 2) {
    err << usage_text();
    return kExitUsage;
  }
  const std::string& command = args[1];
  if (command == "--help" || command == "-h") {
    out << usage_text();
    return kExitOk;
  }
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    err << "unknown command '" << command << "'\n" << usage_text();
    return kExitUsage;
  }

  CLI::App app{"shrinkreg " + command, command};
  Flags f;
  add_common(&app, f);
  if (command != "verify") add_model(&app, f);
  if (command == "simulate" || command == "estimate" || command == "select" ||
      command == "improve" || command == "oracle-check")
    add(&app, f, "n", f.n, "number of periods");
  if (command == "table1" || command == "table2" || command == "audit")
    add(&app, f, "n-values", f.n_values, "list of n");
  if (command != "simulate" && command != "estimate" && command != "verify")
    add(&app, f, "reps", f.reps, "Monte-Carlo replications");
  if (command == "estimate" || command == "select") add(&app, f, "input", f.input, "path file");
  if (command == "estimate" || command == "improve") add(&app, f, "d", f.d, "shrinkage dimension");
  if (command == "select" || command == "table1" || command == "table2" ||
      command == "oracle-check" || command == "audit")
    add_family(&app, f);
  if (command == "select") f.opts["no-shrink"] = app.add_flag("--no-shrink", f.no_shrink,
                                                             "select with c_n = 0");
  if (command == "oracle-check")
    add(&app, f, "max-members", f.max_members, "subsample size of the family");
  if (command == "verify") {
    add(&app, f, "d-max", f.d_max, "largest d for the Dirichlet bound");
    add(&app, f, "paths", f.paths, "Monte-Carlo paths");
    add(&app, f, "resolution", f.resolution, "grid size for the Dirichlet integral");
    add(&app, f, "a-max", f.a_max, "bound on |a|");
    add(&app, f, "varsigma-star", f.varsigma_star, "upper bound on sigma_Q");
  }

  std::vector<std::string> rest(args.begin() + 2, args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ExperimentConfig cfg = resolve_config(f, err);
    Run run;
    run.dir = f.out;
    fs::create_directories(run.dir);
    if (command == "simulate") cmd_simulate(f, cfg, run, out);
    else if (command == "estimate") cmd_estimate(f, cfg, run, out);
    else if (command == "select") cmd_select(f, cfg, run, out);
    else if (command == "improve") cmd_improve(f, cfg, run, out);
    else if (command == "table1") cmd_table(cfg, TableMode::table1, run, out);
    else if (command == "table2") cmd_table(cfg, TableMode::table2, run, out);
    else if (command == "oracle-check") cmd_oracle(f, cfg, run, out);
    else if (command == "verify") cmd_verify(f, cfg, run, out);
    else cmd_audit(cfg, run, out);

    RunManifest manifest;
    manifest.command = command;
    manifest.config = to_json(cfg);
    manifest.version = SHRINKREG_VERSION;
    manifest.started = started;
    manifest.finished = utc_now();
    manifest.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.outputs = run.outputs;
    write_manifest(run.dir, manifest);
    return run.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace shrinkreg
