#include "shrinkreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/parallel.hpp"
#include "shrinkreg/trig_basis.hpp"

namespace shrinkreg {

namespace {

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// sqrt(Σ(x−m)² / (N(N−1))), 0 for a single replication.
double stderr_of(std::span<const double> xs, double mean) {
  const auto n = xs.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

int max_support(const WeightFamily& family) {
  int s = 0;
  for (const auto& w : family.members) s = std::max({s, w.support, w.d_gamma});
  return s;
}

int odd_at_least(double x) {
  auto v = static_cast<int>(std::ceil(x));
  if (v % 2 == 0) ++v;
  return v;
}

std::vector<double> values_on_grid(std::span<const double> coeffs, const TrigTable& table) {
  std::vector<double> out(static_cast<std::size_t>(table.p()), 0.0);
  for (int k = 1; k <= table.p(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      s += coeffs[j] * table(static_cast<int>(j) + 1, k);
    out[k - 1] = s;
  }
  return out;
}

void require_sigma_head(const GridSpec& grid) {
  if (!(grid.p > std::sqrt(static_cast<double>(grid.n))))
    throw ValidationError("experiment: the variance proxy requires p > sqrt(n)");
}

}  // namespace

Scale parse_scale(const std::string& name) {
  if (name == "desk") return Scale::desk;
  if (name == "paper") return Scale::paper;
  throw ValidationError("unknown scale '" + name + "' (expected desk or paper)");
}

std::string to_string(Scale scale) { return scale == Scale::paper ? "paper" : "desk"; }

ExperimentConfig ExperimentConfig::desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::paper() {
  ExperimentConfig cfg;
  cfg.n_values = {100, 200, 500, 1000};
  cfg.p = 10001;
  cfg.replications = 1000;
  return cfg;
}

double rho_for(const ExperimentConfig& cfg, int n) { return cfg.rho.value_or(default_rho(n)); }

PathSimulator::PathSimulator(const SignalModel& signal, const NoiseModel& noise,
                             const GridSpec& grid)
    : noise_(noise), grid_(grid), cells_(signal_cell_integrals(signal, grid)) {
  noise_.validate();
}

std::vector<double> PathSimulator::folded(std::uint64_t seed) const {
  const auto p = static_cast<std::size_t>(grid_.p);
  std::vector<double> out(cells_);
  for (auto& v : out) v *= grid_.n;
  NoiseStepper stepper(noise_, grid_.p, seed);
  for (int period = 0; period < grid_.n; ++period)
    for (std::size_t k = 0; k < p; ++k) out[k] += stepper.next();
  return out;
}

ReplicationCoeffs replicate(const PathSimulator& sim, std::uint64_t seed, int count) {
  const GridSpec& g = sim.grid();
  const auto folded = sim.folded(seed);
  const int head = proxy_variance_start(g.n) - 1;
  ReplicationCoeffs out;
  out.raw = coeffs_from_folded(folded, g, std::min(g.p, std::max(count, head)));
  out.sigma_hat = (g.p > head) ? proxy_variance_from_folded(folded, g, out.raw) : 0.0;
  return out;
}

GridTruth::GridTruth(const SignalModel& signal, const GridSpec& grid)
    : theta_(true_grid_coeffs(signal, grid).values) {
  tail_.assign(theta_.size() + 1, 0.0);
  for (std::size_t j = theta_.size(); j-- > 0;) tail_[j] = tail_[j + 1] + theta_[j] * theta_[j];
}

double GridTruth::loss(std::span<const double> estimate) const {
  if (estimate.size() > theta_.size())
    throw ValidationError("loss: estimate longer than the grid");
  double s = 0.0;
  for (std::size_t j = 0; j < estimate.size(); ++j) {
    const double e = estimate[j] - theta_[j];
    s += e * e;
  }
  return s + tail_[estimate.size()];
}

RiskEstimate summarize_losses(std::span<const double> losses) {
  RiskEstimate r;
  r.replications = static_cast<int>(losses.size());
  r.risk = mean_of(losses);
  r.stderr = stderr_of(losses, r.risk);
  return r;
}

RatioEstimate paired_ratio(std::span<const double> numerator,
                           std::span<const double> denominator) {
  if (numerator.size() != denominator.size() || numerator.empty())
    throw ValidationError("paired_ratio: samples must be paired and nonempty");
  const double a = mean_of(numerator);
  const double b = mean_of(denominator);
  RatioEstimate out;
  if (b == 0.0) {
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.stderr = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.ratio = a / b;
  std::vector<double> resid(numerator.size());
  for (std::size_t i = 0; i < resid.size(); ++i)
    resid[i] = numerator[i] - out.ratio * denominator[i];
  out.stderr = stderr_of(resid, 0.0) / std::abs(b);
  return out;
}

RiskEstimate paired_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("paired_difference: unpaired samples");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return summarize_losses(diff);
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::raw_selected:
      return "raw_selected";
    case EstimatorKind::shrunk_selected:
      return "shrunk_selected";
    case EstimatorKind::fixed_raw:
      return "fixed_raw";
    case EstimatorKind::fixed_shrunk:
      return "fixed_shrunk";
  }
  return "unknown";
}

RiskEstimate empirical_risk(const EstimatorSpec& spec, const RiskSetup& setup) {
  if (setup.signal == nullptr) throw ValidationError("empirical_risk: no signal");
  if (setup.replications < 1) throw ValidationError("empirical_risk: replications must be >= 1");
  const bool selected =
      spec.kind == EstimatorKind::raw_selected || spec.kind == EstimatorKind::shrunk_selected;
  if (selected && (setup.family == nullptr || setup.family->members.empty()))
    throw ValidationError("empirical_risk: selected estimators need a weight family");
  if (!selected && !spec.gamma)
    throw ValidationError("empirical_risk: fixed estimators need a weight vector");
  if (selected) require_sigma_head(setup.grid);

  const NoiseBounds bounds = NoiseBounds::from(setup.noise);
  const PathSimulator sim(*setup.signal, setup.noise, setup.grid);
  const GridTruth truth(*setup.signal, setup.grid);

  int count = 0;
  H2Constants fixed_consts;
  if (selected) {
    count = max_support(*setup.family);
  } else {
    if (spec.kind == EstimatorKind::fixed_shrunk)
      fixed_consts = member_constants(*spec.gamma, setup.grid.n, bounds);
    count = std::max(spec.gamma->support, fixed_consts.d);
  }

  std::vector<double> losses(static_cast<std::size_t>(setup.replications));
  parallel_for(losses.size(), setup.workers, [&](std::size_t l) {
    const auto rep = replicate(sim, derive_seed(setup.master_seed, l, kNoiseStream), count);
    std::vector<double> est;
    if (selected) {
      SelectionSettings s{setup.grid.n, rep.sigma_hat, setup.rho, bounds,
                          spec.kind == EstimatorKind::shrunk_selected};
      const auto idx = select_index(rep.raw, *setup.family, s);
      const auto& g = setup.family->members[idx];
      H2Constants consts;
      if (s.shrinkage) consts = member_constants(g, setup.grid.n, bounds);
      est = weighted_estimate(rep.raw, g, consts);
    } else {
      est = weighted_estimate(rep.raw, *spec.gamma, fixed_consts);
    }
    losses[l] = truth.loss(est);
  });
  return summarize_losses(losses);
}

int improvement_frequency(int n, int d, const NoiseModel& noise, double lipschitz_L,
                          std::optional<double> r_n) {
  const auto consts = h2_constants(d, n, noise, r_n.value_or(default_r_n(n)));
  const double p0 = p_zero(consts, lipschitz_L);
  return odd_at_least(std::max(2.0 * d + 1.0, 1.05 * p0));
}

ImprovementResult improvement_experiment(const SignalModel& signal, int n, int p, int d,
                                         const NoiseModel& noise, int replications,
                                         std::uint64_t master_seed, int workers,
                                         std::optional<double> r_n) {
  if (replications < 1) throw ValidationError("improve: replications must be >= 1");
  const GridSpec grid = make_grid(n, p);
  if (d < 1 || d > grid.p) throw ValidationError("improve: d must lie in [1, p]");
  ImprovementResult out;
  out.n = n;
  out.p = grid.p;
  out.d = d;
  out.replications = replications;
  out.consts = h2_constants(d, n, noise, r_n.value_or(default_r_n(n)));
  out.lipschitz_L = signal.lipschitz_L().value_or(0.0);
  if (out.consts.shrinkage_active()) {
    out.p0 = p_zero(out.consts, out.lipschitz_L);
    out.bound = -out.consts.c_n * out.consts.c_n +
                2.0 * std::sqrt(static_cast<double>(d)) * kPhiStar * out.lipschitz_L *
                    out.consts.c_n / grid.p;
  } else {
    out.p0 = std::numeric_limits<double>::infinity();
  }

  const PathSimulator sim(signal, noise, grid);
  const auto theta = true_grid_coeffs(signal, grid).values;
  const auto reps = static_cast<std::size_t>(replications);
  std::vector<double> raw_loss(reps), star_loss(reps), delta(reps);
  std::vector<int> degenerate(reps, 0), over(reps, 0);
  parallel_for(reps, workers, [&](std::size_t l) {
    const auto folded = sim.folded(derive_seed(master_seed, l, kNoiseStream));
    const auto raw = coeffs_from_folded(folded, grid, d);
    const auto star = shrink(raw, out.consts);
    double lr = 0.0, ls = 0.0;
    for (int j = 0; j < d; ++j) {
      const double er = raw.values[j] - theta[j];
      const double es = star.values[j] - theta[j];
      lr += er * er;
      ls += es * es;
    }
    raw_loss[l] = lr;
    star_loss[l] = ls;
    delta[l] = ls - lr;
    degenerate[l] = star.degenerate ? 1 : 0;
    over[l] = star.over_shrunk ? 1 : 0;
  });
  const auto summary = summarize_losses(delta);
  out.delta_hat = summary.risk;
  out.stderr = summary.stderr;
  out.risk_raw = mean_of(raw_loss);
  out.risk_shrunk = mean_of(star_loss);
  out.degenerate = std::accumulate(degenerate.begin(), degenerate.end(), 0);
  out.over_shrunk = std::accumulate(over.begin(), over.end(), 0);
  return out;
}

std::string to_string(TableMode mode) { return mode == TableMode::table1 ? "table1" : "table2"; }

RiskReport table_experiment(const ExperimentConfig& cfg, TableMode mode) {
  if (cfg.replications < 1) throw ValidationError("table: replications must be >= 1");
  if (cfg.signals.empty() || cfg.n_values.empty())
    throw ValidationError("table: need at least one signal and one n");
  const auto start = std::chrono::steady_clock::now();
  RiskReport report;
  report.mode = mode;
  const NoiseBounds bounds = NoiseBounds::from(cfg.noise);

  for (const auto& label : cfg.signals) {
    const SignalModel signal = signal_by_name(label, cfg.custom_coeffs, cfg.s2_truncation);
    for (int n : cfg.n_values) {
      const GridSpec grid = make_grid(n, cfg.p);
      require_sigma_head(grid);
      const WeightFamily family =
          build_family(n, grid.p, cfg.noise.varsigma_star, cfg.family_mode, cfg.family_overrides);
      const double rho = rho_for(cfg, n);
      const PathSimulator sim(signal, cfg.noise, grid);
      const GridTruth truth(signal, grid);
      const TrigTable table(grid.p);
      const int count = max_support(family);

      const auto reps = static_cast<std::size_t>(cfg.replications);
      std::vector<double> loss_star(reps), loss_hat(reps), sigma(reps), c_used(reps);
      std::vector<double> fig_hat, fig_star;
      parallel_for(reps, cfg.workers, [&](std::size_t l) {
        const auto rep = replicate(sim, derive_seed(cfg.master_seed, l, kNoiseStream), count);
        SelectionSettings raw_settings{n, rep.sigma_hat, rho, bounds, false};
        const auto& g_hat = family.members[select_index(rep.raw, family, raw_settings)];
        const auto hat = weighted_estimate(rep.raw, g_hat, H2Constants{});

        const WeightVector* g_star = &g_hat;
        if (mode == TableMode::table1) {
          SelectionSettings shrunk_settings = raw_settings;
          shrunk_settings.shrinkage = true;
          g_star = &family.members[select_index(rep.raw, family, shrunk_settings)];
        }
        const auto consts = member_constants(*g_star, n, bounds);
        const auto star = weighted_estimate(rep.raw, *g_star, consts);

        loss_hat[l] = truth.loss(hat);
        loss_star[l] = truth.loss(star);
        sigma[l] = rep.sigma_hat;
        c_used[l] = consts.c_n;
        if (l == 0) {
          fig_hat = values_on_grid(hat, table);
          fig_star = values_on_grid(star, table);
        }
      });

      const std::string star_name =
          mode == TableMode::table1 ? "shrunk_selected" : "shrunk_at_raw_selected";
      const auto r_star = summarize_losses(loss_star);
      const auto r_hat = summarize_losses(loss_hat);
      const auto ratio = paired_ratio(loss_hat, loss_star);

      RiskRow star_row{label, n, star_name, r_star.risk, r_star.stderr, ratio.ratio,
                       ratio.stderr, cfg.replications};
      RiskRow hat_row{label, n, "raw_selected", r_hat.risk, r_hat.stderr, std::nullopt,
                      std::nullopt, cfg.replications};
      report.rows.push_back(star_row);
      report.rows.push_back(hat_row);

      CellDiagnostics diag;
      diag.signal = label;
      diag.n = n;
      diag.p = grid.p;
      diag.family_size = static_cast<int>(family.members.size());
      diag.nu = family.nu;
      diag.nu_star = family.nu_star;
      diag.rho = rho;
      diag.mean_sigma_hat = mean_of(sigma);
      diag.shrinkage_active_fraction =
          static_cast<double>(std::count_if(c_used.begin(), c_used.end(),
                                            [](double c) { return c > 0.0; })) /
          static_cast<double>(reps);
      diag.mean_c_n = mean_of(c_used);
      diag.raw_minus_shrunk = paired_difference(loss_hat, loss_star);
      report.diagnostics.push_back(diag);

      FigureSeries fig;
      fig.signal = label;
      fig.n = n;
      fig.hat = std::move(fig_hat);
      fig.star = std::move(fig_star);
      for (int k = 1; k <= grid.p; ++k) {
        fig.t.push_back(grid.time(k));
        fig.truth.push_back(signal(grid.time(k)));
      }
      report.figures.push_back(std::move(fig));
    }
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<std::size_t> subsample_members(std::size_t family_size, int max_members) {
  if (max_members < 1) throw ValidationError("subsample: max_members must be >= 1");
  const std::size_t cap = static_cast<std::size_t>(max_members);
  const std::size_t step = family_size <= cap ? 1 : (family_size + cap - 1) / cap;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < family_size; i += step) out.push_back(i);
  return out;
}

OracleReport oracle_check(const SignalModel& signal, int n, int p, const NoiseModel& noise,
                          const WeightFamily& family, double rho, int replications,
                          std::uint64_t master_seed, int workers, int max_members) {
  if (replications < 1) throw ValidationError("oracle-check: replications must be >= 1");
  if (family.members.empty()) throw ValidationError("oracle-check: empty family");
  if (!(rho > 0.0 && rho < 0.5)) throw ValidationError("oracle-check: rho must lie in (0, 1/2)");
  const GridSpec grid = make_grid(n, p);
  require_sigma_head(grid);
  const NoiseBounds bounds = NoiseBounds::from(noise);
  const PathSimulator sim(signal, noise, grid);
  const GridTruth truth(signal, grid);
  const auto members = subsample_members(family.members.size(), max_members);
  std::vector<H2Constants> consts(members.size());
  for (std::size_t m = 0; m < members.size(); ++m)
    consts[m] = member_constants(family.members[members[m]], n, bounds);
  const int count = max_support(family);
  const double sigma_q = noise.sigma_q();

  const auto reps = static_cast<std::size_t>(replications);
  std::vector<double> loss_sel(reps), sigma_err(reps);
  std::vector<std::vector<double>> loss_member(members.size(), std::vector<double>(reps));
  parallel_for(reps, workers, [&](std::size_t l) {
    const auto rep = replicate(sim, derive_seed(master_seed, l, kNoiseStream), count);
    SelectionSettings s{n, rep.sigma_hat, rho, bounds, true};
    const auto& g = family.members[select_index(rep.raw, family, s)];
    loss_sel[l] = truth.loss(weighted_estimate(rep.raw, g, member_constants(g, n, bounds)));
    for (std::size_t m = 0; m < members.size(); ++m)
      loss_member[m][l] = truth.loss(weighted_estimate(rep.raw, family.members[members[m]], consts[m]));
    sigma_err[l] = std::abs(rep.sigma_hat - sigma_q);
  });

  OracleReport out;
  out.n = n;
  out.p = grid.p;
  out.replications = replications;
  out.rho = rho;
  out.constant = (1.0 + 5.0 * rho) / (1.0 - rho);
  out.selected = summarize_losses(loss_sel);
  out.members_evaluated = static_cast<int>(members.size());
  std::size_t best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < members.size(); ++m) {
    const double r = mean_of(loss_member[m]);
    if (r < best_risk) {
      best_risk = r;
      best = m;
    }
  }
  out.min_member_risk = best_risk;
  out.argmin_member = members[best];
  out.nu_star = family.nu_star;
  out.mean_abs_sigma_error = mean_of(sigma_err);
  out.remainder = (1.0 + out.nu_star * out.mean_abs_sigma_error) / (rho * n);
  std::vector<double> joint(reps);
  for (std::size_t l = 0; l < reps; ++l)
    joint[l] = loss_sel[l] - out.constant * loss_member[best][l];
  out.joint_stderr = summarize_losses(joint).stderr;
  out.slack = out.remainder + 3.0 * out.joint_stderr;
  out.ratio = out.selected.risk / best_risk;
  out.holds = out.selected.risk <= out.constant * best_risk + out.slack;
  return out;
}

std::vector<SigmaPoint> sigma_consistency(const SignalModel& signal,
                                          const std::vector<int>& n_values,
                                          const NoiseModel& noise, int replications,
                                          std::uint64_t master_seed, int workers) {
  if (replications < 1) throw ValidationError("sigma: replications must be >= 1");
  std::vector<SigmaPoint> out;
  const double sigma_q = noise.sigma_q();
  for (int n : n_values) {
    const GridSpec grid = make_grid(n, n);
    require_sigma_head(grid);
    const PathSimulator sim(signal, noise, grid);
    std::vector<double> est(static_cast<std::size_t>(replications));
    parallel_for(est.size(), workers, [&](std::size_t l) {
      est[l] = replicate(sim, derive_seed(master_seed, l, kNoiseStream), 0).sigma_hat;
    });
    std::vector<double> err(est.size());
    for (std::size_t l = 0; l < est.size(); ++l) err[l] = std::abs(est[l] - sigma_q);
    SigmaPoint pt;
    pt.n = n;
    pt.p = grid.p;
    pt.replications = replications;
    pt.mean_sigma_hat = mean_of(est);
    const auto e = summarize_losses(err);
    pt.mean_abs_error = e.risk;
    pt.stderr = e.stderr;
    out.push_back(pt);
  }
  return out;
}

AuditReport condition_audit(const ExperimentConfig& cfg) {
  AuditReport report;
  const NoiseBounds bounds = NoiseBounds::from(cfg.noise);
  const int d0 = d_zero(bounds.a_max);
  const int gate = std::max(7, d0);
  std::vector<int> ns = cfg.n_values;
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    const GridSpec grid = make_grid(n, cfg.p);
    const WeightFamily family =
        build_family(n, grid.p, cfg.noise.varsigma_star, cfg.family_mode, cfg.family_overrides);
    AuditEntry e;
    e.n = n;
    e.p = grid.p;
    e.kappa_star = 2.0 * cfg.noise.varsigma_star;
    e.nu = family.nu;
    e.family_size = static_cast<int>(family.members.size());
    e.nu_star = family.nu_star;
    e.d0 = d0;
    double c_max = 0.0;
    for (const auto& w : family.members) {
      const auto c = member_constants(w, n, bounds).c_n;
      c_max = std::max(c_max, c);
      if (w.d_gamma >= gate) ++e.members_clearing_gate;
      e.max_d_gamma = std::max(e.max_d_gamma, w.d_gamma);
      bool ok = static_cast<int>(w.gamma.size()) == grid.p && w.support <= grid.p &&
                w.d_gamma <= w.support;
      for (std::size_t j = 0; ok && j < w.gamma.size(); ++j) {
        const double g = w.gamma[j];
        const int idx = static_cast<int>(j) + 1;
        if (g < 0.0 || g > 1.0) ok = false;
        if (idx <= w.d_gamma && g != 1.0) ok = false;
        if (idx > w.support && g != 0.0) ok = false;
        if (j > 0 && g > w.gamma[j - 1]) ok = false;
      }
      e.family_invariants = e.family_invariants && ok;
    }
    e.c_star_n = n * c_max * c_max;
    const double n56 = std::pow(static_cast<double>(n), 5.0 / 6.0);
    e.p_over_n56 = grid.p / n56;
    e.p_at_most_n = grid.p <= n;
    e.condition_D = e.p_at_most_n && e.p_over_n56 > 1.0;
    e.nu_star_growth = e.nu_star / std::pow(static_cast<double>(n), 1.0 / 3.0 + 0.1);
    report.family_invariants = report.family_invariants && e.family_invariants;
    if (!report.entries.empty() && e.nu_star_growth > report.entries.back().nu_star_growth)
      report.growth_decreasing = false;
    report.entries.push_back(e);
  }
  return report;
}

VarianceCheck noise_variance_check(const NoiseModel& noise, int p, double t, int paths,
                                   std::uint64_t master_seed, int workers) {
  noise.validate();
  if (paths < 2) throw ValidationError("variance check: need at least two paths");
  const auto steps = static_cast<std::int64_t>(std::llround(t * p));
  if (steps < 1 || std::abs(static_cast<double>(steps) - t * p) > 1e-9)
    throw ValidationError("variance check: t must be a positive multiple of 1/p");
  std::vector<double> xi(static_cast<std::size_t>(paths));
  parallel_for(xi.size(), workers, [&](std::size_t l) {
    NoiseStepper stepper(noise, p, derive_seed(master_seed, l, kNoiseStream));
    for (std::int64_t s = 0; s < steps; ++s) stepper.next();
    xi[l] = stepper.level();
  });
  VarianceCheck out;
  out.t = t;
  out.paths = paths;
  const double a = noise.a;
  out.analytic = noise.sigma_q() * (a == 0.0 ? t : std::expm1(2.0 * a * t) / (2.0 * a));
  const auto m = summarize_losses(xi);
  out.sample_mean = m.risk;
  out.mean_stderr = m.stderr;
  std::vector<double> sq(xi.size());
  for (std::size_t l = 0; l < xi.size(); ++l) sq[l] = (xi[l] - m.risk) * (xi[l] - m.risk);
  const auto v = summarize_losses(sq);
  out.sample_variance = v.risk * paths / (paths - 1.0);
  out.variance_stderr = v.stderr;
  out.pass = std::abs(out.sample_variance - out.analytic) <= 4.0 * out.variance_stderr &&
             std::abs(out.sample_mean) <= 4.0 * out.mean_stderr;
  return out;
}

std::vector<CovarianceCheck> covariance_mc_check(const NoiseModel& noise, const GridSpec& grid,
                                                 const std::vector<std::pair<int, int>>& pairs,
                                                 int paths, std::uint64_t master_seed,
                                                 int workers) {
  noise.validate();
  if (paths < 2) throw ValidationError("covariance check: need at least two paths");
  std::vector<int> idx;
  for (const auto& [i, j] : pairs) {
    if (i < 1 || j < 1 || i > grid.p || j > grid.p)
      throw ValidationError("covariance check: basis index out of range");
    idx.push_back(i);
    idx.push_back(j);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  const auto slot = [&](int j) {
    return static_cast<std::size_t>(std::lower_bound(idx.begin(), idx.end(), j) - idx.begin());
  };
  const TrigTable table(grid.p);

  std::vector<std::vector<double>> integrals(static_cast<std::size_t>(paths),
                                             std::vector<double>(idx.size(), 0.0));
  parallel_for(integrals.size(), workers, [&](std::size_t l) {
    NoiseStepper stepper(noise, grid.p, derive_seed(master_seed, l, kNoiseStream));
    auto& row = integrals[l];
    for (std::int64_t k = 1; k <= grid.N; ++k) {
      const double dxi = stepper.next();
      for (std::size_t s = 0; s < idx.size(); ++s) row[s] += table(idx[s], k) * dxi;
    }
  });

  std::vector<CovarianceCheck> out;
  for (const auto& [i, j] : pairs) {
    const auto si = slot(i), sj = slot(j);
    std::vector<double> xi(integrals.size()), xj(integrals.size());
    for (std::size_t l = 0; l < integrals.size(); ++l) {
      xi[l] = integrals[l][si];
      xj[l] = integrals[l][sj];
    }
    const double mi = mean_of(xi), mj = mean_of(xj);
    std::vector<double> prod(xi.size());
    for (std::size_t l = 0; l < xi.size(); ++l) prod[l] = (xi[l] - mi) * (xj[l] - mj);
    const auto pr = summarize_losses(prod);
    CovarianceCheck c;
    c.i = i;
    c.j = j;
    c.a = noise.a;
    c.analytic = noise.sigma_q() * tau(CellFunction::psi(i, grid), CellFunction::psi(j, grid),
                                       noise.a, static_cast<double>(grid.n));
    c.sample = pr.risk * paths / (paths - 1.0);
    c.stderr = pr.stderr;
    c.pass = std::abs(c.sample - c.analytic) <= 4.0 * c.stderr;
    out.push_back(c);
  }
  return out;
}

GramCheck gram_check(int d, int n, int p, double a) {
  const GridSpec grid = make_grid(n, p);
  if (d < 1 || d > grid.p) throw ValidationError("gram check: d must lie in [1, p]");
  GramCheck out;
  out.d = d;
  out.n = n;
  out.p = grid.p;
  out.a = a;
  out.summary = summarize_gram(gram_gaussian(d, grid, a));
  out.trace_above_half = out.summary.trace > d / 2.0;
  out.lambda_max_at_most_3 = out.summary.lambda_max <= 3.0;
  return out;
}

DirichletCheck dirichlet_check(int d_max, int workers, int resolution) {
  if (d_max < 1) throw ValidationError("dirichlet check: d_max must be >= 1");
  DirichletCheck out;
  out.d_max = d_max;
  out.excess.assign(static_cast<std::size_t>(d_max), 0.0);
  parallel_for(out.excess.size(), workers, [&](std::size_t i) {
    out.excess[i] = dirichlet_excess(static_cast<int>(i) + 1, resolution, resolution);
  });
  const auto it = std::max_element(out.excess.begin(), out.excess.end());
  out.worst = *it;
  out.worst_d = static_cast<int>(it - out.excess.begin()) + 1;
  out.pass = out.worst <= 5.0;
  return out;
}

}  // namespace shrinkreg
