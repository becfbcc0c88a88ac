#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/experiments.hpp"

using namespace shrinkreg;

namespace {

NoiseModel quiet() {
  NoiseModel m;
  m.rho1 = 0.0;
  m.rho2 = 0.0;
  return m;
}

WeightVector constant_weights(int p, int support, double value) {
  WeightVector w;
  w.gamma.assign(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < support; ++j) w.gamma[j] = value;
  w.support = support;
  w.d_gamma = value == 1.0 ? support : 0;
  return w;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_values = {100};
  cfg.p = 201;
  cfg.replications = 16;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST(Truth, LossMatchesDirectGridEvaluation) {
  const auto s = signal_s1();
  const auto g = make_grid(1, 41);
  const GridTruth truth(s, g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 0.1);
  const TrigTable table(41);
  for (int J : {0, 5, 41}) {
    std::vector<double> est(static_cast<std::size_t>(J));
    for (auto& e : est) e = z(rng);
    double direct = 0.0;
    for (int k = 1; k <= 41; ++k) {
      double v = 0.0;
      for (int j = 1; j <= J; ++j) v += est[j - 1] * table(j, k);
      direct += (v - s(g.time(k))) * (v - s(g.time(k))) / 41.0;
    }
    EXPECT_NEAR(truth.loss(est), direct, 1e-12);
  }
}

TEST(Summaries, MeanAndStandardError) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto r = summarize_losses(x);
  EXPECT_DOUBLE_EQ(r.risk, 2.5);
  EXPECT_NEAR(r.stderr, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(summarize_losses(std::vector<double>{3.0}).stderr, 0.0);
}

TEST(Summaries, IdenticalPairs) {
  const std::vector<double> x{0.2, 0.4, 0.1};
  const auto r = paired_ratio(x, x);
  EXPECT_EQ(r.ratio, 1.0);
  EXPECT_EQ(r.stderr, 0.0);
  EXPECT_EQ(paired_difference(x, x).risk, 0.0);
}

TEST(Risk, ZeroEstimatorGivesSignalEnergy) {
  const auto s = signal_s1();
  RiskSetup setup;
  setup.signal = &s;
  setup.grid = make_grid(10, 101);
  setup.replications = 3;
  EstimatorSpec spec{EstimatorKind::fixed_raw, constant_weights(101, 0, 0.0)};
  double energy = 0.0;
  for (int k = 1; k <= 101; ++k) energy += s(setup.grid.time(k)) * s(setup.grid.time(k)) / 101.0;
  const auto r = empirical_risk(spec, setup);
  EXPECT_NEAR(r.risk, energy, 1e-12);
  EXPECT_NEAR(r.stderr, 0.0, 1e-15);
}

TEST(Risk, NoiselessFullBasisIsBiasOnly) {
  const auto s = signal_s1();
  RiskSetup setup;
  setup.signal = &s;
  setup.grid = make_grid(5, 101);
  setup.noise = quiet();
  setup.replications = 2;
  EstimatorSpec spec{EstimatorKind::fixed_raw, constant_weights(101, 101, 1.0)};
  const double L = *s.lipschitz_L();
  const auto r = empirical_risk(spec, setup);
  EXPECT_LE(r.risk, kPhiStar * kPhiStar * L * L / 101.0);
  EXPECT_GT(r.risk, 0.0);
}

TEST(Risk, ReproducibleAcrossWorkerCounts) {
  const auto s = signal_s2();
  const auto family = build_family(100, 201, 0.5, FamilyMode::simulation);
  RiskSetup setup;
  setup.signal = &s;
  setup.grid = make_grid(100, 201);
  setup.family = &family;
  setup.rho = default_rho(100);
  setup.replications = 12;
  setup.master_seed = 99;
  setup.workers = 1;
  const EstimatorSpec spec{EstimatorKind::shrunk_selected, std::nullopt};
  const auto a = empirical_risk(spec, setup);
  setup.workers = 4;
  const auto b = empirical_risk(spec, setup);
  EXPECT_EQ(a.risk, b.risk);
  EXPECT_EQ(a.stderr, b.stderr);
}

TEST(Risk, FixedKindsNeedWeights) {
  const auto s = signal_s1();
  RiskSetup setup;
  setup.signal = &s;
  setup.grid = make_grid(10, 21);
  EXPECT_THROW(empirical_risk({EstimatorKind::fixed_raw, std::nullopt}, setup), ValidationError);
  EXPECT_THROW(empirical_risk({EstimatorKind::raw_selected, std::nullopt}, setup), ValidationError);
}

TEST(Improvement, GatedDimensionGivesZero) {
  const auto r = improvement_experiment(signal_s1(), 100, 201, 20, NoiseModel{}, 20, 1, 1);
  EXPECT_FALSE(r.consts.shrinkage_active());
  EXPECT_EQ(r.delta_hat, 0.0);
  EXPECT_EQ(r.stderr, 0.0);
}

TEST(Improvement, BoundNegativeAboveThreshold) {
  const auto s = signal_s1();
  const int p = improvement_frequency(100, 70, NoiseModel{}, *s.lipschitz_L());
  const auto consts = h2_constants(70, 100, NoiseModel{}, default_r_n(100));
  EXPECT_GT(p, p_zero(consts, *s.lipschitz_L()));
  EXPECT_EQ(p % 2, 1);
  const auto r = improvement_experiment(s, 100, p, 70, NoiseModel{}, 20, 2, 0);
  EXPECT_LT(r.bound, 0.0);
  EXPECT_LE(r.delta_hat, r.bound + 3.0 * r.stderr);
}

TEST(Improvement, GrowsWithDimension) {
  const auto s = signal_s1();
  const auto d70 = improvement_experiment(s, 100, 301, 70, NoiseModel{}, 200, 3, 0);
  const auto d140 = improvement_experiment(s, 100, 301, 140, NoiseModel{}, 200, 3, 0);
  EXPECT_LT(d70.delta_hat, 0.0);
  EXPECT_LT(d140.delta_hat, d70.delta_hat);
}

TEST(Table, InactiveShrinkageGivesUnitRatio) {
  auto cfg = small_config();
  const auto report = table_experiment(cfg, TableMode::table2);
  ASSERT_EQ(report.rows.size(), 4u);
  for (const auto& d : report.diagnostics) ASSERT_EQ(d.shrinkage_active_fraction, 0.0);
  for (const auto& r : report.rows) {
    if (r.ratio) {
      EXPECT_EQ(*r.ratio, 1.0);
    }
  }
}

TEST(Table, RowsAndFigures) {
  auto cfg = small_config();
  cfg.signals = {"s1"};
  const auto report = table_experiment(cfg, TableMode::table1);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].estimator, "shrunk_selected");
  EXPECT_EQ(report.rows[1].estimator, "raw_selected");
  for (const auto& r : report.rows) {
    EXPECT_GE(r.risk, 0.0);
    EXPECT_EQ(r.replications, 16);
  }
  ASSERT_EQ(report.figures.size(), 1u);
  EXPECT_EQ(report.figures[0].t.size(), 201u);
  EXPECT_EQ(report.figures[0].hat.size(), 201u);
}

TEST(Table, WorkerCountDoesNotChangeNumbers) {
  auto cfg = small_config();
  const auto a = table_experiment(cfg, TableMode::table1);
  cfg.workers = 3;
  const auto b = table_experiment(cfg, TableMode::table1);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].risk, b.rows[i].risk);
    EXPECT_EQ(a.rows[i].stderr, b.rows[i].stderr);
  }
  EXPECT_EQ(a.figures[0].star, b.figures[0].star);
}

TEST(Oracle, SingleMemberFamily) {
  const auto w = make_weight_vector(2, 3.0, 100, 201, 0.5);
  const auto f = singleton_family(w, 100, 0.5);
  const auto r = oracle_check(signal_s1(), 100, 201, NoiseModel{}, f, 0.1, 10, 1, 1);
  EXPECT_EQ(r.ratio, 1.0);
  EXPECT_NEAR(r.constant, 1.5 / 0.9, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(Oracle, Subsampling) {
  EXPECT_EQ(subsample_members(10, 50).size(), 10u);
  const auto s = subsample_members(148, 50);
  EXPECT_LE(s.size(), 50u);
  EXPECT_EQ(s.front(), 0u);
  EXPECT_EQ(s[1], 3u);
}

TEST(Audit, ConstantsAndConditionD) {
  ExperimentConfig cfg;
  cfg.n_values = {1000};
  cfg.p = 10001;
  const auto a = condition_audit(cfg);
  ASSERT_EQ(a.entries.size(), 1u);
  const auto& e = a.entries[0];
  EXPECT_DOUBLE_EQ(e.kappa_star, 1.0);
  EXPECT_NEAR(e.p_over_n56, 31.6259, 1e-3);
  EXPECT_FALSE(e.p_at_most_n);
  EXPECT_EQ(e.d0, 58);
  EXPECT_EQ(e.members_clearing_gate, 0);
  EXPECT_EQ(e.c_star_n, 0.0);
  EXPECT_EQ(e.nu, 102 * 47);
  EXPECT_TRUE(a.family_invariants);
}

TEST(Audit, ConditionDHoldsWhenPBelowN) {
  ExperimentConfig cfg;
  cfg.n_values = {1000};
  cfg.p = 999;
  EXPECT_TRUE(condition_audit(cfg).entries[0].condition_D);
}

TEST(Sigma, SmallRun) {
  const auto pts = sigma_consistency(signal_s1(), {100}, NoiseModel{}, 20, 1, 1);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].p, 99);
  EXPECT_NEAR(pts[0].mean_sigma_hat, 0.5, 0.25);
}

TEST(Checks, GramAndDirichlet) {
  const auto g = gram_check(58, 2, 117, -1.0);
  EXPECT_TRUE(g.trace_above_half);
  EXPECT_TRUE(g.lambda_max_at_most_3);
  const auto d = dirichlet_check(12, 0, 1024);
  EXPECT_TRUE(d.pass);
  EXPECT_EQ(d.excess.size(), 12u);
}
