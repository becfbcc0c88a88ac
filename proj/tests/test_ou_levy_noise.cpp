#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/experiments.hpp"
#include "shrinkreg/ou_levy_noise.hpp"

using namespace shrinkreg;

namespace {

NoiseModel quiet() {
  NoiseModel m;
  m.rho1 = 0.0;
  m.rho2 = 0.0;
  return m;
}

}  // namespace

TEST(Noise, DefaultProxyVariance) {
  NoiseModel m;
  EXPECT_DOUBLE_EQ(m.sigma_q(), 0.5);
  EXPECT_DOUBLE_EQ(m.levy_second_moment(), 1.0);
  EXPECT_NO_THROW(m.validate());
}

TEST(Noise, ValidationBounds) {
  NoiseModel m;
  m.a = 0.5;
  EXPECT_THROW(m.validate(), ValidationError);
  m.a = -2.0;
  EXPECT_THROW(m.validate(), ValidationError);
  m = NoiseModel{};
  m.rho1 = 0.4;  // ρ₁² = 0.16 < ϱ
  EXPECT_THROW(m.validate(), ValidationError);
  m = NoiseModel{};
  m.rho2 = 0.8;  // σ_Q = 0.89 > ς*
  EXPECT_THROW(m.validate(), ValidationError);
  EXPECT_THROW(parse_jump_law("cauchy"), ValidationError);
}

TEST(Noise, VarianceFactorContinuousAtZero) {
  EXPECT_DOUBLE_EQ(ou_variance_factor(0.0, 0.01), 0.01);
  EXPECT_NEAR(ou_variance_factor(-1e-9, 0.01), 0.01, 1e-12);
  EXPECT_NEAR(ou_variance_factor(-1.0, 0.5), (1.0 - std::exp(-1.0)) / 2.0, 1e-15);
}

TEST(Noise, ZeroSourcesGiveZeroPath) {
  const auto inc = simulate_noise_increments(quiet(), make_grid(3, 11), 42);
  for (double v : inc) EXPECT_EQ(v, 0.0);
}

TEST(Noise, NearZeroDriftMatchesZeroDrift) {
  NoiseModel m0;
  m0.a = 0.0;
  NoiseModel m1 = m0;
  m1.a = -1e-12;
  const auto g = make_grid(4, 21);
  const auto x = simulate_noise_increments(m0, g, 9);
  const auto y = simulate_noise_increments(m1, g, 9);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-8);
}

TEST(Noise, SameSeedSamePath) {
  const auto g = make_grid(3, 21);
  NoiseModel m;
  EXPECT_EQ(simulate_noise_increments(m, g, 17), simulate_noise_increments(m, g, 17));
  EXPECT_NE(simulate_noise_increments(m, g, 17), simulate_noise_increments(m, g, 18));
}

TEST(Noise, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t rep = 0; rep < 10000; ++rep) seen.insert(derive_seed(7, rep, kNoiseStream));
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_NE(derive_seed(7, 0, kNoiseStream), derive_seed(8, 0, kNoiseStream));
  EXPECT_NE(derive_seed(7, 0, kNoiseStream), derive_seed(7, 0, kNoiseStream + 1));
}

class NoiseVariance : public ::testing::TestWithParam<double> {};

TEST_P(NoiseVariance, MatchesClosedForm) {
  const auto check = noise_variance_check(NoiseModel{}, 20, GetParam(), 100000, 2024, 0);
  EXPECT_TRUE(check.pass) << "var " << check.sample_variance << " vs " << check.analytic
                          << " se " << check.variance_stderr << "; mean " << check.sample_mean;
}

INSTANTIATE_TEST_SUITE_P(Times, NoiseVariance, ::testing::Values(0.5, 1.0, 2.0));

TEST(Noise, RademacherMarksKeepVariance) {
  NoiseModel m;
  m.jump_law = JumpLaw::rademacher;
  const auto check = noise_variance_check(m, 20, 1.0, 50000, 77, 0);
  EXPECT_TRUE(check.pass);
}

TEST(Noise, PureDiffusionIncrementsAreGaussian) {
  NoiseModel m;
  m.rho2 = 0.0;
  m.a = 0.0;
  const auto g = make_grid(1000, 101);
  const auto x = simulate_noise_increments(m, g, 5);
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  const double kurtosis = m4 / (m2 * m2);
  EXPECT_NEAR(kurtosis, 3.0, 5.0 * std::sqrt(24.0 / n));
}

TEST(Noise, JumpsRaiseKurtosis) {
  NoiseModel m;
  m.rho1 = 0.5;
  m.rho2 = 0.5;
  m.a = 0.0;
  const auto x = simulate_noise_increments(m, make_grid(1000, 101), 5);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    m2 += v * v;
    m4 += v * v * v * v;
  }
  m2 /= x.size();
  m4 /= x.size();
  EXPECT_GT(m4 / (m2 * m2), 4.0);
}

TEST(Observations, ConstantSignalGivesExactCellIntegrals) {
  const auto s = signal_custom_coeffs({0.7});
  const auto g = make_grid(2, 7);
  const auto path = simulate_observations(s, quiet(), g, 1);
  for (double v : path.increments) EXPECT_NEAR(v, 0.7 / 7.0, 1e-14);
}

TEST(Observations, OnePeriodIntegratesS1) {
  const auto g = make_grid(1, 101);
  const auto path = simulate_observations(signal_s1(), quiet(), g, 1);
  double sum = 0.0;
  for (double v : path.increments) sum += v;
  // 10⁶-point midpoint rule.
  EXPECT_NEAR(sum, -0.16548751706976159, 1e-10);
}

TEST(Observations, IncrementsSplitIntoSignalAndNoise) {
  const auto g = make_grid(3, 11);
  const auto path = simulate_observations(signal_s1(), NoiseModel{}, g, 99);
  const auto cells = signal_cell_integrals(signal_s1(), g);
  ASSERT_EQ(path.noise_increments.size(), path.increments.size());
  for (std::size_t l = 0; l < path.increments.size(); ++l)
    EXPECT_EQ(path.increments[l], cells[l % 11] + path.noise_increments[l]);
  EXPECT_TRUE(simulate_observations(signal_s1(), NoiseModel{}, g, 99, false).noise_increments.empty());
}
