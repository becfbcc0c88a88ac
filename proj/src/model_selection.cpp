#include "shrinkreg/model_selection.hpp"

#include <cmath>
#include <limits>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {

constexpr double kTieTolerance = 1e-12;

// 1 − c_n/|θ̂|_d for the leading block, 1 when shrinkage is inactive or degenerate.
double shrink_factor(const CoeffSet& raw, const H2Constants& consts) {
  if (consts.c_n == 0.0 || consts.d == 0) return 1.0;
  double norm_sq = 0.0;
  for (int j = 0; j < consts.d; ++j) norm_sq += raw.values[j] * raw.values[j];
  if (norm_sq == 0.0) return 1.0;
  return 1.0 - consts.c_n / std::sqrt(norm_sq);
}

void check_sizes(const CoeffSet& raw, const WeightVector& gamma, const H2Constants& consts) {
  if (static_cast<int>(raw.values.size()) < std::max(gamma.support, consts.d))
    throw ValidationError("objective: coefficient vector shorter than the weight support");
}

}  // namespace

double penalty(const WeightVector& gamma, double sigma_hat, int n) {
  if (sigma_hat < 0.0) throw ValidationError("penalty: sigma_hat must be >= 0");
  return sigma_hat * gamma.sum_sq() / n;
}

double default_rho(int n) {
  const double base = 3.0 + std::log(static_cast<double>(n));
  return 1.0 / (base * base);
}

H2Constants member_constants(const WeightVector& gamma, int n, const NoiseBounds& bounds) {
  if (gamma.d_gamma < 1) {
    H2Constants none;
    none.a_check = a_check(bounds.a_max);
    none.d0 = d_zero(bounds.a_max);
    none.kappa_star = 2.0 * bounds.varsigma_star;
    none.r_n = gamma.r > 0.0 ? gamma.r : default_r_n(n);
    return none;
  }
  const double r_n = gamma.r > 0.0 ? gamma.r : default_r_n(n);
  return h2_constants(gamma.d_gamma, n, bounds.rho_lower, bounds.a_max, bounds.varsigma_star, r_n);
}

double objective_J(const CoeffSet& raw, const WeightVector& gamma, const H2Constants& consts,
                   double sigma_hat, double rho, int n) {
  if (!(rho > 0.0 && rho < 0.5)) throw ValidationError("objective: rho must lie in (0, 1/2)");
  check_sizes(raw, gamma, consts);
  const double factor = shrink_factor(raw, consts);
  const double noise_bias = sigma_hat / n;
  double quad = 0.0;
  double cross = 0.0;
  for (int j = 0; j < gamma.support; ++j) {
    const double g = gamma.gamma[j];
    const double hat = raw.values[j];
    const double star = (j < consts.d) ? factor * hat : hat;
    quad += g * g * star * star;
    cross += g * (star * hat - noise_bias);
  }
  return quad - 2.0 * cross + rho * penalty(gamma, sigma_hat, n);
}

std::size_t select_index(const CoeffSet& raw, const WeightFamily& family,
                         const SelectionSettings& settings) {
  if (family.members.empty()) throw ValidationError("select: empty weight family");
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& w = family.members[i];
    H2Constants consts;
    if (settings.shrinkage) consts = member_constants(w, settings.n, settings.bounds);
    const double value = objective_J(raw, w, consts, settings.sigma_hat, settings.rho, settings.n);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

SelectionResult select(const CoeffSet& raw, const WeightFamily& family,
                       const SelectionSettings& settings) {
  if (family.members.empty()) throw ValidationError("select: empty weight family");
  SelectionResult result;
  result.sigma_hat = settings.sigma_hat;
  result.rho = settings.rho;
  result.J_values.reserve(family.members.size());
  std::vector<H2Constants> consts(family.members.size());
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& w = family.members[i];
    if (settings.shrinkage) consts[i] = member_constants(w, settings.n, settings.bounds);
    const double value =
        objective_J(raw, w, consts[i], settings.sigma_hat, settings.rho, settings.n);
    result.J_values.push_back(value);
    if (value < best_value) {
      best_value = value;
      result.index = i;
    }
  }
  result.J_min = best_value;
  for (double v : result.J_values)
    if (v - best_value <= kTieTolerance) ++result.ties;
  result.gamma_star = family.members[result.index];
  result.consts_star = consts[result.index];
  if (result.consts_star.d > 0) {
    result.coeffs_star = shrink(raw, result.consts_star);
  } else {
    result.coeffs_star = raw;
    result.coeffs_star.role = CoeffRole::shrunk;
  }
  return result;
}

std::vector<double> weighted_estimate(const CoeffSet& raw, const WeightVector& gamma,
                                      const H2Constants& consts) {
  check_sizes(raw, gamma, consts);
  const double factor = shrink_factor(raw, consts);
  std::vector<double> out(static_cast<std::size_t>(gamma.support));
  for (int j = 0; j < gamma.support; ++j) {
    const double hat = raw.values[j];
    out[j] = gamma.gamma[j] * ((j < consts.d) ? factor * hat : hat);
  }
  return out;
}

}  // namespace shrinkreg
