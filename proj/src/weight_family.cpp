#include "shrinkreg/weight_family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

double WeightVector::sum() const { return std::accumulate(gamma.begin(), gamma.end(), 0.0); }

double WeightVector::sum_sq() const {
  double s = 0.0;
  for (double g : gamma) s += g * g;
  return s;
}

FamilyMode parse_family_mode(const std::string& name) {
  if (name == "theory") return FamilyMode::theory;
  if (name == "simulation") return FamilyMode::simulation;
  throw ValidationError("unknown family mode '" + name + "' (expected theory, simulation)");
}

std::string to_string(FamilyMode mode) {
  return mode == FamilyMode::theory ? "theory" : "simulation";
}

double weight_omega(int beta, double r, int n, double varsigma_star) {
  const double b = beta;
  const double v_n = n / varsigma_star;
  // π^{2β} is formed in log space: β runs past 100 in simulation mode.
  const double log_base = std::log((b + 1.0) * (2.0 * b + 1.0) / b) -
                          2.0 * b * std::log(std::numbers::pi) + std::log(r * v_n);
  return std::exp(log_base / (2.0 * b + 1.0));
}

WeightVector make_weight_vector(int beta, double r, int n, int p, double varsigma_star) {
  if (beta < 1 || !(r > 0.0)) throw ValidationError("weight vector: need beta >= 1 and r > 0");
  WeightVector w;
  w.beta = beta;
  w.r = r;
  w.omega = weight_omega(beta, r, n, varsigma_star);
  w.j_star = w.omega / std::log(n + 1.0);
  w.gamma.assign(static_cast<std::size_t>(p), 0.0);
  const int last = static_cast<int>(std::min<double>(std::floor(w.omega), p));
  for (int j = 1; j <= last; ++j) {
    const double jd = j;
    w.gamma[j - 1] = (jd <= w.j_star) ? 1.0 : 1.0 - std::pow(jd / w.omega, beta);
  }
  w.d_gamma = std::min(std::max(static_cast<int>(std::floor(w.j_star)), 0), last);
  w.support = 0;
  for (int j = last; j >= 1; --j) {
    if (w.gamma[j - 1] != 0.0) {
      w.support = j;
      break;
    }
  }
  return w;
}

WeightFamily build_family(int n, int p, double varsigma_star, FamilyMode mode,
                          const FamilyOverrides& overrides) {
  if (n < 3 || p < 3) throw ValidationError("build_family: need n >= 3 and p >= 3");
  if (!(varsigma_star > 0.0)) throw ValidationError("build_family: varsigma_star must be positive");
  WeightFamily fam;
  fam.n = n;
  fam.p = p;
  fam.varsigma_star = varsigma_star;
  fam.mode = mode;

  const double log_n1 = std::log(n + 1.0);
  if (mode == FamilyMode::theory) {
    fam.epsilon = overrides.epsilon.value_or(1.0 / log_n1);
    fam.m = overrides.m.value_or(static_cast<int>(std::floor(1.0 / (fam.epsilon * fam.epsilon))));
    fam.k_star = overrides.k_star.value_or(
        static_cast<int>(std::floor(overrides.k0.value_or(0.0) + std::sqrt(log_n1))));
  } else {
    fam.epsilon = overrides.epsilon.value_or(1.0 / log_n1);
    fam.m = overrides.m.value_or(static_cast<int>(std::floor(log_n1 * log_n1)));
    fam.k_star =
        overrides.k_star.value_or(static_cast<int>(std::floor(100.0 + std::sqrt(log_n1))));
  }
  if (fam.k_star < 1 || fam.m < 1 || !(fam.epsilon > 0.0))
    throw ValidationError("build_family: empty parameter grid");
  fam.nu = fam.k_star * fam.m;

  std::set<std::vector<double>> seen;
  for (int beta = 1; beta <= fam.k_star; ++beta) {
    for (int i = 1; i <= fam.m; ++i) {
      auto w = make_weight_vector(beta, i * fam.epsilon, n, p, varsigma_star);
      // γ vanishes past `support`, so the prefix identifies the vector.
      std::vector<double> key(w.gamma.begin(), w.gamma.begin() + w.support);
      if (seen.insert(std::move(key)).second) fam.members.push_back(std::move(w));
    }
  }
  for (const auto& w : fam.members) fam.nu_star = std::max(fam.nu_star, w.sum());
  return fam;
}

WeightFamily singleton_family(WeightVector member, int n, double varsigma_star) {
  WeightFamily fam;
  fam.n = n;
  fam.p = static_cast<int>(member.gamma.size());
  fam.varsigma_star = varsigma_star;
  fam.k_star = 1;
  fam.m = 1;
  fam.nu = 1;
  fam.nu_star = member.sum();
  fam.members.push_back(std::move(member));
  return fam;
}

}  // namespace shrinkreg
