#include "shrinkreg/grid_signal.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <utility>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/trig_basis.hpp"

namespace shrinkreg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_unit(double t) {
  double u = t - std::floor(t);
  return u >= 1.0 ? 0.0 : u;
}

struct DerivativeStats {
  double max_abs = 0.0;
  double mean_sq = 0.0;
};

DerivativeStats derivative_stats(const SignalModel::Function& derivative) {
  DerivativeStats stats;
  const int m = kMetadataGridPoints;
  // Max over nodes and midpoints; ‖Ṡ‖² by the midpoint rule (Ṡ need not be periodic).
  for (int k = 0; k < m; ++k) {
    const double node = derivative(static_cast<double>(k) / m);
    const double mid = derivative((k + 0.5) / m);
    stats.max_abs = std::max({stats.max_abs, std::abs(node), std::abs(mid)});
    stats.mean_sq += mid * mid;
  }
  stats.mean_sq /= m;
  return stats;
}

}  // namespace

GridSpec make_grid(int n, int p_requested) {
  if (n < 1) throw ValidationError("grid: n must be >= 1, got " + std::to_string(n));
  if (p_requested < 2)
    throw ValidationError("grid: p must be >= 2, got " + std::to_string(p_requested));
  GridSpec g;
  g.n = n;
  g.p_requested = p_requested;
  g.p = (p_requested % 2 == 0) ? p_requested - 1 : p_requested;
  if (g.reduced()) {
    std::clog << "warning: even p=" << p_requested << " reduced to p=" << g.p
              << " (grid orthonormality needs odd p)\n";
  }
  g.N = static_cast<std::int64_t>(n) * g.p;
  return g;
}

SignalModel::SignalModel(std::string label, Function on_period, Function derivative,
                         int series_truncation)
    : label_(std::move(label)),
      eval_(std::move(on_period)),
      derivative_(std::move(derivative)),
      series_truncation_(series_truncation) {
  if (!eval_) throw ValidationError("signal '" + label_ + "': missing evaluator");
  if (series_truncation_ < 1) throw ValidationError("signal: truncation must be >= 1");
}

double SignalModel::operator()(double t) const { return eval_(wrap_unit(t)); }

double SignalModel::derivative(double t) const {
  if (!derivative_) throw ValidationError("signal '" + label_ + "' has no derivative");
  return derivative_(wrap_unit(t));
}

SignalModel signal_s1() {
  auto f = [](double t) {
    return t * std::sin(kTwoPi * t) + t * t * (1.0 - t) * std::cos(2.0 * kTwoPi * t);
  };
  auto df = [](double t) {
    return std::sin(kTwoPi * t) + kTwoPi * t * std::cos(kTwoPi * t) +
           (2.0 * t - 3.0 * t * t) * std::cos(2.0 * kTwoPi * t) -
           2.0 * kTwoPi * t * t * (1.0 - t) * std::sin(2.0 * kTwoPi * t);
  };
  SignalModel s("s1", f, df);
  const auto stats = derivative_stats(df);
  s.set_lipschitz_L(stats.max_abs);
  s.set_deriv_norm_sq(stats.mean_sq);
  return s;
}

SignalModel signal_s2(int truncation) {
  if (truncation < 1) throw ValidationError("s2: truncation must be >= 1");
  auto f = [truncation](double t) {
    double sum = 0.0;
    for (int j = 1; j <= truncation; ++j) {
      const double jd = j;
      sum += std::sin(kTwoPi * jd * t) / (1.0 + jd * jd * jd);
    }
    return sum;
  };
  auto df = [truncation](double t) {
    double sum = 0.0;
    for (int j = 1; j <= truncation; ++j) {
      const double jd = j;
      sum += kTwoPi * jd * std::cos(kTwoPi * jd * t) / (1.0 + jd * jd * jd);
    }
    return sum;
  };
  SignalModel s("s2", f, df, truncation);

  // Metadata on the k/M grid: cos(2πj·k/M) is a lookup at (j·k) mod M.
  const int m = kMetadataGridPoints;
  std::vector<double> cos_table(m);
  for (int q = 0; q < m; ++q) cos_table[q] = std::cos(kTwoPi * q / m);
  double max_abs = 0.0;
  double mean_sq = 0.0;
  for (int k = 0; k < m; ++k) {
    double v = 0.0;
    for (int j = 1; j <= truncation; ++j) {
      const double jd = j;
      const auto idx = static_cast<std::size_t>((static_cast<std::int64_t>(j) * k) % m);
      v += kTwoPi * jd * cos_table[idx] / (1.0 + jd * jd * jd);
    }
    max_abs = std::max(max_abs, std::abs(v));
    mean_sq += v * v;
  }
  s.set_lipschitz_L(max_abs);
  s.set_deriv_norm_sq(mean_sq / m);
  return s;
}

SignalModel signal_custom_coeffs(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ValidationError("custom-coeffs: coefficient list is empty");
  auto f = [coeffs](double t) {
    double sum = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      sum += coeffs[j] * trig_value(static_cast<int>(j) + 1, t);
    return sum;
  };
  auto df = [coeffs](double t) {
    double sum = 0.0;
    for (std::size_t idx = 1; idx < coeffs.size(); ++idx) {
      const int j = static_cast<int>(idx) + 1;
      const double omega = kTwoPi * (j / 2);
      const double arg = omega * t;
      const double d = (j % 2 == 0) ? -omega * std::sin(arg) : omega * std::cos(arg);
      sum += coeffs[idx] * std::numbers::sqrt2 * d;
    }
    return sum;
  };
  SignalModel s("custom-coeffs", f, df);
  const auto stats = derivative_stats(df);
  s.set_lipschitz_L(stats.max_abs);
  s.set_deriv_norm_sq(stats.mean_sq);
  return s;
}

SignalModel signal_by_name(const std::string& name, const std::vector<double>& coeffs,
                           int s2_truncation) {
  if (name == "s1") return signal_s1();
  if (name == "s2") return signal_s2(s2_truncation);
  if (name == "custom-coeffs") return signal_custom_coeffs(coeffs);
  throw ValidationError("unknown signal '" + name + "' (expected s1, s2, custom-coeffs)");
}

}  // namespace shrinkreg
