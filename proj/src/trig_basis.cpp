#include "shrinkreg/trig_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double trig_value(int j, double t) {
  if (j < 1) throw ValidationError("trig_value: index must be >= 1, got " + std::to_string(j));
  if (j == 1) return 1.0;
  const double arg = kTwoPi * static_cast<double>(j / 2) * t;
  return std::numbers::sqrt2 * ((j % 2 == 0) ? std::cos(arg) : std::sin(arg));
}

TrigTable::TrigTable(int p) : p_(p), scaled_cos_(p), scaled_sin_(p) {
  if (p < 1) throw ValidationError("TrigTable: p must be >= 1");
  for (int q = 0; q < p; ++q) {
    const double arg = kTwoPi * static_cast<double>(q) / static_cast<double>(p);
    scaled_cos_[q] = std::numbers::sqrt2 * std::cos(arg);
    scaled_sin_[q] = std::numbers::sqrt2 * std::sin(arg);
  }
}

double grid_inner_product(int i, int j, const GridSpec& grid) {
  if (i < 1 || j < 1 || i > grid.p || j > grid.p)
    throw ValidationError("grid_inner_product: indices must lie in [1, p]");
  double sum = 0.0;
  for (int l = 1; l <= grid.p; ++l) {
    const double t = grid.time(l);
    sum += trig_value(i, t) * trig_value(j, t);
  }
  return sum / grid.p;
}

std::int64_t psi_cell(double t, const GridSpec& grid) {
  auto k = static_cast<std::int64_t>(std::ceil(t * grid.p));
  return std::clamp<std::int64_t>(k, 1, grid.N);
}

double psi_eval(int j, double t, const GridSpec& grid) {
  if (j < 1 || j > grid.p) throw ValidationError("psi_eval: index must lie in [1, p]");
  if (!(t > 0.0) || t > grid.n) throw ValidationError("psi_eval: t must lie in (0, n]");
  return trig_value(j, grid.time(psi_cell(t, grid)));
}

double dirichlet_excess(int d, int t_grid, int v_grid) {
  if (d < 1) throw ValidationError("dirichlet_excess: d must be >= 1");
  if (t_grid < 512 || v_grid < 512)
    throw ValidationError("dirichlet_excess: quadrature resolutions must be >= 512");

  // Pairing sin/cos at equal frequency gives 2cos(2πmv), so
  //   Φ_d(t,v) = 1 + 2Σ_{m≤N} cos(2πmv) − [d = 2N]·2 sin(2πNt)·sin(2πN(t−v)),
  // where N = [d/2] for odd d and the unpaired cosine at d = 2N is rewritten
  // through its missing sine partner.
  const int freq = d / 2;
  const bool unpaired = (d % 2 == 0);

  std::vector<double> sin_t;
  std::vector<double> cos_t;
  if (unpaired) {
    sin_t.resize(t_grid);
    cos_t.resize(t_grid);
    for (int i = 0; i < t_grid; ++i) {
      const double arg = kTwoPi * freq * static_cast<double>(i) / t_grid;
      sin_t[i] = std::sin(arg);
      cos_t[i] = std::cos(arg);
    }
  }

  double integral = 0.0;
  for (int k = 0; k < v_grid; ++k) {
    const double v = static_cast<double>(k) / v_grid;
    double kernel = 1.0;
    for (int m = 1; m <= freq; ++m) kernel += 2.0 * std::cos(kTwoPi * m * v);
    double peak;
    if (!unpaired) {
      peak = std::abs(kernel);
    } else {
      const double sv = std::sin(kTwoPi * freq * v);
      const double cv = std::cos(kTwoPi * freq * v);
      peak = 0.0;
      for (int i = 0; i < t_grid; ++i) {
        // sin(2πN(t−v)) = sin(2πNt)cos(2πNv) − cos(2πNt)sin(2πNv)
        const double shifted = sin_t[i] * cv - cos_t[i] * sv;
        peak = std::max(peak, std::abs(kernel - 2.0 * sin_t[i] * shifted));
      }
    }
    integral += peak;
  }
  integral /= v_grid;
  return integral - std::log(static_cast<double>(d));
}

}  // namespace shrinkreg
