#include "shrinkreg/stochastic_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/trig_basis.hpp"

namespace shrinkreg {

namespace {

// ∫₀ʷ e^{ax} dx and ∫₀ʷ e^{2ax} dx.
double exp_integral(double a, double w) { return a == 0.0 ? w : std::expm1(a * w) / a; }
double exp2_integral(double a, double w) {
  return a == 0.0 ? w : std::expm1(2.0 * a * w) / (2.0 * a);
}

// Walks the cells of f up to time t, tracking
//   U(s) = ∫₀ˢ e^{a(s−u)} f(u) du,   V(s) = ∫₀ˢ e^{a(s+u)} f(u) du,
// so that ε̌_s(f) = (a/2)(U(s) + V(s)). The visitor receives, per cell, the
// cell index, its covered width and ∫_cell ε̌_s(f) ds.
template <typename Visitor>
void walk_eps(const CellFunction& f, double a, double t, Visitor&& visit, double* u_end,
              double* v_end) {
  const GridSpec& grid = f.grid();
  const double width = grid.step();
  double u = 0.0;
  double v = 0.0;
  for (std::int64_t k = 1; k <= grid.N; ++k) {
    const double s0 = grid.time(k - 1);
    if (s0 >= t) break;
    const double w = std::min(width, t - s0);
    const double fk = f.values()[static_cast<std::size_t>(k - 1)];
    const double e1 = exp_integral(a, w);
    double cell_eps = 0.0;
    double boost = 0.0;
    if (a != 0.0) {
      boost = std::exp(2.0 * a * s0);
      const double e2 = exp2_integral(a, w);
      const double e1_minus_w = (std::expm1(a * w) - a * w) / a;
      cell_eps = 0.5 * a * (u + v) * e1 + 0.5 * fk * (e1_minus_w + boost * (e2 - e1));
    }
    visit(k, w, cell_eps);
    const double decay = std::exp(a * w);
    u = decay * u + fk * e1;
    v = decay * v + fk * boost * decay * e1;
  }
  if (u_end) *u_end = u;
  if (v_end) *v_end = v;
}

void check_time(const CellFunction& f, double t) {
  if (t < 0.0 || t > f.grid().n * (1.0 + 1e-15))
    throw ValidationError("stochastic analytics: t must lie in [0, n]");
}

}  // namespace

CellFunction::CellFunction(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::int64_t>(values_.size()) != grid_.N)
    throw ValidationError("CellFunction: need one value per grid cell");
}

CellFunction CellFunction::constant(const GridSpec& grid, double c) {
  return CellFunction(grid, std::vector<double>(static_cast<std::size_t>(grid.N), c));
}

CellFunction CellFunction::psi(int j, const GridSpec& grid) {
  if (j < 1 || j > grid.p) throw ValidationError("CellFunction::psi: index must lie in [1, p]");
  const TrigTable table(grid.p);
  std::vector<double> values(static_cast<std::size_t>(grid.N));
  for (std::int64_t k = 1; k <= grid.N; ++k) values[k - 1] = table(j, k);
  return CellFunction(grid, std::move(values));
}

double CellFunction::operator()(double t) const {
  if (!(t > 0.0) || t > grid_.n) return 0.0;
  return values_[static_cast<std::size_t>(psi_cell(t, grid_) - 1)];
}

double eps_check(const CellFunction& f, double a, double t) {
  check_time(f, t);
  if (a > 0.0) throw ValidationError("eps_check: a must be <= 0");
  if (a == 0.0) return 0.0;
  double u = 0.0;
  double v = 0.0;
  walk_eps(f, a, t, [](std::int64_t, double, double) {}, &u, &v);
  return 0.5 * a * (u + v);
}

double tau(const CellFunction& f, const CellFunction& g, double a, double t) {
  check_time(f, t);
  if (f.grid().N != g.grid().N || f.grid().p != g.grid().p)
    throw ValidationError("tau: functions live on different grids");
  if (a > 0.0) throw ValidationError("tau: a must be <= 0");
  std::vector<double> eps_f;
  std::vector<double> widths;
  walk_eps(
      f, a, t,
      [&](std::int64_t, double w, double e) {
        eps_f.push_back(e);
        widths.push_back(w);
      },
      nullptr, nullptr);
  double total = 0.0;
  std::size_t k = 0;
  walk_eps(
      g, a, t,
      [&](std::int64_t, double w, double e_g) {
        const double fk = f.values()[k];
        const double gk = g.values()[k];
        total += fk * gk * w + eps_f[k] * gk + fk * e_g;
        ++k;
      },
      nullptr, nullptr);
  return total;
}

Eigen::MatrixXd gram_gaussian(int d, const GridSpec& grid, double a) {
  if (d < 1 || d > grid.p) throw ValidationError("gram_gaussian: need 1 <= d <= p");
  if (a > 0.0) throw ValidationError("gram_gaussian: a must be <= 0");
  const auto cells = static_cast<std::size_t>(grid.N);
  const double width = grid.step();
  const double horizon = grid.n;

  // Row j: ψ_j cell values; eps row j: ∫_cell ε̌(ψ_j).
  Eigen::MatrixXd psi(d, cells);
  Eigen::MatrixXd eps(d, cells);
  for (int j = 1; j <= d; ++j) {
    const auto f = CellFunction::psi(j, grid);
    for (std::size_t k = 0; k < cells; ++k) psi(j - 1, k) = f.values()[k];
    walk_eps(
        f, a, horizon, [&](std::int64_t k, double, double e) { eps(j - 1, k - 1) = e; },
        nullptr, nullptr);
  }
  Eigen::MatrixXd cross = psi * eps.transpose();  // (i,j): Σ_k ψ_i ∫ε̌(ψ_j)
  Eigen::MatrixXd gram = width * (psi * psi.transpose()) + cross + cross.transpose();
  gram /= horizon;
  return 0.5 * (gram + gram.transpose());
}

GramSummary summarize_gram(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  GramSummary s;
  s.trace = gram.trace();
  s.lambda_max = solver.eigenvalues().maxCoeff();
  s.lambda_min = solver.eigenvalues().minCoeff();
  return s;
}

double a_check(double a_max) {
  if (!(a_max > 0.0)) throw ValidationError("a_check: a_max must be positive");
  return -std::expm1(-a_max) / (4.0 * a_max);
}

int d_zero(double a_max) {
  const double ac = a_check(a_max);
  for (int d = 7;; ++d) {
    if (5.0 + std::log(static_cast<double>(d)) <= ac * d) return d;
  }
}

double default_r_n(int n) { return std::sqrt(std::log(static_cast<double>(n) + 1.0)); }

H2Constants h2_constants(int d, int n, double rho_lower, double a_max, double varsigma_star,
                         double r_n) {
  if (d < 1 || n < 1) throw ValidationError("h2_constants: need d >= 1 and n >= 1");
  if (!(r_n > 0.0)) throw ValidationError("h2_constants: r_n must be positive");
  H2Constants c;
  c.d = d;
  c.a_check = a_check(a_max);
  c.d0 = d_zero(a_max);
  c.kappa_star = 2.0 * varsigma_star;
  c.r_n = r_n;
  c.l_star = (d >= std::max(7, c.d0)) ? rho_lower * (d - 6) / 2.0 : 0.0;
  c.c_n = c.l_star / (n * (r_n + std::sqrt(d * c.kappa_star / n)));
  return c;
}

H2Constants h2_constants(int d, int n, const NoiseModel& model, double r_n) {
  return h2_constants(d, n, model.rho_lower, model.a_max, model.varsigma_star, r_n);
}

double p_zero(const H2Constants& consts, double lipschitz_L) {
  if (!(consts.c_n > 0.0)) throw ValidationError("p_zero: undefined for c_n = 0");
  return 2.0 * std::sqrt(static_cast<double>(consts.d)) * kPhiStar * lipschitz_L / consts.c_n;
}

double pinsker_constant(int k, double r) {
  if (k < 1 || !(r > 0.0)) throw ValidationError("pinsker_constant: need k >= 1 and r > 0");
  const double e = 2.0 * k + 1.0;
  return std::pow(e * r, 1.0 / e) *
         std::pow(k / (std::numbers::pi * (k + 1.0)), 2.0 * k / e);
}

}  // namespace shrinkreg
