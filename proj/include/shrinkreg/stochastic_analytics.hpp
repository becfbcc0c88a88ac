#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shrinkreg/grid_signal.hpp"
#include "shrinkreg/ou_levy_noise.hpp"

namespace shrinkreg {

/// Left-continuous step function on [0, n]: value `values[k−1]` on the cell
/// (t_{k−1}, t_k], k = 1..N.
class CellFunction {
 public:
  CellFunction(GridSpec grid, std::vector<double> values);

  static CellFunction constant(const GridSpec& grid, double c);
  /// ψ_j on the whole horizon.
  static CellFunction psi(int j, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double t) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// ε̌_t(f) = a∫₀ᵗ e^{a(t−s)} f(s)(1+e^{2as})/2 ds, exact per cell.
double eps_check(const CellFunction& f, double a, double t);

/// τ_t(f,g) = ∫₀ᵗ (fg + ε̌_s(f)g + fε̌_s(g)) ds, so that E I_t(f)I_t(g) = σ_Q τ_t(f,g).
double tau(const CellFunction& f, const CellFunction& g, double a, double t);

/// (i,j) entry τ_n(ψ_i,ψ_j)/n: the covariance of the normalised stochastic
/// integrals under unit diffusion without jumps.
Eigen::MatrixXd gram_gaussian(int d, const GridSpec& grid, double a);

struct GramSummary {
  double trace = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
};

GramSummary summarize_gram(const Eigen::MatrixXd& gram);

/// ǎ = (1 − e^{−a_max})/(4 a_max).
double a_check(double a_max);
/// d₀ = min{d ≥ 7 : 5 + ln d ≤ ǎ d}.
int d_zero(double a_max);
/// √ln(n+1).
double default_r_n(int n);

struct H2Constants {
  int d = 0;
  int d0 = 0;
  double a_check = 0.0;
  double l_star = 0.0;
  double kappa_star = 0.0;
  double r_n = 0.0;
  double c_n = 0.0;

  bool shrinkage_active() const { return c_n > 0.0; }
};

/// Shrinkage constants for dimension d; l_* (and with it c_n) is zero when
/// d < max(7, d₀).
H2Constants h2_constants(int d, int n, double rho_lower, double a_max, double varsigma_star,
                         double r_n);
H2Constants h2_constants(int d, int n, const NoiseModel& model, double r_n);

/// 2√d·φ*·L/c_n; the frequency above which the improvement bound is negative.
double p_zero(const H2Constants& consts, double lipschitz_L);

/// ((2k+1)r)^{1/(2k+1)}·(k/(π(k+1)))^{2k/(2k+1)}.
double pinsker_constant(int k, double r);

}  // namespace shrinkreg
