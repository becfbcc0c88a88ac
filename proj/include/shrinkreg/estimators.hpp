#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shrinkreg/grid_signal.hpp"
#include "shrinkreg/ou_levy_noise.hpp"
#include "shrinkreg/stochastic_analytics.hpp"
#include "shrinkreg/trig_basis.hpp"

namespace shrinkreg {

enum class CoeffRole { raw, shrunk, true_projected };

std::string to_string(CoeffRole role);

/// Basis coefficients. `values[j−1]` holds coefficient j; full sets have p
/// entries, Monte-Carlo code may keep only a leading block.
struct CoeffSet {
  std::vector<double> values;
  CoeffRole role = CoeffRole::raw;
  int d_used = 0;
  double c_n_used = 0.0;
  /// Shrinkage requested but |θ̂|_d = 0, so the input was returned as is.
  bool degenerate = false;
  /// 1 − c_n/|θ̂|_d < 0: the factor flips the sign of the leading block.
  bool over_shrunk = false;
};

/// Y_k = Σ_m Δy_{k+mp}: per-phase sums over the n periods (length p).
std::vector<double> fold_increments(std::span<const double> increments, const GridSpec& grid);

/// θ̂_j = (1/n)·Σ_l Trg_j(t_l)·Δy_l for j = 1..count, from folded sums.
CoeffSet coeffs_from_folded(std::span<const double> folded, const GridSpec& grid, int count);

/// θ̂_j for j = 1..p.
CoeffSet fourier_coeffs(const ObservationPath& path);

/// θ*_j = (1 − c_n/|θ̂|_d)·θ̂_j for j ≤ d, θ̂_j otherwise.
CoeffSet shrink(const CoeffSet& raw, int d, double c_n);
CoeffSet shrink(const CoeffSet& raw, const H2Constants& consts);

/// Energy Σ_{j=1}^{p} θ̂_j² = (p/n²)·Σ_k Y_k², by grid orthonormality.
double coefficient_energy(std::span<const double> folded, const GridSpec& grid);

/// First index of the σ̂ tail, [√n] + 1.
int proxy_variance_start(int n);

/// σ̂ = (n/p)·Σ_{j=[√n]+1}^{p} θ̂_j², the tail taken from the energy identity.
/// `leading` must hold at least [√n] coefficients.
double proxy_variance_from_folded(std::span<const double> folded, const GridSpec& grid,
                                  const CoeffSet& leading);

/// Requires p > √n.
double proxy_variance(const ObservationPath& path);

/// Σ_j γ(j)·coeff_j·ψ_j(t) on the grid of `grid`.
class ReconstructedSignal {
 public:
  ReconstructedSignal(CoeffSet coeffs, std::vector<double> weights, GridSpec grid);

  const CoeffSet& coeffs() const { return coeffs_; }
  const std::vector<double>& weights() const { return weights_; }
  const GridSpec& grid() const { return grid_; }

  /// Value at lattice point t_k (any integer k).
  double at_grid(std::int64_t k) const;
  /// Value at t, extended 1-periodically; ψ is constant on (t_{k−1}, t_k].
  double operator()(double t) const;
  /// Σ_j (γ(j)·coeff_j)².
  double norm_sq() const;

 private:
  CoeffSet coeffs_;
  std::vector<double> weights_;
  GridSpec grid_;
  TrigTable table_;
  int active_ = 0;
};

ReconstructedSignal reconstruct(const CoeffSet& coeffs, const std::vector<double>& gamma,
                                const GridSpec& grid);

/// Values at t_1..t_p.
std::vector<double> evaluate_on_grid(const ReconstructedSignal& sig);

/// θ_j = (S, Trg_j)_p for j = 1..p, the exact grid representation of S.
CoeffSet true_grid_coeffs(const SignalModel& signal, const GridSpec& grid);

inline constexpr int kDictionaryQuadraturePoints = 10000;

/// β*_j = (u_j, S*)_{L₂[0,1]} by midpoint quadrature on 10⁴ points.
std::vector<double> dictionary_projection(const ReconstructedSignal& sig,
                                          const std::vector<std::function<double(double)>>& dictionary);

/// β*_j = (Trg_j, S*)_{L₂[0,1]}, j = 1..q, integrated exactly cell by cell.
std::vector<double> dictionary_projection_trig(const ReconstructedSignal& sig, int q);

}  // namespace shrinkreg
