#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "shrinkreg/grid_signal.hpp"

namespace shrinkreg {

/// Uniform bound on |Trg_j|.
inline constexpr double kPhiStar = std::numbers::sqrt2;

/// Trg_1 ≡ 1; Trg_j(t) = √2·cos(2π[j/2]t) for even j, √2·sin(2π[j/2]t) for odd j ≥ 3.
double trig_value(int j, double t);

/// Basis values at lattice points k/p via exact index arithmetic:
/// Trg_j(k/p) only depends on ([j/2]·k) mod p, so one period of cos/sin
/// samples serves every j and every period of the grid.
class TrigTable {
 public:
  explicit TrigTable(int p);

  int p() const { return p_; }

  /// Trg_j(k/p) for any integer k ≥ 0 and j ≥ 1.
  double operator()(int j, std::int64_t k) const {
    if (j == 1) return 1.0;
    const std::int64_t m = j / 2;
    const auto idx = static_cast<std::size_t>((m * (k % p_)) % p_);
    return (j % 2 == 0) ? scaled_cos_[idx] : scaled_sin_[idx];
  }

 private:
  int p_;
  std::vector<double> scaled_cos_;
  std::vector<double> scaled_sin_;
};

/// (Trg_i, Trg_j)_p = (1/p)·Σ_{l=1}^{p} Trg_i(t_l)Trg_j(t_l).
double grid_inner_product(int i, int j, const GridSpec& grid);

/// ψ_j(t) = Trg_j(t_k) for t in the cell (t_{k−1}, t_k], 0 < t ≤ n.
double psi_eval(int j, double t, const GridSpec& grid);

/// Cell index k with t ∈ (t_{k−1}, t_k]; assumes 0 < t ≤ n.
std::int64_t psi_cell(double t, const GridSpec& grid);

inline constexpr int kDirichletDefaultResolution = 4096;

/// ∫₀¹ max_t |Φ_d(t,v)| dv − ln d for Φ_d(t,v) = Σ_{j≤d} Trg_j(t)Trg_j(t−v),
/// with the max over t_i = i/t_grid and a left rectangle rule in v.
double dirichlet_excess(int d, int t_grid = kDirichletDefaultResolution,
                        int v_grid = kDirichletDefaultResolution);

}  // namespace shrinkreg
