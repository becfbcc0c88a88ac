#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shrinkreg/grid_signal.hpp"

namespace shrinkreg {

enum class JumpLaw { standard_normal, rademacher };

JumpLaw parse_jump_law(const std::string& name);
std::string to_string(JumpLaw law);

/// dξ = aξ dt + ρ₁ dw + ρ₂ dz with z a compound Poisson process of intensity
/// λ and centred unit-variance marks, plus the bounds of the noise family.
struct NoiseModel {
  double a = -1.0;
  double rho1 = 0.5;
  double rho2 = 0.5;
  double jump_intensity = 1.0;
  JumpLaw jump_law = JumpLaw::standard_normal;

  double a_max = 1.0;
  double rho_lower = 0.25;     ///< lower bound on ρ₁²
  double varsigma_star = 0.5;  ///< upper bound on σ_Q

  /// σ_Q = ρ₁² + ρ₂²·Π(x²), Π(x²) = λ·E[Y²].
  double sigma_q() const;
  /// Π(x²) of the jump measure.
  double levy_second_moment() const;
  void validate() const;
};

/// Stable seed for a (master seed, replication, stream) triple. Independent
/// of the worker that runs the replication.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication,
                          std::uint64_t stream_tag);

inline constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;  // "noise"

/// Exact-in-law cell recursion for the OU–Lévy noise:
///   ξ_l = e^{aΔ}ξ_{l−1} + G_l + ρ₂ Σ_{τ∈(t_{l−1},t_l]} Y_τ e^{a(t_l−τ)}.
/// Jump epochs come from exponential inter-arrival times.
class NoiseStepper {
 public:
  NoiseStepper(const NoiseModel& model, int p, std::uint64_t seed);

  /// Δξ over the next cell.
  double next();
  double level() const { return xi_; }

 private:
  double draw_mark();

  NoiseModel model_;
  double dt_;
  double decay_;
  double gauss_sd_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> waiting_;
  std::int64_t cell_ = 0;
  int p_;
  double next_jump_ = 0.0;
  double xi_ = 0.0;
};

/// (e^{2aΔ}−1)/(2a), continuous through a = 0.
double ou_variance_factor(double a, double dt);

/// Δξ_l, l = 1..N.
std::vector<double> simulate_noise_increments(const NoiseModel& model, const GridSpec& grid,
                                              std::uint64_t seed);

/// ∫_{t_{k−1}}^{t_k} S(t)dt for the p cells of one period, composite Simpson
/// with at least 8 panels per cell and 8000 per period.
std::vector<double> signal_cell_integrals(const SignalModel& signal, const GridSpec& grid);

struct ObservationPath {
  GridSpec grid;
  std::vector<double> increments;        ///< Δy_l = y_{t_l} − y_{t_{l−1}}
  std::vector<double> noise_increments;  ///< Δξ_l; empty when not retained
  std::uint64_t seed = 0;
};

ObservationPath simulate_observations(const SignalModel& signal, const NoiseModel& model,
                                      const GridSpec& grid, std::uint64_t seed,
                                      bool keep_noise = true);

}  // namespace shrinkreg
