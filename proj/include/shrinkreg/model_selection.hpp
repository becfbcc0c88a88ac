#pragma once

#include <cstddef>
#include <vector>

#include "shrinkreg/estimators.hpp"
#include "shrinkreg/ou_levy_noise.hpp"
#include "shrinkreg/stochastic_analytics.hpp"
#include "shrinkreg/weight_family.hpp"

namespace shrinkreg {

/// Noise-family bounds that set the per-γ shrinkage constants.
struct NoiseBounds {
  double rho_lower = 0.25;
  double a_max = 1.0;
  double varsigma_star = 0.5;

  static NoiseBounds from(const NoiseModel& model) {
    return {model.rho_lower, model.a_max, model.varsigma_star};
  }
};

/// σ̂·|γ|²/n. Passing σ_Q for σ̂ gives the known-variance penalty.
double penalty(const WeightVector& gamma, double sigma_hat, int n);

/// (3 + ln n)^{-2}.
double default_rho(int n);

/// c_n(γ): shrinkage dimension d(γ) and r_n = the γ's own r component.
H2Constants member_constants(const WeightVector& gamma, int n, const NoiseBounds& bounds);

/// J(γ) = Σ γ²θ*² − 2Σ γ(θ*θ̂ − σ̂/n) + ρ·σ̂|γ|²/n with θ* = shrink(θ̂, consts).
double objective_J(const CoeffSet& raw, const WeightVector& gamma, const H2Constants& consts,
                   double sigma_hat, double rho, int n);

struct SelectionSettings {
  int n = 0;
  double sigma_hat = 0.0;
  double rho = 0.0;
  NoiseBounds bounds;
  /// false: c_n ≡ 0 for every member (the plain weighted least-squares selector).
  bool shrinkage = true;
};

struct SelectionResult {
  std::size_t index = 0;  ///< position of γ* in the family
  WeightVector gamma_star;
  H2Constants consts_star;
  CoeffSet coeffs_star;
  std::vector<double> J_values;
  double J_min = 0.0;
  double sigma_hat = 0.0;
  double rho = 0.0;
  int ties = 0;  ///< members (γ* included) within 1e-12 of J_min
};

/// First minimiser of J over the family.
SelectionResult select(const CoeffSet& raw, const WeightFamily& family,
                       const SelectionSettings& settings);

/// Index-only variant for Monte-Carlo loops; skips storing J values.
std::size_t select_index(const CoeffSet& raw, const WeightFamily& family,
                         const SelectionSettings& settings);

/// γ·θ* for one member: the coefficients of S*_γ (or Ŝ_γ when c_n = 0),
/// truncated to the member's support.
std::vector<double> weighted_estimate(const CoeffSet& raw, const WeightVector& gamma,
                                      const H2Constants& consts);

}  // namespace shrinkreg
