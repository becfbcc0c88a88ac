#pragma once

#include <optional>
#include <string>
#include <vector>

namespace shrinkreg {

/// One Pinsker-type weight sequence γ_α, α = (β, r).
struct WeightVector {
  std::vector<double> gamma;  ///< length p
  int beta = 0;
  double r = 0.0;
  double omega = 0.0;   ///< ω_α
  double j_star = 0.0;  ///< j_*(α) = ω_α / ln(n+1)
  int d_gamma = 0;      ///< number of leading exact ones
  int support = 0;      ///< γ(j) = 0 for j > support

  double sum() const;
  double sum_sq() const;
};

enum class FamilyMode { theory, simulation };

FamilyMode parse_family_mode(const std::string& name);
std::string to_string(FamilyMode mode);

/// Optional replacements for the grid parameters of each mode.
struct FamilyOverrides {
  std::optional<double> k0;       ///< theory mode: k* = k0 + √ln(n+1) (default k0 = 0)
  std::optional<int> k_star;      ///< number of β values
  std::optional<int> m;           ///< number of r values
  std::optional<double> epsilon;  ///< r spacing
};

struct WeightFamily {
  std::vector<WeightVector> members;  ///< distinct vectors, enumeration order (β, r) ascending
  int k_star = 0;
  int m = 0;
  double epsilon = 0.0;
  int nu = 0;          ///< |A_n| = k*·m, before deduplication
  double nu_star = 0;  ///< max_γ Σ_j γ(j)
  int n = 0;
  int p = 0;
  double varsigma_star = 0.0;
  FamilyMode mode = FamilyMode::simulation;
};

/// ω_α = ((β+1)(2β+1)/(π^{2β}β)·r·n/ς*)^{1/(2β+1)}.
double weight_omega(int beta, double r, int n, double varsigma_star);

WeightVector make_weight_vector(int beta, double r, int n, int p, double varsigma_star);

WeightFamily build_family(int n, int p, double varsigma_star, FamilyMode mode,
                          const FamilyOverrides& overrides = {});

/// Family with a single given member (for fixed-γ runs).
WeightFamily singleton_family(WeightVector member, int n, double varsigma_star);

}  // namespace shrinkreg
