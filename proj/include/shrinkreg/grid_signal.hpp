#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shrinkreg {

/// Observation lattice t_l = l/p, l = 0..N, over n periods of unit length.
///
/// The trigonometric basis is only orthonormal on the grid for odd p, so an
/// even request is reduced by one; `p_requested` keeps the original value
/// for reporting.
struct GridSpec {
  int n = 1;
  int p = 3;
  int p_requested = 3;
  std::int64_t N = 3;

  /// t_l, computed per index rather than accumulated.
  double time(std::int64_t l) const { return static_cast<double>(l) / static_cast<double>(p); }
  double step() const { return 1.0 / static_cast<double>(p); }
  bool reduced() const { return p != p_requested; }
};

GridSpec make_grid(int n, int p_requested);

/// A 1-periodic signal on [0,1) together with the analytic metadata that the
/// risk bounds consume.
class SignalModel {
 public:
  using Function = std::function<double(double)>;

  /// `on_period` and `derivative` are only ever called with t in [0,1).
  /// When `derivative` is given, the Lipschitz constant and ‖Ṡ‖² are
  /// estimated on a 10⁵-point grid.
  SignalModel(std::string label, Function on_period, Function derivative = {},
              int series_truncation = 1);

  double operator()(double t) const;
  double derivative(double t) const;
  bool has_derivative() const { return static_cast<bool>(derivative_); }

  const std::string& label() const { return label_; }
  std::optional<double> lipschitz_L() const { return lipschitz_L_; }
  std::optional<double> deriv_norm_sq() const { return deriv_norm_sq_; }
  int series_truncation() const { return series_truncation_; }

  /// Overrides the numerically estimated metadata (closed forms, if known).
  void set_lipschitz_L(double value) { lipschitz_L_ = value; }
  void set_deriv_norm_sq(double value) { deriv_norm_sq_ = value; }

 private:
  std::string label_;
  Function eval_;
  Function derivative_;
  int series_truncation_ = 1;
  std::optional<double> lipschitz_L_;
  std::optional<double> deriv_norm_sq_;
};

inline constexpr int kMetadataGridPoints = 100000;
inline constexpr int kDefaultS2Truncation = 1000;

/// t·sin(2πt) + t²(1−t)·cos(4πt)
SignalModel signal_s1();

/// Σ_{j=1}^{truncation} sin(2πjt)/(1+j³)
SignalModel signal_s2(int truncation = kDefaultS2Truncation);

/// Σ_j coeffs[j−1]·Trg_j(t): a finite trigonometric series.
SignalModel signal_custom_coeffs(std::vector<double> coeffs);

/// Resolves "s1", "s2" or "custom-coeffs" (the latter needs `coeffs`).
SignalModel signal_by_name(const std::string& name, const std::vector<double>& coeffs = {},
                           int s2_truncation = kDefaultS2Truncation);

}  // namespace shrinkreg
