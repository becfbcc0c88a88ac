#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shrinkreg/estimators.hpp"
#include "shrinkreg/grid_signal.hpp"
#include "shrinkreg/model_selection.hpp"
#include "shrinkreg/ou_levy_noise.hpp"
#include "shrinkreg/stochastic_analytics.hpp"
#include "shrinkreg/weight_family.hpp"

namespace shrinkreg {

enum class Scale { desk, paper };
Scale parse_scale(const std::string& name);
std::string to_string(Scale scale);

struct ExperimentConfig {
  std::vector<std::string> signals{"s1", "s2"};
  std::vector<double> custom_coeffs;
  int s2_truncation = kDefaultS2Truncation;
  std::vector<int> n_values{100, 200, 500};
  int p = 1001;
  int replications = 300;
  std::uint64_t master_seed = 20240601;
  NoiseModel noise;
  FamilyMode family_mode = FamilyMode::simulation;
  FamilyOverrides family_overrides;
  std::optional<double> rho;  ///< default (3 + ln n)^{-2}
  int workers = 0;

  // improve
  int improve_n = 100;
  int improve_d = 70;
  std::optional<int> improve_p;  ///< default: first odd p above 1.05·p₀ and 2d
  // oracle-check
  int oracle_n = 500;
  int oracle_max_members = 50;

  static ExperimentConfig desk();
  static ExperimentConfig paper();
};

double rho_for(const ExperimentConfig& cfg, int n);

/// Generates per-phase sums of Δy (see fold_increments) without storing
/// the N-point path. Signal cell integrals are computed once.
class PathSimulator {
 public:
  PathSimulator(const SignalModel& signal, const NoiseModel& noise, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::vector<double> folded(std::uint64_t seed) const;

 private:
  NoiseModel noise_;
  GridSpec grid_;
  std::vector<double> cells_;
};

/// Leading θ̂ block and σ̂ from one replication.
struct ReplicationCoeffs {
  CoeffSet raw;
  double sigma_hat = 0.0;
};

ReplicationCoeffs replicate(const PathSimulator& sim, std::uint64_t seed, int count);

/// Exact grid coefficients of the true signal, with tail energies, so the
/// grid-averaged loss (1/p)Σ_k (Ŝ(t_k) − S(t_k))² of any estimate supported
/// on the first J coefficients is Σ_{j≤J}(est_j − θ_j)² + Σ_{j>J} θ_j².
class GridTruth {
 public:
  GridTruth(const SignalModel& signal, const GridSpec& grid);

  const std::vector<double>& theta() const { return theta_; }
  double loss(std::span<const double> estimate) const;

 private:
  std::vector<double> theta_;
  std::vector<double> tail_;  ///< tail_[J] = Σ_{j>J} θ_j²
};

struct RiskEstimate {
  double risk = 0.0;
  double stderr = 0.0;
  int replications = 0;
};

RiskEstimate summarize_losses(std::span<const double> losses);

/// Ratio of means with a paired delta-method standard error.
struct RatioEstimate {
  double ratio = 0.0;
  double stderr = 0.0;
};
RatioEstimate paired_ratio(std::span<const double> numerator, std::span<const double> denominator);

/// Mean and standard error of (a_l − b_l).
RiskEstimate paired_difference(std::span<const double> a, std::span<const double> b);

enum class EstimatorKind { raw_selected, shrunk_selected, fixed_raw, fixed_shrunk };
std::string to_string(EstimatorKind kind);

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::shrunk_selected;
  std::optional<WeightVector> gamma;  ///< required for the fixed kinds
};

struct RiskSetup {
  const SignalModel* signal = nullptr;
  GridSpec grid;
  NoiseModel noise;
  const WeightFamily* family = nullptr;  ///< required for the selected kinds
  double rho = 0.0;
  int replications = 1;
  std::uint64_t master_seed = 0;
  int workers = 0;
};

/// (1/p)Σ_k mean_l (S*_{(l)}(t_k) − S(t_k))² with replication l seeded by
/// (master_seed, l).
RiskEstimate empirical_risk(const EstimatorSpec& spec, const RiskSetup& setup);

struct ImprovementResult {
  int n = 0;
  int p = 0;
  int d = 0;
  int replications = 0;
  H2Constants consts;
  double lipschitz_L = 0.0;
  double p0 = 0.0;
  double delta_hat = 0.0;  ///< mean of |θ*−θ|²_d − |θ̂−θ|²_d
  double stderr = 0.0;
  double bound = 0.0;  ///< −c_n² + 2√d φ* L c_n / p
  double risk_raw = 0.0;
  double risk_shrunk = 0.0;
  int degenerate = 0;
  int over_shrunk = 0;
};

ImprovementResult improvement_experiment(const SignalModel& signal, int n, int p, int d,
                                         const NoiseModel& noise, int replications,
                                         std::uint64_t master_seed, int workers,
                                         std::optional<double> r_n = std::nullopt);

/// Smallest odd p with p ≥ 2d+1 and p > 1.05·p₀ for the given constants.
int improvement_frequency(int n, int d, const NoiseModel& noise, double lipschitz_L,
                          std::optional<double> r_n = std::nullopt);

enum class TableMode { table1, table2 };
std::string to_string(TableMode mode);

struct RiskRow {
  std::string signal;
  int n = 0;
  std::string estimator;
  double risk = 0.0;
  double stderr = 0.0;
  std::optional<double> ratio;
  std::optional<double> ratio_stderr;
  int replications = 0;
};

struct CellDiagnostics {
  std::string signal;
  int n = 0;
  int p = 0;
  int family_size = 0;
  int nu = 0;
  double nu_star = 0.0;
  double rho = 0.0;
  double mean_sigma_hat = 0.0;
  double shrinkage_active_fraction = 0.0;  ///< replications whose estimator used c_n > 0
  double mean_c_n = 0.0;
  RiskEstimate raw_minus_shrunk;  ///< paired R(Ŝ) − R(S*)
};

struct FigureSeries {
  std::string signal;
  int n = 0;
  std::vector<double> t;
  std::vector<double> truth;
  std::vector<double> hat;
  std::vector<double> star;
};

struct RiskReport {
  TableMode mode = TableMode::table1;
  std::vector<RiskRow> rows;
  std::vector<CellDiagnostics> diagnostics;
  std::vector<FigureSeries> figures;
  double runtime_seconds = 0.0;
};

/// table1: S*_{γ*} (shrunk criterion) vs Ŝ_{γ̂} (criterion with c_n ≡ 0).
/// table2: S*_{γ̂} vs Ŝ_{γ̂}, both at the raw-selected weights.
RiskReport table_experiment(const ExperimentConfig& cfg, TableMode mode);

struct OracleReport {
  int n = 0;
  int p = 0;
  int replications = 0;
  double rho = 0.0;
  double constant = 0.0;  ///< (1+5ρ)/(1−ρ)
  RiskEstimate selected;
  double min_member_risk = 0.0;
  std::size_t argmin_member = 0;
  int members_evaluated = 0;
  double nu_star = 0.0;
  double mean_abs_sigma_error = 0.0;
  double remainder = 0.0;  ///< (1 + ν*·Ê|σ̂−σ_Q|)/(ρn)
  double joint_stderr = 0.0;
  double slack = 0.0;
  double ratio = 0.0;  ///< R(S*) / min_γ R(S*_γ)
  bool holds = false;
};

OracleReport oracle_check(const SignalModel& signal, int n, int p, const NoiseModel& noise,
                          const WeightFamily& family, double rho, int replications,
                          std::uint64_t master_seed, int workers, int max_members = 50);

/// Every k-th member, k = ceil(size / max_members).
std::vector<std::size_t> subsample_members(std::size_t family_size, int max_members);

struct SigmaPoint {
  int n = 0;
  int p = 0;
  int replications = 0;
  double mean_sigma_hat = 0.0;
  double mean_abs_error = 0.0;
  double stderr = 0.0;
};

/// σ̂ accuracy with p = n (reduced to odd).
std::vector<SigmaPoint> sigma_consistency(const SignalModel& signal,
                                          const std::vector<int>& n_values,
                                          const NoiseModel& noise, int replications,
                                          std::uint64_t master_seed, int workers);

struct AuditEntry {
  int n = 0;
  int p = 0;
  double kappa_star = 0.0;
  int nu = 0;
  int family_size = 0;
  double nu_star = 0.0;
  double c_star_n = 0.0;  ///< n·max_γ c_n(γ)²
  double p_over_n56 = 0.0;
  bool p_at_most_n = false;
  bool condition_D = false;  ///< p ≤ n and p > n^{5/6}
  int d0 = 0;
  int members_clearing_gate = 0;
  int max_d_gamma = 0;
  double nu_star_growth = 0.0;  ///< ν* / n^{1/3+0.1}
  bool family_invariants = true;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  bool family_invariants = true;
  bool growth_decreasing = true;
};

AuditReport condition_audit(const ExperimentConfig& cfg);

// Analytic-versus-simulation checks shared by `verify` and the acceptance suite.

struct VarianceCheck {
  double t = 0.0;
  int paths = 0;
  double analytic = 0.0;
  double sample_mean = 0.0;
  double mean_stderr = 0.0;
  double sample_variance = 0.0;
  double variance_stderr = 0.0;
  bool pass = false;  ///< both within 4 standard errors
};

/// Var ξ_t against σ_Q(e^{2at}−1)/(2a), and E ξ_t against 0.
VarianceCheck noise_variance_check(const NoiseModel& noise, int p, double t, int paths,
                                   std::uint64_t master_seed, int workers);

struct CovarianceCheck {
  int i = 0;
  int j = 0;
  double a = 0.0;
  double analytic = 0.0;  ///< σ_Q·τ_n(ψ_i, ψ_j)
  double sample = 0.0;
  double stderr = 0.0;
  bool pass = false;  ///< within 4 standard errors
};

std::vector<CovarianceCheck> covariance_mc_check(const NoiseModel& noise, const GridSpec& grid,
                                                 const std::vector<std::pair<int, int>>& pairs,
                                                 int paths, std::uint64_t master_seed,
                                                 int workers);

struct GramCheck {
  int d = 0;
  int n = 0;
  int p = 0;
  double a = 0.0;
  GramSummary summary;
  bool trace_above_half = false;
  bool lambda_max_at_most_3 = false;
};

GramCheck gram_check(int d, int n, int p, double a);

struct DirichletCheck {
  int d_max = 0;
  std::vector<double> excess;  ///< excess[d−1]
  double worst = 0.0;
  int worst_d = 0;
  bool pass = false;  ///< all ≤ 5
};

DirichletCheck dirichlet_check(int d_max, int workers, int resolution = kDirichletDefaultResolution);

}  // namespace shrinkreg
