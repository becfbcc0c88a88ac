#include "shrinkreg/estimators.hpp"

#include <cmath>
#include <numbers>

#include "shrinkreg/errors.hpp"
#include "shrinkreg/trig_basis.hpp"

namespace shrinkreg {

std::string to_string(CoeffRole role) {
  switch (role) {
    case CoeffRole::raw:
      return "raw";
    case CoeffRole::shrunk:
      return "shrunk";
    case CoeffRole::true_projected:
      return "true_projected";
  }
  return "unknown";
}

std::vector<double> fold_increments(std::span<const double> increments, const GridSpec& grid) {
  if (static_cast<std::int64_t>(increments.size()) != grid.N)
    throw ValidationError("fold_increments: expected N = n*p increments");
  std::vector<double> folded(static_cast<std::size_t>(grid.p), 0.0);
  const auto p = static_cast<std::size_t>(grid.p);
  for (std::size_t l = 0; l < increments.size(); ++l) folded[l % p] += increments[l];
  return folded;
}

CoeffSet coeffs_from_folded(std::span<const double> folded, const GridSpec& grid, int count) {
  if (static_cast<int>(folded.size()) != grid.p)
    throw ValidationError("coeffs_from_folded: expected p folded sums");
  if (count < 0 || count > grid.p) throw ValidationError("coeffs_from_folded: count out of range");
  const TrigTable table(grid.p);
  CoeffSet out;
  out.role = CoeffRole::raw;
  out.values.assign(static_cast<std::size_t>(count), 0.0);
  const double inv_n = 1.0 / grid.n;
  for (int j = 1; j <= count; ++j) {
    double acc = 0.0;
    // folded[k−1] collects the increments ending at t_k, k = 1..p.
    for (int k = 1; k <= grid.p; ++k) acc += table(j, k) * folded[k - 1];
    out.values[j - 1] = acc * inv_n;
  }
  return out;
}

CoeffSet fourier_coeffs(const ObservationPath& path) {
  const auto folded = fold_increments(path.increments, path.grid);
  return coeffs_from_folded(folded, path.grid, path.grid.p);
}

CoeffSet shrink(const CoeffSet& raw, int d, double c_n) {
  if (raw.role != CoeffRole::raw) throw ValidationError("shrink: input must be raw coefficients");
  if (d < 0 || d > static_cast<int>(raw.values.size()))
    throw ValidationError("shrink: d exceeds the available coefficients");
  CoeffSet out = raw;
  out.role = CoeffRole::shrunk;
  out.d_used = d;
  out.c_n_used = c_n;
  if (c_n == 0.0 || d == 0) return out;
  double norm_sq = 0.0;
  for (int j = 0; j < d; ++j) norm_sq += raw.values[j] * raw.values[j];
  if (norm_sq == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double factor = 1.0 - c_n / std::sqrt(norm_sq);
  out.over_shrunk = factor < 0.0;
  for (int j = 0; j < d; ++j) out.values[j] = factor * raw.values[j];
  return out;
}

CoeffSet shrink(const CoeffSet& raw, const H2Constants& consts) {
  return shrink(raw, consts.d, consts.c_n);
}

double coefficient_energy(std::span<const double> folded, const GridSpec& grid) {
  double sum_sq = 0.0;
  for (double y : folded) sum_sq += y * y;
  const double n = grid.n;
  return static_cast<double>(grid.p) * sum_sq / (n * n);
}

int proxy_variance_start(int n) {
  return static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))) + 1;
}

double proxy_variance_from_folded(std::span<const double> folded, const GridSpec& grid,
                                  const CoeffSet& leading) {
  const int head = proxy_variance_start(grid.n) - 1;
  if (head >= grid.p) throw ValidationError("proxy_variance: requires p > sqrt(n)");
  if (static_cast<int>(leading.values.size()) < head)
    throw ValidationError("proxy_variance: not enough leading coefficients");
  double head_energy = 0.0;
  for (int j = 0; j < head; ++j) head_energy += leading.values[j] * leading.values[j];
  const double tail = coefficient_energy(folded, grid) - head_energy;
  return std::max(0.0, static_cast<double>(grid.n) / grid.p * tail);
}

double proxy_variance(const ObservationPath& path) {
  const GridSpec& g = path.grid;
  if (!(g.p > std::sqrt(static_cast<double>(g.n))))
    throw ValidationError("proxy_variance: requires p > sqrt(n)");
  const auto folded = fold_increments(path.increments, g);
  const auto lead = coeffs_from_folded(folded, g, proxy_variance_start(g.n) - 1);
  return proxy_variance_from_folded(folded, g, lead);
}

ReconstructedSignal::ReconstructedSignal(CoeffSet coeffs, std::vector<double> weights,
                                         GridSpec grid)
    : coeffs_(std::move(coeffs)), weights_(std::move(weights)), grid_(grid), table_(grid.p) {
  if (coeffs_.values.size() != weights_.size())
    throw ValidationError("reconstruct: weight and coefficient lengths differ");
  if (static_cast<int>(weights_.size()) > grid_.p)
    throw ValidationError("reconstruct: more coefficients than grid points");
  for (std::size_t j = 0; j < weights_.size(); ++j)
    if (weights_[j] != 0.0) active_ = static_cast<int>(j) + 1;
}

double ReconstructedSignal::at_grid(std::int64_t k) const {
  const std::int64_t phase = ((k % grid_.p) + grid_.p) % grid_.p;
  double sum = 0.0;
  for (int j = 1; j <= active_; ++j) {
    const double w = weights_[j - 1];
    if (w != 0.0) sum += w * coeffs_.values[j - 1] * table_(j, phase);
  }
  return sum;
}

double ReconstructedSignal::operator()(double t) const {
  const double u = t - std::floor(t);
  // Cell (t_{k−1}, t_k] of one period; u = 0 belongs to the last cell.
  auto k = static_cast<std::int64_t>(std::ceil(u * grid_.p));
  if (k == 0) k = grid_.p;
  return at_grid(k);
}

double ReconstructedSignal::norm_sq() const {
  double s = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const double v = weights_[j] * coeffs_.values[j];
    s += v * v;
  }
  return s;
}

ReconstructedSignal reconstruct(const CoeffSet& coeffs, const std::vector<double>& gamma,
                                const GridSpec& grid) {
  return ReconstructedSignal(coeffs, gamma, grid);
}

std::vector<double> evaluate_on_grid(const ReconstructedSignal& sig) {
  std::vector<double> out(static_cast<std::size_t>(sig.grid().p));
  for (int k = 1; k <= sig.grid().p; ++k) out[k - 1] = sig.at_grid(k);
  return out;
}

CoeffSet true_grid_coeffs(const SignalModel& signal, const GridSpec& grid) {
  const TrigTable table(grid.p);
  std::vector<double> samples(static_cast<std::size_t>(grid.p));
  for (int k = 1; k <= grid.p; ++k) samples[k - 1] = signal(grid.time(k));
  CoeffSet out;
  out.role = CoeffRole::true_projected;
  out.values.resize(static_cast<std::size_t>(grid.p));
  for (int j = 1; j <= grid.p; ++j) {
    double acc = 0.0;
    for (int k = 1; k <= grid.p; ++k) acc += table(j, k) * samples[k - 1];
    out.values[j - 1] = acc / grid.p;
  }
  return out;
}

std::vector<double> dictionary_projection(
    const ReconstructedSignal& sig, const std::vector<std::function<double(double)>>& dictionary) {
  const int m = kDictionaryQuadraturePoints;
  std::vector<double> s_values(m);
  for (int i = 0; i < m; ++i) s_values[i] = sig((i + 0.5) / m);
  std::vector<double> beta(dictionary.size(), 0.0);
  for (std::size_t j = 0; j < dictionary.size(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += dictionary[j]((i + 0.5) / m) * s_values[i];
    beta[j] = acc / m;
  }
  return beta;
}

std::vector<double> dictionary_projection_trig(const ReconstructedSignal& sig, int q) {
  if (q < 1) throw ValidationError("dictionary_projection_trig: q must be >= 1");
  const GridSpec& g = sig.grid();
  const auto values = evaluate_on_grid(sig);
  std::vector<double> beta(static_cast<std::size_t>(q), 0.0);
  for (int i = 1; i <= q; ++i) {
    const int m = i / 2;
    const double omega = 2.0 * std::numbers::pi * m;
    double acc = 0.0;
    for (int k = 1; k <= g.p; ++k) {
      double cell;
      if (i == 1) {
        cell = g.step();
      } else {
        const double lo = omega * g.time(k - 1);
        const double hi = omega * g.time(k);
        cell = (i % 2 == 0) ? (std::sin(hi) - std::sin(lo)) / omega
                            : (std::cos(lo) - std::cos(hi)) / omega;
        cell *= std::numbers::sqrt2;
      }
      acc += values[k - 1] * cell;
    }
    beta[i - 1] = acc;
  }
  return beta;
}

}  // namespace shrinkreg
