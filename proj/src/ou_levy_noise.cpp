#include "shrinkreg/ou_levy_noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kSeriesThreshold = 1e-8;

}  // namespace

JumpLaw parse_jump_law(const std::string& name) {
  if (name == "standard_normal" || name == "normal") return JumpLaw::standard_normal;
  if (name == "rademacher") return JumpLaw::rademacher;
  throw ValidationError("unknown jump law '" + name + "'");
}

std::string to_string(JumpLaw law) {
  switch (law) {
    case JumpLaw::standard_normal:
      return "standard_normal";
    case JumpLaw::rademacher:
      return "rademacher";
  }
  return "unknown";
}

double NoiseModel::levy_second_moment() const {
  // Both supported mark laws have E[Y] = 0 and E[Y²] = 1.
  return jump_intensity;
}

double NoiseModel::sigma_q() const { return rho1 * rho1 + rho2 * rho2 * levy_second_moment(); }

void NoiseModel::validate() const {
  if (!(a_max > 0.0)) throw ValidationError("noise: a_max must be positive");
  if (a > 0.0 || a < -a_max) throw ValidationError("noise: a must lie in [-a_max, 0]");
  if (!(jump_intensity > 0.0)) throw ValidationError("noise: jump intensity must be positive");
  if (!(rho_lower > 0.0)) throw ValidationError("noise: rho_lower must be positive");
  if (!(varsigma_star > 0.0)) throw ValidationError("noise: varsigma_star must be positive");
  if (rho1 != 0.0 && rho1 * rho1 < rho_lower)
    throw ValidationError("noise: rho1^2 is below the family bound rho_lower");
  if (sigma_q() > varsigma_star * (1.0 + 1e-12))
    throw ValidationError("noise: sigma_Q exceeds the family bound varsigma_star");
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replication,
                          std::uint64_t stream_tag) {
  std::uint64_t h = splitmix64(stream_tag);
  h = splitmix64(h ^ replication);
  return splitmix64(h ^ master_seed);
}

double ou_variance_factor(double a, double dt) {
  const double x = a * dt;
  if (std::abs(x) < kSeriesThreshold) return dt * (1.0 + x);
  return std::expm1(2.0 * x) / (2.0 * a);
}

NoiseStepper::NoiseStepper(const NoiseModel& model, int p, std::uint64_t seed)
    : model_(model),
      dt_(1.0 / static_cast<double>(p)),
      decay_(std::exp(model.a / static_cast<double>(p))),
      gauss_sd_(std::abs(model.rho1) * std::sqrt(ou_variance_factor(model.a, 1.0 / p))),
      engine_(seed),
      waiting_(model.jump_intensity),
      p_(p) {
  next_jump_ = (model_.rho2 != 0.0) ? waiting_(engine_) : std::numeric_limits<double>::infinity();
}

double NoiseStepper::draw_mark() {
  if (model_.jump_law == JumpLaw::rademacher) return (engine_() & 1ULL) ? 1.0 : -1.0;
  return normal_(engine_);
}

double NoiseStepper::next() {
  ++cell_;
  const double t_end = static_cast<double>(cell_) / static_cast<double>(p_);
  double shock = (gauss_sd_ > 0.0) ? gauss_sd_ * normal_(engine_) : 0.0;
  while (next_jump_ <= t_end) {
    shock += model_.rho2 * draw_mark() * std::exp(model_.a * (t_end - next_jump_));
    next_jump_ += waiting_(engine_);
  }
  const double updated = decay_ * xi_ + shock;
  const double delta = updated - xi_;
  xi_ = updated;
  return delta;
}

std::vector<double> simulate_noise_increments(const NoiseModel& model, const GridSpec& grid,
                                              std::uint64_t seed) {
  model.validate();
  if (grid.N <= 0) throw ValidationError("simulate_noise_increments: empty grid");
  std::vector<double> out(static_cast<std::size_t>(grid.N));
  NoiseStepper stepper(model, grid.p, seed);
  for (auto& v : out) v = stepper.next();
  return out;
}

std::vector<double> signal_cell_integrals(const SignalModel& signal, const GridSpec& grid) {
  // At least 8 Simpson panels per cell and 8000 per period.
  const int kSub = 2 * std::max(4, (4000 + grid.p - 1) / grid.p);
  const std::int64_t fine = static_cast<std::int64_t>(kSub) * grid.p;
  std::vector<double> values(static_cast<std::size_t>(fine + 1));
  for (std::int64_t m = 0; m <= fine; ++m)
    values[m] = signal(static_cast<double>(m) / static_cast<double>(fine));

  std::vector<double> cells(static_cast<std::size_t>(grid.p));
  for (int k = 0; k < grid.p; ++k) {
    double acc = 0.0;
    for (int i = 0; i <= kSub; ++i) {
      const double w = (i == 0 || i == kSub) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * values[static_cast<std::size_t>(k) * kSub + i];
    }
    cells[k] = acc / (3.0 * static_cast<double>(fine));
  }
  return cells;
}

ObservationPath simulate_observations(const SignalModel& signal, const NoiseModel& model,
                                      const GridSpec& grid, std::uint64_t seed,
                                      bool keep_noise) {
  ObservationPath path;
  path.grid = grid;
  path.seed = seed;
  auto noise = simulate_noise_increments(model, grid, seed);
  const auto cells = signal_cell_integrals(signal, grid);
  path.increments.resize(noise.size());
  for (std::size_t l = 0; l < noise.size(); ++l)
    path.increments[l] = cells[l % static_cast<std::size_t>(grid.p)] + noise[l];
  if (keep_noise) path.noise_increments = std::move(noise);
  return path;
}

}  // namespace shrinkreg
