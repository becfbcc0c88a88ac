#include "shrinkreg/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "shrinkreg/errors.hpp"

namespace shrinkreg {

namespace {

constexpr char kPathMagic[8] = {'S', 'R', 'G', 'P', 'A', 'T', 'H', '1'};

std::ofstream open_out(const fs::path& file, std::ios::openmode mode = std::ios::out) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, mode | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const fs::path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  if (!in) throw ValidationError("cannot read " + file.string());
  return in;
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ValidationError("bad number '" + text + "'");
  return v;
}

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError("truncated binary path file");
  return value;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// NaN is not representable in JSON.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json risk_json(const RiskEstimate& r) {
  return {{"risk", number(r.risk)}, {"stderr", number(r.stderr)}, {"replications", r.replications}};
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw ValidationError("format_double failed");
  return std::string(buf.data(), ptr);
}

void write_path_csv(const fs::path& file, const ObservationPath& path) {
  auto out = open_out(file);
  out << "l,t_l,dy_l\n";
  for (std::size_t i = 0; i < path.increments.size(); ++i) {
    const auto l = static_cast<std::int64_t>(i) + 1;
    out << l << ',' << format_double(path.grid.time(l)) << ','
        << format_double(path.increments[i]) << '\n';
  }
}

ObservationPath read_path_csv(const fs::path& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line) || line != "l,t_l,dy_l")
    throw ValidationError(file.string() + ": expected header l,t_l,dy_l");
  ObservationPath path;
  double t1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string l, t, dy;
    if (!std::getline(row, l, ',') || !std::getline(row, t, ',') || !std::getline(row, dy))
      throw ValidationError(file.string() + ": malformed row '" + line + "'");
    if (path.increments.empty()) t1 = parse_double(t);
    path.increments.push_back(parse_double(dy));
  }
  if (path.increments.empty() || !(t1 > 0.0)) throw ValidationError(file.string() + ": no rows");
  const auto p = static_cast<int>(std::llround(1.0 / t1));
  const auto N = static_cast<std::int64_t>(path.increments.size());
  if (p < 2 || N % p != 0) throw ValidationError(file.string() + ": rows do not form whole periods");
  path.grid = make_grid(static_cast<int>(N / p), p);
  if (path.grid.p != p) throw ValidationError(file.string() + ": even p in path file");
  return path;
}

void write_path_binary(const fs::path& file, const ObservationPath& path) {
  auto out = open_out(file, std::ios::binary);
  out.write(kPathMagic, sizeof(kPathMagic));
  put<std::int32_t>(out, path.grid.n);
  put<std::int32_t>(out, path.grid.p);
  put<std::uint64_t>(out, path.seed);
  put<std::int64_t>(out, static_cast<std::int64_t>(path.increments.size()));
  out.write(reinterpret_cast<const char*>(path.increments.data()),
            static_cast<std::streamsize>(path.increments.size() * sizeof(double)));
}

ObservationPath read_path_binary(const fs::path& file) {
  auto in = open_in(file, std::ios::binary);
  char magic[sizeof(kPathMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPathMagic, sizeof(magic)) != 0)
    throw ValidationError(file.string() + ": not a path file");
  ObservationPath path;
  const auto n = get<std::int32_t>(in);
  const auto p = get<std::int32_t>(in);
  path.seed = get<std::uint64_t>(in);
  const auto N = get<std::int64_t>(in);
  path.grid = make_grid(n, p);
  if (path.grid.p != p || N != path.grid.N) throw ValidationError(file.string() + ": bad header");
  path.increments.resize(static_cast<std::size_t>(N));
  in.read(reinterpret_cast<char*>(path.increments.data()),
          static_cast<std::streamsize>(N * sizeof(double)));
  if (!in) throw ValidationError(file.string() + ": truncated");
  return path;
}

void write_coeffs_csv(const fs::path& file, const std::vector<CoeffSet>& sets) {
  auto out = open_out(file);
  out << "j,value,role\n";
  for (const auto& set : sets)
    for (std::size_t j = 0; j < set.values.size(); ++j)
      out << j + 1 << ',' << format_double(set.values[j]) << ',' << to_string(set.role) << '\n';
}

void write_reconstruction_csv(const fs::path& file, const ReconstructedSignal& sig) {
  auto out = open_out(file);
  out << "t_l,value\n";
  const auto values = evaluate_on_grid(sig);
  for (int k = 1; k <= sig.grid().p; ++k)
    out << format_double(sig.grid().time(k)) << ',' << format_double(values[k - 1]) << '\n';
}

void write_family_csv(const fs::path& file, const WeightFamily& family) {
  auto out = open_out(file);
  out << "index,beta,r,omega,d_gamma,support,sum_gamma\n";
  for (std::size_t i = 0; i < family.members.size(); ++i) {
    const auto& w = family.members[i];
    out << i << ',' << w.beta << ',' << format_double(w.r) << ',' << format_double(w.omega) << ','
        << w.d_gamma << ',' << w.support << ',' << format_double(w.sum()) << '\n';
  }
}

void write_j_values_csv(const fs::path& file, const SelectionResult& result) {
  auto out = open_out(file);
  out << "index,J\n";
  for (std::size_t i = 0; i < result.J_values.size(); ++i)
    out << i << ',' << format_double(result.J_values[i]) << '\n';
}

void write_risk_csv(const fs::path& file, const RiskReport& report) {
  auto out = open_out(file);
  out << "signal,n,estimator,risk,stderr,ratio\n";
  for (const auto& r : report.rows) {
    out << r.signal << ',' << r.n << ',' << r.estimator << ',' << format_double(r.risk) << ','
        << format_double(r.stderr) << ',';
    if (r.ratio) out << format_double(*r.ratio);
    out << '\n';
  }
}

void write_figure_csv(const fs::path& file, const FigureSeries& fig) {
  auto out = open_out(file);
  out << "t,S,Shat,Sstar\n";
  for (std::size_t k = 0; k < fig.t.size(); ++k)
    out << format_double(fig.t[k]) << ',' << format_double(fig.truth[k]) << ','
        << format_double(fig.hat[k]) << ',' << format_double(fig.star[k]) << '\n';
}

void write_json(const fs::path& file, const json& value) {
  auto out = open_out(file);
  out << value.dump(2) << '\n';
}

json read_json(const fs::path& file) {
  auto in = open_in(file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

json to_json(const NoiseModel& noise) {
  return {{"a", noise.a},
          {"rho1", noise.rho1},
          {"rho2", noise.rho2},
          {"jump_intensity", noise.jump_intensity},
          {"jump_law", to_string(noise.jump_law)},
          {"a_max", noise.a_max},
          {"rho_lower", noise.rho_lower},
          {"varsigma_star", noise.varsigma_star},
          {"sigma_q", noise.sigma_q()}};
}

json to_json(const ExperimentConfig& cfg) {
  json overrides = json::object();
  if (cfg.family_overrides.k0) overrides["k0"] = *cfg.family_overrides.k0;
  if (cfg.family_overrides.k_star) overrides["k_star"] = *cfg.family_overrides.k_star;
  if (cfg.family_overrides.m) overrides["m"] = *cfg.family_overrides.m;
  if (cfg.family_overrides.epsilon) overrides["epsilon"] = *cfg.family_overrides.epsilon;
  json j = {{"signals", cfg.signals},
            {"custom_coeffs", cfg.custom_coeffs},
            {"s2_truncation", cfg.s2_truncation},
            {"n_values", cfg.n_values},
            {"p", cfg.p},
            {"replications", cfg.replications},
            {"master_seed", cfg.master_seed},
            {"noise", to_json(cfg.noise)},
            {"family_mode", to_string(cfg.family_mode)},
            {"family_overrides", overrides},
            {"rho", optional_number(cfg.rho)},
            {"workers", cfg.workers},
            {"improve_n", cfg.improve_n},
            {"improve_d", cfg.improve_d},
            {"improve_p", cfg.improve_p ? json(*cfg.improve_p) : json(nullptr)},
            {"oracle_n", cfg.oracle_n},
            {"oracle_max_members", cfg.oracle_max_members}};
  j["noise"].erase("sigma_q");
  return j;
}

json to_json(const H2Constants& c) {
  return {{"d", c.d},         {"d0", c.d0},     {"a_check", c.a_check},
          {"l_star", c.l_star}, {"kappa_star", c.kappa_star}, {"r_n", c.r_n},
          {"c_n", c.c_n},     {"shrinkage_active", c.shrinkage_active()}};
}

json to_json(const RiskReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"signal", r.signal},
                    {"n", r.n},
                    {"estimator", r.estimator},
                    {"risk", number(r.risk)},
                    {"stderr", number(r.stderr)},
                    {"ratio", r.ratio ? number(*r.ratio) : json(nullptr)},
                    {"ratio_stderr", r.ratio_stderr ? number(*r.ratio_stderr) : json(nullptr)},
                    {"replications", r.replications}});
  json diags = json::array();
  for (const auto& d : report.diagnostics)
    diags.push_back({{"signal", d.signal},
                     {"n", d.n},
                     {"p", d.p},
                     {"family_size", d.family_size},
                     {"nu", d.nu},
                     {"nu_star", d.nu_star},
                     {"rho", d.rho},
                     {"mean_sigma_hat", d.mean_sigma_hat},
                     {"shrinkage_active_fraction", d.shrinkage_active_fraction},
                     {"mean_c_n", d.mean_c_n},
                     {"raw_minus_shrunk", risk_json(d.raw_minus_shrunk)}});
  return {{"mode", to_string(report.mode)}, {"rows", rows}, {"diagnostics", diags}};
}

json to_json(const ImprovementResult& r) {
  return {{"n", r.n},
          {"p", r.p},
          {"d", r.d},
          {"replications", r.replications},
          {"constants", to_json(r.consts)},
          {"lipschitz_L", r.lipschitz_L},
          {"p0", number(r.p0)},
          {"delta_hat", r.delta_hat},
          {"stderr", r.stderr},
          {"bound", r.bound},
          {"bound_holds", r.delta_hat <= r.bound + 3.0 * r.stderr},
          {"risk_raw", r.risk_raw},
          {"risk_shrunk", r.risk_shrunk},
          {"degenerate", r.degenerate},
          {"over_shrunk", r.over_shrunk}};
}

json to_json(const OracleReport& r) {
  return {{"n", r.n},
          {"p", r.p},
          {"replications", r.replications},
          {"rho", r.rho},
          {"constant", r.constant},
          {"selected", risk_json(r.selected)},
          {"min_member_risk", r.min_member_risk},
          {"argmin_member", r.argmin_member},
          {"members_evaluated", r.members_evaluated},
          {"nu_star", r.nu_star},
          {"mean_abs_sigma_error", r.mean_abs_sigma_error},
          {"remainder", r.remainder},
          {"joint_stderr", r.joint_stderr},
          {"slack", r.slack},
          {"ratio", number(r.ratio)},
          {"holds", r.holds}};
}

json to_json(const std::vector<SigmaPoint>& points) {
  json arr = json::array();
  for (const auto& pt : points)
    arr.push_back({{"n", pt.n},
                   {"p", pt.p},
                   {"replications", pt.replications},
                   {"mean_sigma_hat", pt.mean_sigma_hat},
                   {"mean_abs_error", pt.mean_abs_error},
                   {"stderr", pt.stderr}});
  return arr;
}

json to_json(const AuditReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"n", e.n},
                       {"p", e.p},
                       {"kappa_star", e.kappa_star},
                       {"nu", e.nu},
                       {"family_size", e.family_size},
                       {"nu_star", e.nu_star},
                       {"c_star_n", e.c_star_n},
                       {"p_over_n56", e.p_over_n56},
                       {"p_at_most_n", e.p_at_most_n},
                       {"condition_D", e.condition_D},
                       {"d0", e.d0},
                       {"members_clearing_gate", e.members_clearing_gate},
                       {"max_d_gamma", e.max_d_gamma},
                       {"nu_star_growth", e.nu_star_growth},
                       {"family_invariants", e.family_invariants}});
  return {{"entries", entries},
          {"family_invariants", report.family_invariants},
          {"nu_star_growth_decreasing", report.growth_decreasing}};
}

json to_json(const VarianceCheck& c) {
  return {{"t", c.t},
          {"paths", c.paths},
          {"analytic", c.analytic},
          {"sample_mean", c.sample_mean},
          {"mean_stderr", c.mean_stderr},
          {"sample_variance", c.sample_variance},
          {"variance_stderr", c.variance_stderr},
          {"pass", c.pass}};
}

json to_json(const CovarianceCheck& c) {
  return {{"i", c.i},         {"j", c.j},           {"a", c.a},       {"analytic", c.analytic},
          {"sample", c.sample}, {"stderr", c.stderr}, {"pass", c.pass}};
}

json to_json(const GramCheck& c) {
  return {{"d", c.d},
          {"n", c.n},
          {"p", c.p},
          {"a", c.a},
          {"trace", c.summary.trace},
          {"lambda_max", c.summary.lambda_max},
          {"lambda_min", c.summary.lambda_min},
          {"trace_above_half", c.trace_above_half},
          {"lambda_max_at_most_3", c.lambda_max_at_most_3}};
}

json to_json(const DirichletCheck& c) {
  return {{"d_max", c.d_max},
          {"worst", c.worst},
          {"worst_d", c.worst_d},
          {"excess", c.excess},
          {"pass", c.pass}};
}

NoiseModel noise_from_json(const json& j, NoiseModel base) {
  if (!j.is_object()) throw ValidationError("noise: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "a") base.a = value.get<double>();
    else if (key == "rho1") base.rho1 = value.get<double>();
    else if (key == "rho2") base.rho2 = value.get<double>();
    else if (key == "jump_intensity") base.jump_intensity = value.get<double>();
    else if (key == "jump_law") base.jump_law = parse_jump_law(value.get<std::string>());
    else if (key == "a_max") base.a_max = value.get<double>();
    else if (key == "rho_lower") base.rho_lower = value.get<double>();
    else if (key == "varsigma_star") base.varsigma_star = value.get<double>();
    else if (key == "sigma_q") continue;
    else throw ValidationError("noise: unknown key '" + key + "'");
  }
  return base;
}

void merge_config(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "signals") cfg.signals = value.get<std::vector<std::string>>();
      else if (key == "signal") cfg.signals = {value.get<std::string>()};
      else if (key == "custom_coeffs") cfg.custom_coeffs = value.get<std::vector<double>>();
      else if (key == "s2_truncation") cfg.s2_truncation = value.get<int>();
      else if (key == "n_values") cfg.n_values = value.get<std::vector<int>>();
      else if (key == "p") cfg.p = value.get<int>();
      else if (key == "replications") cfg.replications = value.get<int>();
      else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
      else if (key == "noise") cfg.noise = noise_from_json(value, cfg.noise);
      else if (key == "family_mode") cfg.family_mode = parse_family_mode(value.get<std::string>());
      else if (key == "family_overrides") {
        for (const auto& [k, v] : value.items()) {
          if (k == "k0") cfg.family_overrides.k0 = v.get<double>();
          else if (k == "k_star") cfg.family_overrides.k_star = v.get<int>();
          else if (k == "m") cfg.family_overrides.m = v.get<int>();
          else if (k == "epsilon") cfg.family_overrides.epsilon = v.get<double>();
          else throw ValidationError("config: unknown family override '" + k + "'");
        }
      } else if (key == "rho") {
        if (value.is_null()) cfg.rho.reset();
        else cfg.rho = value.get<double>();
      } else if (key == "workers") cfg.workers = value.get<int>();
      else if (key == "improve_n") cfg.improve_n = value.get<int>();
      else if (key == "improve_d") cfg.improve_d = value.get<int>();
      else if (key == "improve_p") {
        if (value.is_null()) cfg.improve_p.reset();
        else cfg.improve_p = value.get<int>();
      } else if (key == "oracle_n") cfg.oracle_n = value.get<int>();
      else if (key == "oracle_max_members") cfg.oracle_max_members = value.get<int>();
      else if (key == "scale") {
        const auto base = parse_scale(value.get<std::string>()) == Scale::paper
                              ? ExperimentConfig::paper()
                              : ExperimentConfig::desk();
        cfg.n_values = base.n_values;
        cfg.p = base.p;
        cfg.replications = base.replications;
      } else throw ValidationError("config: unknown key '" + key + "'");
    }
  } catch (const json::type_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (cfg.replications < 1) throw ValidationError("config: replications must be >= 1");
  for (const auto& s : cfg.signals) signal_by_name(s, cfg.custom_coeffs, cfg.s2_truncation);
  cfg.noise.validate();
}

std::string sha256_file(const fs::path& file) {
  auto in = open_in(file, std::ios::binary);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

void write_manifest(const fs::path& out_dir, const RunManifest& m) {
  json files = json::array();
  for (const auto& f : m.outputs)
    files.push_back({{"path", fs::relative(f, out_dir).generic_string()},
                     {"bytes", fs::file_size(f)},
                     {"sha256", sha256_file(f)}});
  write_json(out_dir / "manifest.json", {{"command", m.command},
                                         {"version", m.version},
                                         {"started", m.started},
                                         {"finished", m.finished},
                                         {"runtime_seconds", m.runtime_seconds},
                                         {"config", m.config},
                                         {"outputs", files}});
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace shrinkreg
