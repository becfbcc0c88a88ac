#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "shrinkreg/estimators.hpp"
#include "shrinkreg/experiments.hpp"
#include "shrinkreg/model_selection.hpp"
#include "shrinkreg/weight_family.hpp"

namespace shrinkreg {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// Columns l,t_l,dy_l for l = 1..N.
void write_path_csv(const fs::path& file, const ObservationPath& path);
/// The grid is recovered from t_1 = 1/p and the row count N = n·p.
ObservationPath read_path_csv(const fs::path& file);

/// Little-endian: "SRGPATH1", int32 n, int32 p, uint64 seed, int64 N, N doubles.
void write_path_binary(const fs::path& file, const ObservationPath& path);
ObservationPath read_path_binary(const fs::path& file);

void write_coeffs_csv(const fs::path& file, const std::vector<CoeffSet>& sets);
/// Columns t_l,value for one period l = 1..p.
void write_reconstruction_csv(const fs::path& file, const ReconstructedSignal& sig);
void write_family_csv(const fs::path& file, const WeightFamily& family);
void write_j_values_csv(const fs::path& file, const SelectionResult& result);
/// Columns signal,n,estimator,risk,stderr,ratio.
void write_risk_csv(const fs::path& file, const RiskReport& report);
/// Columns t,S,Shat,Sstar.
void write_figure_csv(const fs::path& file, const FigureSeries& fig);

void write_json(const fs::path& file, const json& value);
json read_json(const fs::path& file);

json to_json(const NoiseModel& noise);
json to_json(const ExperimentConfig& cfg);
json to_json(const H2Constants& consts);
json to_json(const RiskReport& report);
json to_json(const ImprovementResult& result);
json to_json(const OracleReport& report);
json to_json(const std::vector<SigmaPoint>& points);
json to_json(const AuditReport& report);
json to_json(const VarianceCheck& check);
json to_json(const CovarianceCheck& check);
json to_json(const GramCheck& check);
json to_json(const DirichletCheck& check);

/// Applies the keys present in `j` on top of `cfg`; unknown keys are errors.
void merge_config(ExperimentConfig& cfg, const json& j);
NoiseModel noise_from_json(const json& j, NoiseModel base = {});

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& file);

struct RunManifest {
  std::string command;
  json config;
  std::string version;
  std::string started;
  std::string finished;
  double runtime_seconds = 0.0;
  std::vector<fs::path> outputs;
};

/// Writes manifest.json next to the outputs with a checksum per file.
void write_manifest(const fs::path& out_dir, const RunManifest& manifest);

/// UTC ISO-8601 timestamp.
std::string utc_now();

}  // namespace shrinkreg
