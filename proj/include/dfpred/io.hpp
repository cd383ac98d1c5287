#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dfpred/cv.hpp"
#include "dfpred/features.hpp"
#include "dfpred/gbr.hpp"
#include "dfpred/ingest.hpp"
#include "dfpred/mlp.hpp"
#include "dfpred/synth.hpp"
#include "dfpred/topology.hpp"

namespace dfpred {

/// Shortest round-tripping decimal representation.
std::string format_double(double value);
double parse_double(std::string_view text);

/// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

// Topology file (JSON): arrays `groups`, `routers`, `nodes`, optional
// `routers_per_group` / `nodes_per_router`. Unknown fields are rejected.
void save_topology(const MachineSpec& spec, const std::filesystem::path& path);
Machine load_topology(const std::filesystem::path& path);

// Counter stream CSV: timestamp,router_id,tile_index,counter_name,value
void write_counter_stream(const SynthDataset& ds, const std::filesystem::path& path);
void write_counter_stream(std::span<const CounterSample> samples,
                          const std::filesystem::path& path);
std::vector<CounterSample> read_counter_stream(const std::filesystem::path& path);
/// Parses directly into the indexed per-key form (fast path).
CounterStream load_counter_stream(const std::filesystem::path& path, const Machine& m);

// Job log CSV: job_id,app,node_count,start_time,exec_time,nodes
// (nodes semicolon-separated)
void write_jobs(std::span<const JobRecord> jobs, const std::filesystem::path& path);
std::vector<JobRecord> read_jobs(const std::filesystem::path& path);

// Ground truth CSV: job_id,c_gbl,c_grp,num_groups,noiseless_runtime,runtime
void write_ground_truth(std::span<const GroundTruthRow> rows, const std::filesystem::path& path);
std::vector<GroundTruthRow> read_ground_truth(const std::filesystem::path& path);

// Extracted windows CSV: job_id,router_id,<counter columns>
void write_windows(const ExtractionReport& report, const Machine& m, FeatureKind kind,
                   const std::filesystem::path& path);
/// Loads both raw and derived window files back into an ExtractionReport.
ExtractionReport read_windows(const std::filesystem::path& raw_path,
                              const std::filesystem::path& derived_path, const Machine& m);
void write_skipped(std::span<const ExtractionReport::Skip> skipped,
                   const std::filesystem::path& path);
std::vector<ExtractionReport::Skip> read_skipped(const std::filesystem::path& path);

// Feature matrix CSV: job_id,app,<features...>,exec_time
void write_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

// Predictions CSV: job_id,app,exec_time,predicted
struct PredictionRow {
  std::string job_id;
  std::string app;
  double exec_time = 0;
  double predicted = 0;
};
void write_predictions(std::span<const PredictionRow> rows, const std::filesystem::path& path);
std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);

// Flat metric,value report CSV.
void write_metric_report(std::span<const std::pair<std::string, std::string>> rows,
                         const std::filesystem::path& path);

// Classifier report CSV: job_id,label,exec_time
struct ClassifyRow {
  std::string job_id;
  std::string label;
  double exec_time = 0;
};
void write_classify_report(std::span<const ClassifyRow> rows, const std::filesystem::path& path);
std::vector<ClassifyRow> read_classify_report(const std::filesystem::path& path);

// Per-fold CV report CSV: fold,n,mape,psle with a trailing `overall` row.
void write_cv_report(const EvaluationReport& report, const std::filesystem::path& path);

/// Serialized model plus everything needed to apply it to new feature rows.
struct ModelArtifact {
  std::string model_type;  // "gbr" | "mlp"
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;
  Standardizer standardizer;
  std::optional<GbrModel> gbr;
  std::optional<MlpModel> mlp;

  Vector predict_seconds(const Matrix& x_raw) const;
};

/// Byte-stable JSON serialization (format_version field included).
void save_model_artifact(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model_artifact(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, content hash
  std::vector<std::pair<std::string, std::string>> outputs;  // path, content hash
};

/// Writes manifest.json into the directory. Input/output hashes cover file
/// contents only; no timestamps are recorded.
void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

}  // namespace dfpred
