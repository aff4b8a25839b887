#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specbeam/metrics.hpp"
#include "specbeam/pipeline.hpp"

namespace specbeam {

/// One corpus entry: a scene file swept over seeds at a bucket preset.
struct CorpusEntry {
    std::string scene_id;
    std::filesystem::path scene_path;
    RangeBucket bucket = RangeBucket::Mid;
    double snr_db = 20.0;  // noise calibrated against the scene's own peak
    int num_seeds = 1;
    bool occluded = false;
};

struct ExperimentConfig {
    std::vector<CorpusEntry> entries;
    std::vector<std::string> methods{"metamoran", "naive_fusion", "mono"};
    PipelineOptions pipeline;
    CameraModel camera;
    std::uint64_t seed = 0;
    int jobs = 0;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir);

struct ExperimentReport {
    std::vector<MetricsRow> rows;
    nlohmann::json summary;                     // per-bucket/method medians
    std::vector<nlohmann::json> declutter_audit;
};

/// Deterministic per seed: scenes evaluate in parallel, rows are reduced
/// in (entry, seed, object, method) order. Per-scene failures become
/// failed rows; the sweep never aborts.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.csv, summary.json and declutter_audit.json.
void write_experiment_report(const ExperimentReport& report,
                             const std::filesystem::path& out_dir);

/// Profile-peak power of the noiseless capture; used to calibrate
/// noise_power for a requested peak SNR.
double noiseless_peak_power(const Scene& scene, const RadarConfig& cfg);
double noise_power_for_snr(double peak_power, const RadarConfig& cfg, double snr_db);

}  // namespace specbeam
