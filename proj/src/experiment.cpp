#include "specbeam/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "specbeam/errors.hpp"
#include "specbeam/parallel.hpp"
#include "specbeam/rng.hpp"
#include "specbeam/serial.hpp"

namespace specbeam {

namespace {

using nlohmann::json;

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

RangeBucket bucket_from_string(const std::string& s) {
    if (s == "near" || s == "0-20m") return RangeBucket::Near;
    if (s == "mid" || s == "20-60m") return RangeBucket::Mid;
    if (s == "far" || s == "60-90m") return RangeBucket::Far;
    throw ParseError("unknown range bucket \"" + s + "\"");
}

/// Truth cloud for imaging error: the object's front contour sampled on a
/// fine azimuth grid across its own span.
std::vector<Vec2> truth_points(const Scene& scene, int object_id) {
    const SceneObject& obj = scene.object_by_id(object_id);
    double az_lo = std::numeric_limits<double>::infinity(), az_hi = -az_lo;
    for (const auto& s : obj.scatterers) {
        const double az = std::atan2(s.x, s.z);
        az_lo = std::min(az_lo, az);
        az_hi = std::max(az_hi, az);
    }
    const double step = deg2rad(0.05);
    std::vector<double> grid;
    for (double a = az_lo; a <= az_hi + 1e-12; a += step) grid.push_back(a);
    if (grid.empty()) grid.push_back(az_lo);
    std::vector<Vec2> pts;
    for (const auto& c : ground_truth_contour(scene, object_id, grid)) {
        pts.push_back({c.range * std::sin(c.azimuth), c.range * std::cos(c.azimuth)});
    }
    return pts;
}

std::vector<Vec2> mono_points(std::span<const DepthSample> columns) {
    std::vector<Vec2> pts;
    pts.reserve(columns.size());
    for (const auto& c : columns) {
        pts.push_back({c.depth * std::sin(c.azimuth), c.depth * std::cos(c.azimuth)});
    }
    return pts;
}

/// Point cloud the naive baseline implies: in-span cells near the strongest
/// cell's range whose power clears a fraction of the in-span maximum.
std::vector<Vec2> naive_points(const RadarProfile& profile, const AzimuthSpan& span) {
    double best = 0.0;
    int best_row = 0;
    std::vector<int> cols;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (!span.contains(profile.azimuth_axis[j])) continue;
        cols.push_back(j);
        for (int m = 0; m < profile.num_range_bins; ++m) {
            if (profile.at(m, j) > best) {
                best = profile.at(m, j);
                best_row = m;
            }
        }
    }
    std::vector<Vec2> pts;
    for (int j : cols) {
        if (profile.at(best_row, j) >= 0.25 * best) {
            const double az = profile.azimuth_axis[j];
            const double r = profile.range_axis[best_row];
            pts.push_back({r * std::sin(az), r * std::cos(az)});
        }
    }
    if (pts.empty()) {
        pts.push_back({0.0, profile.range_axis[best_row]});
    }
    return pts;
}

struct Task {
    std::size_t entry_index;
    int seed_index;
};

}  // namespace

double noiseless_peak_power(const Scene& scene, const RadarConfig& cfg) {
    Scene quiet = scene;
    quiet.noise_power = 0.0;
    RadarConfig c = cfg;
    c.rng_seed = 0;
    const IQCube iq = synthesize_capture(quiet, c);
    const RadarProfile profile = beamform(iq, default_azimuth_grid());
    return profile.max_power();
}

double noise_power_for_snr(double peak_power, const RadarConfig& cfg, double snr_db) {
    const double gain = static_cast<double>(cfg.num_antennas) * cfg.num_samples;
    return peak_power / (gain * std::pow(10.0, snr_db / 10.0));
}

ExperimentConfig experiment_config_from_json(const json& j,
                                             const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("methods")) config.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("strict_paper")) config.pipeline.strict_paper = j.at("strict_paper").get<bool>();
    if (j.contains("declutter")) config.pipeline.declutter_enabled = j.at("declutter").get<bool>();
    if (j.contains("fusion")) config.pipeline.fusion_enabled = j.at("fusion").get<bool>();
    for (const auto& je : j.at("entries")) {
        CorpusEntry entry;
        entry.scene_id = je.at("scene_id").get<std::string>();
        entry.scene_path = base_dir / je.at("scene").get<std::string>();
        entry.bucket = bucket_from_string(je.at("bucket").get<std::string>());
        entry.snr_db = je.value("snr_db", 20.0);
        entry.num_seeds = je.value("num_seeds", 1);
        entry.occluded = je.value("occluded", false);
        config.entries.push_back(std::move(entry));
    }
    return config;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    struct SceneCache {
        Scene scene;
        RadarConfig cfg;
        double noise_power = 0.0;
    };
    std::vector<SceneCache> cache;
    cache.reserve(config.entries.size());
    for (const auto& entry : config.entries) {
        SceneCache sc;
        sc.scene = load_scene(entry.scene_path);
        sc.cfg = preset_for_bucket(entry.bucket);
        sc.noise_power =
            noise_power_for_snr(noiseless_peak_power(sc.scene, sc.cfg), sc.cfg, entry.snr_db);
        cache.push_back(std::move(sc));
    }

    std::vector<Task> tasks;
    for (std::size_t e = 0; e < config.entries.size(); ++e) {
        for (int s = 0; s < config.entries[e].num_seeds; ++s) tasks.push_back({e, s});
    }

    struct TaskOutput {
        std::vector<MetricsRow> rows;
        std::vector<json> audit;
    };
    std::vector<TaskOutput> outputs(tasks.size());

    parallel_for(tasks.size(), config.jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const Task& task = tasks[t];
            const CorpusEntry& entry = config.entries[task.entry_index];
            const SceneCache& sc = cache[task.entry_index];
            TaskOutput& out = outputs[t];

            Scene scene = sc.scene;
            scene.noise_power = sc.noise_power;
            const std::uint64_t scene_seed =
                substream_seed(config.seed, "scene", task.entry_index,
                               static_cast<std::uint64_t>(task.seed_index));
            const std::string scene_id =
                entry.scene_id + "#" + std::to_string(task.seed_index);

            SceneArtifacts artifacts;
            try {
                artifacts = simulate_scene(scene, sc.cfg, config.camera, scene_seed,
                                           config.pipeline.oracle);
            } catch (const Error& e) {
                MetricsRow row;
                row.scene_id = scene_id;
                row.bucket = entry.bucket;
                row.occluded = entry.occluded;
                row.failed = true;
                row.note = e.what();
                out.rows.push_back(std::move(row));
                continue;
            }

            for (const auto& mask : artifacts.masks) {
                if (mask.cls == ObjectClass::Unknown) continue;
                const SceneObject& obj = scene.object_by_id(mask.object_id);
                if (obj.is_occluder) continue;
                const auto [z_lo, z_hi] = obj.range_span();
                const auto truth = truth_points(scene, mask.object_id);

                for (const auto& method : config.methods) {
                    MetricsRow row;
                    row.scene_id = scene_id;
                    row.object_id = mask.object_id;
                    row.cls = mask.cls;
                    row.bucket = entry.bucket;
                    row.occluded = entry.occluded;
                    row.method = method;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        if (method == "metamoran") {
                            PipelineOptions opts = config.pipeline;
                            auto result = process_object(artifacts, mask, opts);
                            if (!result.ok) throw NoDetectionError(result.error);
                            row.depth_error_m = depth_error(result.d_star, z_lo, z_hi);
                            const auto pts = result.dense.to_points();
                            row.imaging_error_m = modified_hausdorff(pts, truth);
                            out.audit.push_back(
                                json{{"scene_id", scene_id},
                                     {"object_id", mask.object_id},
                                     {"declutter", declutter_report_to_json(result.declutter)}});
                        } else if (method == "naive_fusion") {
                            const auto columns = masked_column_depths(
                                mask, artifacts.mono, artifacts.camera, artifacts.calibration);
                            std::vector<double> depths;
                            for (const auto& c : columns) depths.push_back(c.depth);
                            const double d_mono = median_of(std::move(depths));
                            const auto span = mask_to_azimuth_span(
                                mask, artifacts.camera, artifacts.calibration, d_mono);
                            const auto profile =
                                beamform(artifacts.iq, default_azimuth_grid(),
                                         config.pipeline.beamform);
                            const double d = naive_fusion_baseline(profile, span);
                            row.depth_error_m = depth_error(d, z_lo, z_hi);
                            row.imaging_error_m =
                                modified_hausdorff(naive_points(profile, span), truth);
                        } else if (method == "mono") {
                            const auto columns = masked_column_depths(
                                mask, artifacts.mono, artifacts.camera, artifacts.calibration);
                            std::vector<double> depths;
                            for (const auto& c : columns) depths.push_back(c.depth);
                            const double d_mono = median_of(std::move(depths));
                            row.depth_error_m = depth_error(d_mono, z_lo, z_hi);
                            row.imaging_error_m =
                                modified_hausdorff(mono_points(columns), truth);
                        } else {
                            throw ValidationError("unknown method \"" + method + "\"");
                        }
                    } catch (const Error& e) {
                        row.failed = true;
                        row.note = e.what();
                    }
                    row.runtime_s = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - t0)
                                        .count();
                    out.rows.push_back(std::move(row));
                }
            }
        }
    });

    ExperimentReport report;
    for (auto& out : outputs) {
        for (auto& r : out.rows) report.rows.push_back(std::move(r));
        for (auto& a : out.audit) report.declutter_audit.push_back(std::move(a));
    }

    // per (bucket, method) summaries, medians first
    std::map<std::pair<std::string, std::string>, std::vector<const MetricsRow*>> groups;
    for (const auto& r : report.rows) {
        if (r.failed) continue;
        groups[{std::string(to_string(r.bucket)), r.method}].push_back(&r);
    }
    json summary = json::array();
    for (const auto& [key, rows] : groups) {
        std::vector<double> de, ie;
        for (const auto* r : rows) {
            de.push_back(r->depth_error_m);
            ie.push_back(r->imaging_error_m);
        }
        json g{{"bucket", key.first},
               {"method", key.second},
               {"count", rows.size()},
               {"median_depth_error_m", median_of(de)},
               {"mean_depth_error_m", mean_of(de)},
               {"std_depth_error_m", stddev_of(de)},
               {"median_imaging_error_m", median_of(ie)},
               {"mean_imaging_error_m", mean_of(ie)},
               {"std_imaging_error_m", stddev_of(ie)}};
        summary.push_back(std::move(g));
    }
    int failed = 0;
    for (const auto& r : report.rows) failed += r.failed;
    report.summary = json{{"groups", std::move(summary)},
                          {"rows", report.rows.size()},
                          {"failed_rows", failed}};
    return report;
}

void write_experiment_report(const ExperimentReport& report,
                             const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_metrics_csv(report.rows, out_dir / "report.csv");
    {
        std::ofstream out(out_dir / "summary.json");
        if (!out) throw IoError("cannot write summary.json");
        out << report.summary.dump(2) << '\n';
    }
    {
        json audit = json::array();
        for (const auto& a : report.declutter_audit) audit.push_back(a);
        std::ofstream out(out_dir / "declutter_audit.json");
        if (!out) throw IoError("cannot write declutter_audit.json");
        out << audit.dump(2) << '\n';
    }
    {
        // wall-clock timings are inherently run-dependent, so they live in
        // a sidecar and the deterministic report set stays byte-stable
        std::ofstream out(out_dir / "timings.csv");
        if (!out) throw IoError("cannot write timings.csv");
        out << "scene_id,object_id,method,runtime_s\n";
        for (const auto& r : report.rows) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", r.runtime_s);
            out << r.scene_id << ',' << r.object_id << ',' << r.method << ',' << buf << '\n';
        }
    }
}

}  // namespace specbeam
