// Command-line front end: simulate | beamform | process | eval | sweep.
// Exit codes: 0 success, 1 pipeline failure, 2 usage/validation errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specbeam/errors.hpp"
#include "specbeam/experiment.hpp"
#include "specbeam/metrics.hpp"
#include "specbeam/pipeline.hpp"
#include "specbeam/serial.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specbeam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string config_path;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool strict_paper = false;
};

/// --config JSON pre-fills option structs; explicit flags win because CLI11
/// parses them afterwards over these defaults.
json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed config file: ") + e.what());
    }
    return j;
}

std::string prescan_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string_view(argv[i]) == "--config") return argv[i + 1];
    }
    return {};
}

RadarConfig config_from_preset(const std::string& preset) {
    if (preset == "near") return preset_for_bucket(RangeBucket::Near);
    if (preset == "mid") return preset_for_bucket(RangeBucket::Mid);
    if (preset == "far") return preset_for_bucket(RangeBucket::Far);
    if (preset == "default" || preset.empty()) return RadarConfig{};
    throw ValidationError("unknown preset \"" + preset + "\" (near|mid|far|default)");
}

struct SimulateArgs {
    std::string scene_path, out_dir, preset = "default";
    double snr_db = -1.0;  // < 0: use the scene's own noise_power
    double bandwidth_hz = 0.0;
    CameraModel camera;
    OracleParams oracle;
};

int run_simulate(const SimulateArgs& args, const CommonOpts& common) {
    const Scene scene = load_scene(args.scene_path);
    RadarConfig cfg = config_from_preset(args.preset);
    if (args.bandwidth_hz > 0.0) cfg.bandwidth_hz = args.bandwidth_hz;

    std::printf("range resolution: %s m\n", format_double(range_resolution(cfg)).c_str());
    std::printf("max unambiguous range: %s m\n",
                format_double(max_unambiguous_range(cfg)).c_str());
    std::printf("azimuth beamwidth: %s deg\n",
                format_double(rad2deg(azimuth_beamwidth(cfg))).c_str());

    Scene sim_scene = scene;
    if (args.snr_db >= 0.0) {
        sim_scene.noise_power =
            noise_power_for_snr(noiseless_peak_power(scene, cfg), cfg, args.snr_db);
    }
    const auto artifacts =
        simulate_scene(sim_scene, cfg, args.camera, common.seed, args.oracle);

    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    write_iq_file(artifacts.iq, scene_hash(sim_scene), out / "capture.iq");
    write_mono_file(artifacts.mono, out / "mono.f32");
    for (const auto& mask : artifacts.masks) {
        char name[32];
        std::snprintf(name, sizeof name, "mask_%03d.json", mask.object_id);
        write_mask_file(mask, out / name);
    }
    std::printf("wrote %zu masks, capture.iq, mono.f32 -> %s\n", artifacts.masks.size(),
                args.out_dir.c_str());
    return kExitOk;
}

struct BeamformArgs {
    std::string capture_path, out_dir;
    bool hann = false, wideband = false;
};

int run_beamform(const BeamformArgs& args, const CommonOpts& common) {
    const IqFile file = read_iq_file(args.capture_path);
    BeamformOptions opts;
    opts.hann_window = args.hann;
    opts.wideband_steering = args.wideband;
    opts.jobs = common.jobs;
    const RadarProfile profile = beamform(file.cube, default_azimuth_grid(), opts);
    fs::create_directories(args.out_dir);
    write_profile_csv(profile, fs::path(args.out_dir) / "profile.csv");
    write_profile_pgm(profile, fs::path(args.out_dir) / "profile.pgm");
    std::printf("wrote profile.csv, profile.pgm -> %s\n", args.out_dir.c_str());
    return kExitOk;
}

struct ProcessArgs {
    std::string capture_path, mono_path, out_dir;
    std::vector<std::string> mask_paths;
    bool no_declutter = false, no_fusion = false;
};

int run_process(const ProcessArgs& args, const CommonOpts& common) {
    SceneArtifacts artifacts;
    artifacts.iq = read_iq_file(args.capture_path).cube;
    artifacts.mono = read_mono_file(args.mono_path);
    for (const auto& p : args.mask_paths) artifacts.masks.push_back(read_mask_file(p));
    artifacts.camera.image_width = artifacts.mono.width;
    artifacts.camera.image_height = artifacts.mono.height;

    PipelineOptions opts;
    opts.declutter_enabled = !args.no_declutter;
    opts.fusion_enabled = !args.no_fusion;
    opts.strict_paper = common.strict_paper;
    opts.jobs = common.jobs;
    opts.oracle = artifacts.mono.params;

    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    const auto results = process_scene(artifacts, opts);
    int succeeded = 0;
    json index = json::array();
    for (const auto& r : results) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "%03d", r.object_id);
        json entry{{"object_id", r.object_id},
                   {"class", std::string(to_string(r.cls))},
                   {"ok", r.ok}};
        if (r.ok) {
            ++succeeded;
            entry["d_star_m"] = r.d_star;
            entry["span_deg"] = json::array({rad2deg(r.span.lo), rad2deg(r.span.hi)});
            write_correlation_csv(r.curve, out / (std::string("curve_") + suffix + ".csv"));
            write_sparse_cloud_csv(r.sparse, out / (std::string("sparse_") + suffix + ".csv"));
            write_dense_image_csv(r.dense, out / (std::string("dense_") + suffix + ".csv"));
            write_dense_points_csv(r.dense,
                                   out / (std::string("dense_points_") + suffix + ".csv"));
            std::ofstream rep(out / (std::string("declutter_") + suffix + ".json"));
            rep << declutter_report_to_json(r.declutter).dump(2) << '\n';
            std::printf("object %d (%s): d* = %s m\n", r.object_id,
                        std::string(to_string(r.cls)).c_str(),
                        format_double(r.d_star).c_str());
        } else {
            entry["error"] = r.error;
            std::fprintf(stderr, "object %d failed: %s\n", r.object_id, r.error.c_str());
        }
        index.push_back(std::move(entry));
    }
    std::ofstream idx(out / "objects.json");
    idx << index.dump(2) << '\n';
    if (results.empty()) {
        std::fprintf(stderr, "no labeled masks to process\n");
        return kExitPipeline;
    }
    return succeeded > 0 ? kExitOk : kExitPipeline;
}

struct EvalArgs {
    std::string scene_path, results_dir, out_path;
};

int run_eval(const EvalArgs& args, const CommonOpts&) {
    const Scene scene = load_scene(args.scene_path);
    std::ifstream idx(fs::path(args.results_dir) / "objects.json");
    if (!idx) throw IoError("cannot open objects.json in " + args.results_dir);
    json index;
    idx >> index;

    std::vector<MetricsRow> rows;
    for (const auto& entry : index) {
        MetricsRow row;
        row.scene_id = args.scene_path;
        row.object_id = entry.at("object_id").get<int>();
        row.cls = object_class_from_string(entry.at("class").get<std::string>());
        row.method = "metamoran";
        if (!entry.value("ok", false)) {
            row.failed = true;
            row.note = entry.value("error", "processing failed");
            rows.push_back(std::move(row));
            continue;
        }
        const SceneObject& obj = scene.object_by_id(row.object_id);
        const auto [z_lo, z_hi] = obj.range_span();
        row.bucket = bucket_for_range(0.5 * (z_lo + z_hi));
        row.depth_error_m = depth_error(entry.at("d_star_m").get<double>(), z_lo, z_hi);

        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "%03d", row.object_id);
        std::ifstream pts_file(fs::path(args.results_dir) /
                               (std::string("dense_points_") + suffix + ".csv"));
        std::vector<Vec2> pred;
        std::string line;
        std::getline(pts_file, line);  // header
        while (std::getline(pts_file, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            pred.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        }
        double az_lo = std::numeric_limits<double>::infinity(), az_hi = -az_lo;
        for (const auto& s : obj.scatterers) {
            az_lo = std::min(az_lo, std::atan2(s.x, s.z));
            az_hi = std::max(az_hi, std::atan2(s.x, s.z));
        }
        std::vector<double> grid;
        for (double a = az_lo; a <= az_hi + 1e-12; a += deg2rad(0.05)) grid.push_back(a);
        std::vector<Vec2> truth;
        for (const auto& c : ground_truth_contour(scene, row.object_id, grid)) {
            truth.push_back({c.range * std::sin(c.azimuth), c.range * std::cos(c.azimuth)});
        }
        if (!pred.empty() && !truth.empty()) {
            row.imaging_error_m = modified_hausdorff(pred, truth);
        }
        rows.push_back(std::move(row));
    }
    write_metrics_csv(rows, args.out_path);
    std::printf("wrote %zu rows -> %s\n", rows.size(), args.out_path.c_str());
    return kExitOk;
}

struct SweepArgs {
    std::string corpus_path, out_dir;
};

int run_sweep(const SweepArgs& args, const CommonOpts& common) {
    std::ifstream in(args.corpus_path);
    if (!in) throw IoError("cannot open corpus config: " + args.corpus_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed corpus config: ") + e.what());
    }
    ExperimentConfig config =
        experiment_config_from_json(j, fs::path(args.corpus_path).parent_path());
    if (common.seed != 0) config.seed = common.seed;
    config.jobs = common.jobs;
    config.pipeline.strict_paper = config.pipeline.strict_paper || common.strict_paper;
    config.pipeline.jobs = 1;  // parallelism lives at the scene level here
    const ExperimentReport report = run_experiment(config);
    write_experiment_report(report, args.out_dir);
    std::printf("wrote report.csv, summary.json, declutter_audit.json, timings.csv -> %s\n",
                args.out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Camera-guided radar depth imaging pipeline"};
    app.require_subcommand(1);

    CommonOpts common;
    json cfg;
    try {
        cfg = load_config(prescan_config(argc, argv));
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    common.jobs = cfg.value("jobs", 0);
    common.seed = cfg.value("seed", std::uint64_t{0});
    common.strict_paper = cfg.value("strict_paper", false);

    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file; flags override its values");
    app.add_option("--jobs", common.jobs, "worker threads (default: SPECBEAM_JOBS or hardware)");
    app.add_option("--seed", common.seed, "top-level RNG seed");
    app.add_flag("--strict-paper", common.strict_paper,
                 "disable extensions beyond the published algorithm");

    SimulateArgs sim;
    sim.scene_path = cfg.value("scene", "");
    sim.out_dir = cfg.value("out", "out");
    sim.preset = cfg.value("preset", std::string("default"));
    sim.snr_db = cfg.value("snr_db", -1.0);
    auto* c_sim = app.add_subcommand("simulate", "render capture, masks and monocular depth");
    c_sim->add_option("--scene", sim.scene_path, "scene JSON file");
    c_sim->add_option("--out", sim.out_dir, "output directory");
    c_sim->add_option("--preset", sim.preset, "radar preset: near|mid|far|default");
    c_sim->add_option("--snr-db", sim.snr_db, "calibrate noise to this peak SNR");
    c_sim->add_option("--bandwidth-hz", sim.bandwidth_hz, "override bandwidth");
    c_sim->add_option("--focal-px", sim.camera.focal_px, "camera focal length, pixels");
    c_sim->add_option("--image-width", sim.camera.image_width, "camera width, pixels");
    c_sim->add_option("--image-height", sim.camera.image_height, "camera height, pixels");
    c_sim->add_option("--mask-dilation", sim.oracle.mask_dilation_px, "mask margin, pixels");
    c_sim->add_option("--sigma-abs", sim.oracle.sigma_abs_at_60m,
                      "monocular absolute error scale at 60 m");
    c_sim->add_option("--relative-noise", sim.oracle.relative_noise_sigma,
                      "per-pixel depth noise, m");

    BeamformArgs bf;
    auto* c_bf = app.add_subcommand("beamform", "range-azimuth profile from a capture");
    c_bf->add_option("--capture", bf.capture_path, "capture.iq file")->required();
    c_bf->add_option("--out", bf.out_dir, "output directory")->required();
    c_bf->add_flag("--hann", bf.hann, "Hann window over frequency samples");
    c_bf->add_flag("--wideband", bf.wideband, "per-bin steering weights");

    ProcessArgs proc;
    auto* c_proc = app.add_subcommand("process", "full depth-imaging pipeline per object");
    c_proc->add_option("--capture", proc.capture_path, "capture.iq file")->required();
    c_proc->add_option("--mono", proc.mono_path, "monocular depth file")->required();
    c_proc->add_option("--mask", proc.mask_paths, "mask JSON file(s)")->required();
    c_proc->add_option("--out", proc.out_dir, "output directory")->required();
    c_proc->add_flag("--no-declutter", proc.no_declutter, "skip interference cancellation");
    c_proc->add_flag("--no-fusion", proc.no_fusion, "radar-only dense image");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "score processed outputs against scene truth");
    c_eval->add_option("--scene", ev.scene_path, "ground-truth scene JSON")->required();
    c_eval->add_option("--results", ev.results_dir, "directory written by process")->required();
    c_eval->add_option("--out", ev.out_path, "metrics CSV path")->required();

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "run a corpus and emit the full report");
    c_sweep->add_option("--corpus", sw.corpus_path, "corpus config JSON")->required();
    c_sweep->add_option("--out", sw.out_dir, "report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_sim->parsed()) {
            if (sim.scene_path.empty()) throw ValidationError("simulate needs --scene");
            return run_simulate(sim, common);
        }
        if (c_bf->parsed()) return run_beamform(bf, common);
        if (c_proc->parsed()) return run_process(proc, common);
        if (c_eval->parsed()) return run_eval(ev, common);
        if (c_sweep->parsed()) return run_sweep(sw, common);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return kExitPipeline;
    }
    return kExitUsage;
}
