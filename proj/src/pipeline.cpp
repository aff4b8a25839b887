#include "specbeam/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "specbeam/errors.hpp"
#include "specbeam/rng.hpp"

namespace specbeam {

namespace {

double plain_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double median_column_depth(std::span<const DepthSample> columns) {
    std::vector<double> d;
    d.reserve(columns.size());
    for (const auto& c : columns) d.push_back(c.depth);
    return plain_median(std::move(d));
}

}  // namespace

SceneArtifacts simulate_scene(const Scene& scene, const RadarConfig& cfg,
                              const CameraModel& cam, std::uint64_t seed,
                              const OracleParams& params, const CalibrationTransform& calib) {
    SceneArtifacts artifacts;
    RadarConfig seeded = cfg;
    seeded.rng_seed = substream_seed(seed, "iq");
    artifacts.iq = synthesize_capture(scene, seeded);
    artifacts.masks = render_masks(scene, cam, params);
    artifacts.mono = render_monocular(scene, cam, substream_seed(seed, "mono"), params);
    artifacts.camera = cam;
    artifacts.calibration = calib;
    return artifacts;
}

ObjectResult process_object(const SceneArtifacts& artifacts, const SegmentationMask& mask,
                            const PipelineOptions& options) {
    ObjectResult result;
    result.object_id = mask.object_id;
    result.cls = mask.cls;
    try {
        const auto columns = masked_column_depths(mask, artifacts.mono, artifacts.camera,
                                                  artifacts.calibration);
        const double d_mono = median_column_depth(columns);
        result.span =
            mask_to_azimuth_span(mask, artifacts.camera, artifacts.calibration, d_mono);

        const auto azimuth_grid = default_azimuth_grid();
        RadarProfile profile = beamform(artifacts.iq, azimuth_grid, options.beamform);

        IQCube working = artifacts.iq;
        if (options.declutter_enabled) {
            DeclutterOptions dopt;
            dopt.min_prominence = options.min_prominence;
            dopt.rss_margin = options.rss_margin;
            dopt.beamform = options.beamform;
            auto decluttered = declutter(working, profile, result.span, mask.cls, dopt);
            working = std::move(decluttered.iq);
            profile = std::move(decluttered.profile);
            result.declutter = std::move(decluttered.report);
        }

        const auto in_span_peaks =
            find_peaks(profile, Region::inside(result.span), options.min_prominence);
        if (in_span_peaks.empty()) {
            throw NoDetectionError("no in-span peak above the prominence floor");
        }

        // occlusion handling needs every mask mapped into the radar frame
        std::vector<MaskSpan> mask_spans;
        for (const auto& other : artifacts.masks) {
            try {
                const auto other_cols = masked_column_depths(other, artifacts.mono,
                                                             artifacts.camera,
                                                             artifacts.calibration);
                const double d = median_column_depth(other_cols);
                mask_spans.push_back({other.object_id, other.cls, other.confidence,
                                      mask_to_azimuth_span(other, artifacts.camera,
                                                           artifacts.calibration, d)});
            } catch (const Error&) {
                // masks without usable depths carry no occlusion information
            }
        }
        result.occlusion = resolve_occlusion(in_span_peaks, mask_spans, result.span, mask.cls,
                                             options.rss_margin);

        if (result.occlusion.occluder_removed) {
            for (const auto& p : result.occlusion.removed_occluder_peaks) {
                subtract_point(working, p.range, p.azimuth);
            }
            profile = beamform(working, azimuth_grid, options.beamform);
        }

        Contour contour = contour_from_columns(columns);
        const Contour template_contour = contour.decimated(options.template_max_columns);

        DepthPrior prior{d_mono, artifacts.mono.params.sigma_abs_at_60m * d_mono / 60.0};
        if (result.occlusion.farther_peak_rule) {
            // lock the search onto the chosen (farther) peak instead of the
            // occluder the monocular prior may be pointing at
            prior.depth = result.occlusion.peak.range;
            const double dr = range_resolution(working.config);
            prior.sigma_abs = std::max(2.0, 8.0 * dr) / 3.0;
        }
        if (options.mono_prior_window_override) {
            prior.sigma_abs = *options.mono_prior_window_override / 3.0;
        }
        const auto grid = depth_search_grid(working.config, template_contour, prior);

        MatchedFilterOptions mf;
        mf.jobs = options.jobs;
        result.curve = matched_filter(working, template_contour, grid, mf);
        result.d_star = estimate_depth(result.curve, !options.strict_paper);
        result.sparse = sparse_point_cloud(result.curve, profile, result.span, result.d_star);

        if (options.fusion_enabled) {
            const auto aligned = align_absolute(contour, columns, result.d_star);
            const auto c_star = reject_outliers(aligned);
            result.dense = fuse(result.sparse, c_star, mask.object_id);
        } else {
            result.dense = fuse(result.sparse, {}, mask.object_id);
        }
        result.ok = true;
    } catch (const Error& e) {
        result.ok = false;
        result.error = e.what();
    }
    return result;
}

std::vector<ObjectResult> process_scene(const SceneArtifacts& artifacts,
                                        const PipelineOptions& options) {
    std::vector<ObjectResult> results;
    for (const auto& mask : artifacts.masks) {
        if (mask.cls == ObjectClass::Unknown) continue;  // unlabeled masks are context only
        results.push_back(process_object(artifacts, mask, options));
    }
    return results;
}

}  // namespace specbeam
