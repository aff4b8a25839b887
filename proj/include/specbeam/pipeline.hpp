#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specbeam/camera.hpp"
#include "specbeam/fusion.hpp"
#include "specbeam/resilience.hpp"
#include "specbeam/specular.hpp"

namespace specbeam {

struct PipelineOptions {
    bool declutter_enabled = true;
    bool fusion_enabled = true;
    /// Disables every extension beyond the plain algorithm: parabolic
    /// depth refinement in particular.
    bool strict_paper = false;
    double min_prominence = 0.05;
    double rss_margin = 2.0;
    std::size_t template_max_columns = 48;
    std::optional<double> mono_prior_window_override;  // meters, half-width
    OracleParams oracle;
    BeamformOptions beamform;
    int jobs = 0;
};

/// Simulator outputs for one scene: exactly what the processing side would
/// read from files.
struct SceneArtifacts {
    IQCube iq;
    std::vector<SegmentationMask> masks;
    MonocularDepthMap mono;
    CameraModel camera;
    CalibrationTransform calibration;
};

SceneArtifacts simulate_scene(const Scene& scene, const RadarConfig& cfg,
                              const CameraModel& cam, std::uint64_t seed,
                              const OracleParams& params = {},
                              const CalibrationTransform& calib = {});

struct ObjectResult {
    int object_id = -1;
    ObjectClass cls = ObjectClass::Unknown;
    AzimuthSpan span{};
    double d_star = 0.0;
    CorrelationCurve curve;
    SparsePointCloud sparse;
    DenseDepthImage dense;
    DeclutterReport declutter;
    OcclusionDecision occlusion;
    bool ok = false;
    std::string error;
};

/// Full per-object chain: span from the mask, beamform, declutter,
/// occlusion rule, matched filter over the monocular prior window, sparse
/// cloud, fusion. Failures are captured in the result, not thrown.
ObjectResult process_object(const SceneArtifacts& artifacts, const SegmentationMask& mask,
                            const PipelineOptions& options = {});

std::vector<ObjectResult> process_scene(const SceneArtifacts& artifacts,
                                        const PipelineOptions& options = {});

}  // namespace specbeam
