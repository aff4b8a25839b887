#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "specbeam/beamform.hpp"
#include "specbeam/geometry.hpp"
#include "specbeam/scene.hpp"

namespace specbeam {

/// Pinhole camera over the (x, z) plane. `pose` maps world points into the
/// camera frame. Default geometry gives a ~0.028 degree per-pixel quantum
/// and a 90 degree field of view.
struct CameraModel {
    double focal_px = 2048.0;
    int image_width = 4096;
    int image_height = 512;
    Transform2 pose{};  // camera <- world

    void validate() const;
    Vec2 to_camera(Vec2 world) const { return pose.apply(world); }
    /// Real-valued pixel column of a camera-frame point (z > 0).
    double column_of(Vec2 cam) const { return focal_px * (cam.x / cam.z) + image_width / 2.0; }
    /// Camera-frame ray angle of a pixel column center.
    double angle_of_column(double col) const {
        return std::atan((col + 0.5 - image_width / 2.0) / focal_px);
    }
    double fov() const { return 2.0 * std::atan(image_width / (2.0 * focal_px)); }
    double pixel_angle() const { return std::atan(1.0 / focal_px); }
};

/// Instance mask: contiguous column interval plus a per-column pixel count
/// (the silhouette thickness used as a fusion weight downstream).
struct SegmentationMask {
    int object_id = -1;
    ObjectClass cls = ObjectClass::Unknown;
    double confidence = 1.0;  // < 0.5 flags (partially) covered objects
    int col_min = 0;
    int col_max = 0;  // inclusive
    std::vector<int> rows_per_column;

    int width() const { return col_max - col_min + 1; }
};

/// Knobs standing in for the learned front ends.
struct OracleParams {
    int mask_dilation_px = 2;
    /// Absolute-offset scale: one draw per object ~ N(0, sigma_abs * z/60).
    /// Default puts |offset| at 19.5 m for a 60 m object at the 90th
    /// percentile.
    double sigma_abs_at_60m = 19.5 / 1.645;
    double relative_noise_sigma = 0.2;  // per-pixel, m
    double edge_fraction = 0.10;        // outer mask columns treated as edges
    double edge_noise_multiplier = 3.0; // edge columns get this much more noise
};

/// Per-object masks from projected scatterer columns (convex hull of the
/// columns, dilated). Objects whose column interval is covered by nearer
/// objects are flagged with confidence < 0.5; objects outside the image
/// are absent. Throws if an object sits behind the camera plane.
std::vector<SegmentationMask> render_masks(const Scene& scene, const CameraModel& cam,
                                           const OracleParams& params = {});

/// Dense per-pixel depth, NaN where undefined.
struct MonocularDepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> depth;
    OracleParams params;

    double at(int row, int col) const {
        return depth[static_cast<std::size_t>(row) * width + col];
    }
    double& at(int row, int col) {
        return depth[static_cast<std::size_t>(row) * width + col];
    }
    bool defined(int row, int col) const { return std::isfinite(at(row, col)); }
};

/// Ground-truth depths corrupted with the parametric error model: one
/// absolute offset per object scaling linearly with range, per-pixel
/// relative noise, and 3x noise on edge columns. Object RNG streams are
/// keyed by (seed, object id) so evaluation order cannot change draws.
MonocularDepthMap render_monocular(const Scene& scene, const CameraModel& cam,
                                   std::uint64_t seed, const OracleParams& params = {});

/// Proper rigid map from camera frame to radar frame.
struct CalibrationTransform {
    Transform2 transform{};  // radar <- camera

    Vec2 apply(Vec2 cam) const { return transform.apply(cam); }
    static CalibrationTransform identity() { return {}; }
    /// Rotation orthonormality / determinant check (always true for the
    /// angle parameterization; kept for external inputs).
    void validate() const;
};

/// Radar-frame azimuth interval subtended by the mask columns, evaluated
/// at a nominal object depth (the calibration translation shifts rays, so
/// the span depends on range). Single-column masks widen to one pixel.
AzimuthSpan mask_to_azimuth_span(const SegmentationMask& mask, const CameraModel& cam,
                                 const CalibrationTransform& calib, double nominal_depth);

struct CalibrationFit {
    CalibrationTransform calibration;
    double residual_rms = 0.0;
};

/// Least-squares Euclidean fit (orthogonal Procrustes with translation)
/// from camera-frame points to radar-frame points. Throws
/// UnderdeterminedError for fewer than two distinct points.
CalibrationFit estimate_calibration(
    std::span<const std::pair<Vec2, Vec2>> correspondences);

}  // namespace specbeam
