#pragma once

#include <optional>
#include <span>
#include <vector>

#include "specbeam/beamform.hpp"
#include "specbeam/camera.hpp"
#include "specbeam/radar.hpp"

namespace specbeam {

/// Per-azimuth-column relative depth outline of an object. Relative depths
/// are normalized so the nearest column sits at 0; weights carry the pixel
/// support of each column.
struct ContourEntry {
    double azimuth = 0.0;         // radians, radar frame
    double relative_depth = 0.0;  // meters, min over entries == 0
    double weight = 1.0;          // > 0
};

struct Contour {
    enum class Source { Oracle, External };
    std::vector<ContourEntry> entries;
    Source source = Source::Oracle;

    void validate() const;
    AzimuthSpan span() const;
    double max_relative_depth() const;
    /// Column that dominated the template: weight argmax, ties toward the
    /// span center.
    std::size_t anchor_index() const;
    /// Merges adjacent columns down to at most max_entries (weights summed,
    /// azimuth/depth weight-averaged). Camera-granularity contours carry
    /// hundreds of columns; templates need far fewer than one per pixel.
    Contour decimated(std::size_t max_entries) const;
};

/// Absolute median depth and pixel support of one mask column, mapped to
/// its radar-frame azimuth.
struct DepthSample {
    double azimuth = 0.0;
    double depth = 0.0;   // meters, absolute
    double weight = 0.0;  // masked pixel count
};

/// Median masked depth per mask column, columns mapped through the
/// calibration at each column's own depth. Throws if mask and defined
/// depths share no pixel.
std::vector<DepthSample> masked_column_depths(const SegmentationMask& mask,
                                              const MonocularDepthMap& mono,
                                              const CameraModel& cam,
                                              const CalibrationTransform& calib);

/// Subtracts the minimum depth to produce the relative outline.
Contour contour_from_columns(std::span<const DepthSample> columns);

inline Contour get_shape_contour(const SegmentationMask& mask, const MonocularDepthMap& mono,
                                 const CameraModel& cam, const CalibrationTransform& calib) {
    return contour_from_columns(masked_column_depths(mask, mono, cam, calib));
}

/// Expected channel of the contour placed with its front surface at depth
/// d: entry m becomes a point source at range d + relative_depth_m along
/// its azimuth with amplitude weight_m / (d + relative_depth_m), zero
/// noise, same model as the front end. Throws if the far edge leaves the
/// unambiguous range.
IQCube shift_by_depth(const Contour& contour, double depth, const RadarConfig& cfg);

struct CorrelationCurve {
    std::vector<double> d_grid;  // strictly increasing, meters
    std::vector<double> values;  // >= 0
};

struct MatchedFilterOptions {
    /// |.| of the joint coherent sum by default; real part optionally.
    bool real_part = false;
    int jobs = 0;
};

/// P(d) = |<t_hat(d), h>| with t_hat the unit-energy template of the
/// contour at depth d. Grid step must be <= range_resolution / 4 and the
/// grid must stay within the unambiguous range. Dimensions of h must match
/// its config.
CorrelationCurve matched_filter(const IQCube& h, const Contour& contour,
                                std::span<const double> d_grid,
                                const MatchedFilterOptions& options = {});

struct DepthPrior {
    double depth = 0.0;      // meters
    double sigma_abs = 0.0;  // absolute-error scale at that depth
};

/// Search grid at range_resolution/4 steps: the full unambiguous range, or
/// prior.depth +- max(5 m, 3 sigma) when a monocular prior is given.
/// Clipped so the contour's far edge stays unambiguous.
std::vector<double> depth_search_grid(const RadarConfig& cfg, const Contour& contour,
                                      const std::optional<DepthPrior>& prior = std::nullopt);

/// argmax of the curve, ties toward smaller d, refined by parabolic
/// interpolation over the three points around an interior maximum unless
/// refine is false. Throws NoDetectionError on an all-zero curve.
double estimate_depth(const CorrelationCurve& curve, bool parabolic_refine = true);

struct SparsePoint {
    double x = 0.0;
    double z = 0.0;
    double power = 0.0;
};

struct SparsePointCloud {
    std::vector<SparsePoint> points;
};

/// Local maxima of P(d) within d_star +- window become depth candidates;
/// each candidate takes the in-span azimuth bins whose profile power at
/// that depth exceeds the in-span median. Falls back to a single anchor
/// point at (d_star, span center) when nothing qualifies. window <= 0
/// selects the default 4 * range_resolution.
SparsePointCloud sparse_point_cloud(const CorrelationCurve& curve, const RadarProfile& profile,
                                    const AzimuthSpan& span, double d_star,
                                    double window = 0.0);

}  // namespace specbeam
