#pragma once

#include <span>
#include <string>
#include <vector>

#include "specbeam/beamform.hpp"
#include "specbeam/geometry.hpp"
#include "specbeam/radar.hpp"
#include "specbeam/scene.hpp"

namespace specbeam {

/// min( median_a min_b d(a,b), median_b min_a d(b,a) ). The median of an
/// even-length list is the mean of the two central values. Throws on empty
/// input.
double modified_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b);

/// 0 inside [z_min, z_max], else distance to the nearest endpoint.
double depth_error(double d_star, double z_min, double z_max);

/// Range of the strongest in-span profile cell. Throws NoDetectionError on
/// an all-zero span.
double naive_fusion_baseline(const RadarProfile& profile, const AzimuthSpan& span);

struct MetricsRow {
    std::string scene_id;
    int object_id = -1;
    ObjectClass cls = ObjectClass::Unknown;
    RangeBucket bucket = RangeBucket::Near;
    bool occluded = false;  // LOS vs PLOS
    std::string method;     // metamoran | naive_fusion | mono
    double depth_error_m = 0.0;
    double imaging_error_m = 0.0;
    double runtime_s = 0.0;
    bool failed = false;
    std::string note;
};

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);

}  // namespace specbeam
