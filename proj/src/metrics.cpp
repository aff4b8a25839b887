#include "specbeam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "specbeam/errors.hpp"
#include "specbeam/serial.hpp"

namespace specbeam {

namespace {

double median_inplace(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double directed_median(std::span<const Vec2> from, std::span<const Vec2> to) {
    std::vector<double> nn;
    nn.reserve(from.size());
    for (const Vec2& a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& b : to) best = std::min(best, distance(a, b));
        nn.push_back(best);
    }
    return median_inplace(nn);
}

}  // namespace

double modified_hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("modified Hausdorff distance needs non-empty point sets");
    }
    return std::min(directed_median(a, b), directed_median(b, a));
}

double depth_error(double d_star, double z_min, double z_max) {
    if (z_min > z_max) throw ValidationError("truth span must satisfy z_min <= z_max");
    if (d_star < z_min) return z_min - d_star;
    if (d_star > z_max) return d_star - z_max;
    return 0.0;
}

double naive_fusion_baseline(const RadarProfile& profile, const AzimuthSpan& span) {
    bool any = false;
    double best_power = 0.0;
    double best_range = 0.0;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (!span.contains(profile.azimuth_axis[j])) continue;
        any = true;
        for (int m = 0; m < profile.num_range_bins; ++m) {
            const double p = profile.at(m, j);
            if (p > best_power) {
                best_power = p;
                best_range = profile.range_axis[m];
            }
        }
    }
    if (!any) throw ValidationError("span selects no azimuth bins");
    if (!(best_power > 0.0)) throw NoDetectionError("span contains no power");
    return best_range;
}

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write metrics CSV: " + path.string());
    out << "scene_id,object_id,class,range_bucket,occlusion,method,depth_error_m,"
           "imaging_error_m,failed,note\n";
    for (const auto& r : rows) {
        out << r.scene_id << ',' << r.object_id << ',' << to_string(r.cls) << ','
            << to_string(r.bucket) << ',' << (r.occluded ? "PLOS" : "LOS") << ',' << r.method
            << ',' << format_double(r.depth_error_m) << ',' << format_double(r.imaging_error_m)
            << ',' << (r.failed ? 1 : 0) << ',' << r.note << '\n';
    }
}

}  // namespace specbeam
