#include "specbeam/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "specbeam/errors.hpp"

namespace specbeam {

namespace {

double weight_median(std::span<const DepthSample> columns) {
    std::vector<double> w;
    w.reserve(columns.size());
    for (const auto& c : columns) w.push_back(c.weight);
    std::sort(w.begin(), w.end());
    const std::size_t n = w.size();
    if (n % 2 == 1) return w[n / 2];
    return 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

}  // namespace

std::vector<Vec2> DenseDepthImage::to_points() const {
    std::vector<Vec2> pts;
    pts.reserve(entries.size());
    for (const auto& e : entries) {
        pts.push_back({e.depth * std::sin(e.azimuth), e.depth * std::cos(e.azimuth)});
    }
    return pts;
}

std::vector<DepthSample> align_absolute(const Contour& contour,
                                        std::span<const DepthSample> mono_columns,
                                        double d_star) {
    contour.validate();
    if (mono_columns.empty()) {
        throw ValidationError("no monocular columns overlap the contour");
    }
    const std::size_t anchor = contour.anchor_index();
    const double anchor_az = contour.entries[anchor].azimuth;

    // the anchor's own monocular depth: nearest column by azimuth
    std::size_t nearest = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mono_columns.size(); ++i) {
        const double d = std::abs(mono_columns[i].azimuth - anchor_az);
        if (d < dmin) {
            dmin = d;
            nearest = i;
        }
    }

    // map the front-surface estimate to the anchor column, then line the
    // monocular depths up with it; any constant monocular offset cancels
    const double delta =
        (d_star + contour.entries[anchor].relative_depth) - mono_columns[nearest].depth;
    std::vector<DepthSample> out(mono_columns.begin(), mono_columns.end());
    for (auto& c : out) c.depth += delta;
    return out;
}

std::vector<DepthSample> reject_outliers(std::span<const DepthSample> columns, double tau) {
    if (columns.empty()) throw ValidationError("no columns to filter");
    const double threshold = tau * weight_median(columns);
    std::vector<DepthSample> out;
    for (const auto& c : columns) {
        if (c.weight >= threshold) out.push_back(c);
    }
    if (out.empty()) {
        throw DegenerateObjectError("all azimuth bins rejected as outliers");
    }
    return out;
}

DenseDepthImage fuse(const SparsePointCloud& sparse, std::span<const DepthSample> c_star,
                     int object_id) {
    if (sparse.points.empty() && c_star.empty()) {
        throw ValidationError("nothing to fuse");
    }
    DenseDepthImage image;
    image.object_id = object_id;

    // bin grid = the camera column azimuths; radar points snap to the
    // nearest column, or stand alone when no columns exist
    std::vector<double> bins;
    bins.reserve(c_star.size());
    for (const auto& c : c_star) bins.push_back(c.azimuth);

    auto nearest_bin = [&bins](double az) -> std::ptrdiff_t {
        if (bins.empty()) return -1;
        const auto it = std::lower_bound(bins.begin(), bins.end(), az);
        if (it == bins.begin()) return 0;
        if (it == bins.end()) return static_cast<std::ptrdiff_t>(bins.size()) - 1;
        const auto prev = it - 1;
        return (az - *prev <= *it - az) ? prev - bins.begin() : it - bins.begin();
    };

    // radar entries first; strongest point wins a contested bin
    std::map<std::ptrdiff_t, std::pair<SparsePoint, double>> radar_bins;  // bin -> (point, az)
    std::vector<std::pair<double, SparsePoint>> radar_free;               // off-grid points
    for (const auto& p : sparse.points) {
        const double az = std::atan2(p.x, p.z);
        const std::ptrdiff_t bin = nearest_bin(az);
        if (bin < 0) {
            radar_free.emplace_back(az, p);
            continue;
        }
        auto it = radar_bins.find(bin);
        if (it == radar_bins.end() || p.power > it->second.first.power) {
            radar_bins[bin] = {p, bins[static_cast<std::size_t>(bin)]};
        }
    }
    for (const auto& [bin, entry] : radar_bins) {
        const auto& [p, az] = entry;
        image.entries.push_back({az, std::hypot(p.x, p.z), DepthSource::Radar});
    }
    std::sort(radar_free.begin(), radar_free.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double last_az = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [az, p] : radar_free) {
        if (az == last_az) continue;  // one radar entry per bin
        image.entries.push_back({az, std::hypot(p.x, p.z), DepthSource::Radar});
        last_az = az;
    }

    // aligned monocular columns fill every bin a radar point did not claim
    for (std::size_t i = 0; i < c_star.size(); ++i) {
        if (radar_bins.count(static_cast<std::ptrdiff_t>(i))) continue;
        image.entries.push_back({c_star[i].azimuth, c_star[i].depth, DepthSource::MonoAligned});
    }

    std::sort(image.entries.begin(), image.entries.end(),
              [](const DenseDepthEntry& a, const DenseDepthEntry& b) {
                  if (a.azimuth != b.azimuth) return a.azimuth < b.azimuth;
                  return a.source < b.source;
              });
    return image;
}

}  // namespace specbeam
