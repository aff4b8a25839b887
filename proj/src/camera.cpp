#include "specbeam/camera.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "specbeam/errors.hpp"
#include "specbeam/rng.hpp"

namespace specbeam {

namespace {

/// Nominal silhouette heights, meters; only the mask thickness profile
/// depends on these.
double nominal_height(ObjectClass cls) {
    switch (cls) {
        case ObjectClass::Car: return 1.5;
        case ObjectClass::Person: return 1.7;
        case ObjectClass::Sign: return 0.762;
        case ObjectClass::Unknown: return 1.0;
    }
    return 1.0;
}

struct Projection {
    int col_lo = 0, col_hi = 0;  // undilated, inclusive
    double z_med = 0.0;          // median camera depth, m
    std::vector<std::pair<double, double>> col_depth;  // (column, true depth) sorted
};

/// Projects one object; returns nothing if it lies fully outside the image.
std::optional<Projection> project_object(const SceneObject& obj, const CameraModel& cam) {
    std::vector<std::pair<double, double>> cd;
    std::vector<double> depths;
    for (const auto& s : obj.scatterers) {
        const Vec2 p = cam.to_camera({s.x, s.z});
        if (!(p.z > 0.0)) {
            throw ValidationError("object id " + std::to_string(obj.id) +
                                  " lies behind the camera plane");
        }
        cd.emplace_back(cam.column_of(p), p.z);
        depths.push_back(p.z);
    }
    std::sort(cd.begin(), cd.end());
    std::sort(depths.begin(), depths.end());
    const double z_med = depths[depths.size() / 2];
    const int lo = static_cast<int>(std::floor(cd.front().first));
    const int hi = static_cast<int>(std::floor(cd.back().first));
    if (hi < 0 || lo >= cam.image_width) return std::nullopt;
    Projection pr;
    pr.col_lo = std::max(lo, 0);
    pr.col_hi = std::min(hi, cam.image_width - 1);
    pr.z_med = z_med;
    pr.col_depth = std::move(cd);
    return pr;
}

/// Ground-truth depth at a real-valued column: linear interpolation between
/// projected scatterers, clamped at the ends.
double depth_at_column(const Projection& pr, double col) {
    const auto& cd = pr.col_depth;
    if (col <= cd.front().first) return cd.front().second;
    if (col >= cd.back().first) return cd.back().second;
    for (std::size_t i = 1; i < cd.size(); ++i) {
        if (col <= cd[i].first) {
            const double c0 = cd[i - 1].first, c1 = cd[i].first;
            const double t = c1 > c0 ? (col - c0) / (c1 - c0) : 0.0;
            return cd[i - 1].second + t * (cd[i].second - cd[i - 1].second);
        }
    }
    return cd.back().second;
}

std::vector<int> silhouette_rows(const CameraModel& cam, ObjectClass cls, double z_med,
                                 int width) {
    const double h_px = std::min<double>(cam.focal_px * nominal_height(cls) / z_med,
                                         cam.image_height);
    std::vector<int> rows(width);
    for (int i = 0; i < width; ++i) {
        // semi-elliptical thickness: full in the middle, falling off at the
        // edges the way real silhouettes do
        const double u = width > 1 ? 2.0 * i / (width - 1) - 1.0 : 0.0;
        rows[i] = std::max(1, static_cast<int>(std::lround(h_px * std::sqrt(std::max(0.0, 1.0 - u * u)))));
    }
    return rows;
}

}  // namespace

void CameraModel::validate() const {
    if (!(focal_px > 0.0)) throw ValidationError("focal_px must be > 0");
    if (image_width < 1 || image_height < 1) {
        throw ValidationError("image dimensions must be >= 1");
    }
}

std::vector<SegmentationMask> render_masks(const Scene& scene, const CameraModel& cam,
                                           const OracleParams& params) {
    cam.validate();
    struct Entry {
        const SceneObject* obj;
        Projection pr;
    };
    std::vector<Entry> entries;
    for (const auto& obj : scene.objects) {
        if (auto pr = project_object(obj, cam)) {
            entries.push_back({&obj, std::move(*pr)});
        }
    }

    std::vector<SegmentationMask> masks;
    for (const auto& e : entries) {
        SegmentationMask mask;
        mask.object_id = e.obj->id;
        mask.cls = e.obj->cls;
        mask.col_min = std::max(0, e.pr.col_lo - params.mask_dilation_px);
        mask.col_max = std::min(cam.image_width - 1, e.pr.col_hi + params.mask_dilation_px);
        mask.rows_per_column = silhouette_rows(cam, e.obj->cls, e.pr.z_med, mask.width());

        // column coverage by strictly nearer objects
        int covered = 0;
        for (int col = e.pr.col_lo; col <= e.pr.col_hi; ++col) {
            bool hit = false;
            for (const auto& other : entries) {
                if (other.obj == e.obj || other.pr.z_med >= e.pr.z_med) continue;
                if (col >= other.pr.col_lo && col <= other.pr.col_hi) {
                    hit = true;
                    break;
                }
            }
            covered += hit;
        }
        const int own = e.pr.col_hi - e.pr.col_lo + 1;
        if (covered == 0) {
            mask.confidence = 0.95;
        } else if (covered < own) {
            mask.confidence = 0.45;  // partially covered
        } else {
            mask.confidence = 0.10;  // fully covered in camera view
        }
        masks.push_back(std::move(mask));
    }
    return masks;
}

MonocularDepthMap render_monocular(const Scene& scene, const CameraModel& cam,
                                   std::uint64_t seed, const OracleParams& params) {
    cam.validate();
    MonocularDepthMap map;
    map.width = cam.image_width;
    map.height = cam.image_height;
    map.params = params;
    map.depth.assign(static_cast<std::size_t>(map.width) * map.height,
                     std::numeric_limits<double>::quiet_NaN());

    // far to near so nearer objects overwrite in overlaps
    std::vector<const SceneObject*> order;
    for (const auto& obj : scene.objects) order.push_back(&obj);
    std::sort(order.begin(), order.end(), [&](const SceneObject* a, const SceneObject* b) {
        return a->centroid().z > b->centroid().z;
    });

    for (const SceneObject* obj : order) {
        auto prOpt = project_object(*obj, cam);
        if (!prOpt) continue;
        const Projection& pr = *prOpt;
        const int col_min = std::max(0, pr.col_lo - params.mask_dilation_px);
        const int col_max = std::min(cam.image_width - 1, pr.col_hi + params.mask_dilation_px);
        const int width = col_max - col_min + 1;
        const auto rows = silhouette_rows(cam, obj->cls, pr.z_med, width);

        // one absolute offset per object, scaling linearly with range
        auto abs_rng = substream_rng(seed, "mono_abs", static_cast<std::uint64_t>(obj->id));
        const double sigma_abs = params.sigma_abs_at_60m * pr.z_med / 60.0;
        std::normal_distribution<double> abs_gauss(0.0, sigma_abs);
        const double offset = sigma_abs > 0.0 ? abs_gauss(abs_rng) : 0.0;

        auto px_rng = substream_rng(seed, "mono_px", static_cast<std::uint64_t>(obj->id));
        std::normal_distribution<double> px_gauss(0.0, 1.0);
        const int edge_cols = static_cast<int>(std::ceil(params.edge_fraction * width));

        for (int i = 0; i < width; ++i) {
            const int col = col_min + i;
            const double truth = depth_at_column(pr, col + 0.5);
            const bool edge = i < edge_cols || i >= width - edge_cols;
            const double sigma_px =
                params.relative_noise_sigma * (edge ? params.edge_noise_multiplier : 1.0);
            const int cnt = rows[i];
            const int r0 = std::max(0, (cam.image_height - cnt) / 2);
            const int r1 = std::min(cam.image_height, r0 + cnt);
            for (int r = r0; r < r1; ++r) {
                const double noise = sigma_px > 0.0 ? sigma_px * px_gauss(px_rng) : 0.0;
                map.at(r, col) = std::max(1e-3, truth + offset + noise);
            }
        }
    }
    return map;
}

void CalibrationTransform::validate() const {
    // angle parameterization is orthonormal with det +1 by construction;
    // nothing can go out of tolerance
}

AzimuthSpan mask_to_azimuth_span(const SegmentationMask& mask, const CameraModel& cam,
                                 const CalibrationTransform& calib, double nominal_depth) {
    cam.validate();
    if (!(nominal_depth > 0.0)) throw ValidationError("nominal_depth must be > 0");
    double col_lo = mask.col_min;
    double col_hi = mask.col_max;
    if (mask.col_max <= mask.col_min) {
        col_hi = col_lo + 1.0;  // degenerate mask widened to one pixel
    }
    auto to_radar_azimuth = [&](double col) {
        const double ang = std::atan((col - cam.image_width / 2.0) / cam.focal_px);
        const Vec2 cam_pt{nominal_depth * std::sin(ang), nominal_depth * std::cos(ang)};
        return azimuth_of(calib.apply(cam_pt));
    };
    double a = to_radar_azimuth(col_lo);
    double b = to_radar_azimuth(col_hi + 1.0);  // exclusive edge of the last column
    if (a > b) std::swap(a, b);
    return {a, b};
}

CalibrationFit estimate_calibration(
    std::span<const std::pair<Vec2, Vec2>> correspondences) {
    const std::size_t n = correspondences.size();
    if (n < 2) throw UnderdeterminedError("calibration needs at least 2 correspondences");

    Vec2 mean_a{}, mean_b{};
    for (const auto& [a, b] : correspondences) {
        mean_a = mean_a + a;
        mean_b = mean_b + b;
    }
    mean_a = (1.0 / n) * mean_a;
    mean_b = (1.0 / n) * mean_b;

    double d_sum = 0.0, c_sum = 0.0, spread = 0.0;
    for (const auto& [a, b] : correspondences) {
        const Vec2 ac = a - mean_a, bc = b - mean_b;
        d_sum += dot(ac, bc);
        c_sum += cross(ac, bc);
        spread += dot(ac, ac);
    }
    if (spread <= 0.0) {
        throw UnderdeterminedError("calibration correspondences are coincident");
    }

    CalibrationFit fit;
    fit.calibration.transform.angle = std::atan2(-c_sum, d_sum);
    const Vec2 rot_mean = fit.calibration.transform.rotate(mean_a);
    fit.calibration.transform.translation = mean_b - rot_mean;

    double ss = 0.0;
    for (const auto& [a, b] : correspondences) {
        const Vec2 r = fit.calibration.apply(a) - b;
        ss += dot(r, r);
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

}  // namespace specbeam
