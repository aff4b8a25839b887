#pragma once

#include <span>
#include <vector>

#include "specbeam/specular.hpp"

namespace specbeam {

enum class DepthSource { Radar, MonoAligned };

struct DenseDepthEntry {
    double azimuth = 0.0;  // radians
    double depth = 0.0;    // meters
    DepthSource source = DepthSource::MonoAligned;
};

/// Fused per-azimuth-column depth of one object, at camera column
/// granularity. At most one entry per (azimuth bin, source).
struct DenseDepthImage {
    int object_id = -1;
    std::vector<DenseDepthEntry> entries;

    std::vector<Vec2> to_points() const;
};

/// Shifts the absolute monocular column depths so the anchor column (the
/// contour's dominant-weight column) lines up with the radar depth
/// estimate mapped to that column: delta = (d_star + rel(anchor)) -
/// mono(anchor). A constant monocular offset cancels exactly.
std::vector<DepthSample> align_absolute(const Contour& contour,
                                        std::span<const DepthSample> mono_columns,
                                        double d_star);

/// Drops azimuth bins whose pixel-count weight falls below tau * median
/// weight. Throws DegenerateObjectError if nothing survives.
std::vector<DepthSample> reject_outliers(std::span<const DepthSample> columns,
                                         double tau = 0.5);

/// Union of the radar sparse points (binned to the mono column grid,
/// source=Radar) and the filtered aligned columns (source=MonoAligned).
/// Where both land in a bin the radar entry is kept and the mono entry
/// dropped; radar collisions keep the strongest point.
DenseDepthImage fuse(const SparsePointCloud& sparse, std::span<const DepthSample> c_star,
                     int object_id);

}  // namespace specbeam
