#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "specbeam/geometry.hpp"

namespace specbeam {

enum class ObjectClass { Car, Person, Sign, Unknown };

std::string_view to_string(ObjectClass cls);
ObjectClass object_class_from_string(std::string_view name);

/// Point reflector in radar-frame meters. specularity 0 is isotropic,
/// 1 a pure broadside lobe.
struct Scatterer {
    double x = 0.0;            // cross-range, m
    double z = 0.0;            // depth, m, must be > 0
    double reflectivity = 1.0; // amplitude, >= 0
    double specularity = 0.0;  // in [0, 1]
};

struct SceneObject {
    int id = 0;
    ObjectClass cls = ObjectClass::Unknown;
    double orientation = 0.0;  // specular lobe axis, radians
    bool is_occluder = false;
    std::vector<Scatterer> scatterers;

    Vec2 centroid() const;
    /// [min, max] of scatterer ranges from the radar origin.
    std::pair<double, double> range_span() const;
};

struct Scene {
    std::vector<SceneObject> objects;
    std::vector<Scatterer> clutter;
    double noise_power = 0.0;  // complex-noise variance per sample

    const SceneObject& object_by_id(int id) const;
    void validate() const;  // throws ValidationError naming the bad field
};

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

/// FNV-1a of the canonical JSON serialization; stamped into capture headers.
std::string scene_hash(const Scene& scene);

inline constexpr double kDefaultLobeExponent = 8.0;

/// sigma * ((1-s) + s * max(0, cos(orientation - view_angle))^q).
/// Maximal at broadside (orientation == view_angle); continuous in the
/// view angle.
double effective_reflectivity(const Scatterer& s, double object_orientation,
                              double view_angle,
                              double lobe_exponent = kDefaultLobeExponent);

/// One azimuth bin of a ground-truth front surface.
struct TruthContourPoint {
    double azimuth = 0.0;  // bin center, radians
    double range = 0.0;    // minimum scatterer range in the bin, m
};

/// Front surface of object `id` over the given azimuth grid: per bin, the
/// minimum range among the object's scatterers whose azimuth falls in that
/// bin. Bins with no scatterer are absent. Throws on unknown id.
std::vector<TruthContourPoint> ground_truth_contour(const Scene& scene, int id,
                                                    std::span<const double> azimuth_grid);

}  // namespace specbeam
