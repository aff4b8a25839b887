#pragma once

// Canonical synthetic objects used across the test and acceptance suites.
// The RSS coefficient table in resilience.cpp was calibrated against these
// geometries at 10 m; change them together.

#include <cmath>

#include "specbeam/beamform.hpp"
#include "specbeam/experiment.hpp"
#include "specbeam/scene.hpp"

namespace fixtures {

using specbeam::ObjectClass;
using specbeam::Scatterer;
using specbeam::Scene;
using specbeam::SceneObject;

inline SceneObject make_car(int id, double z_center, double x_center = 0.0) {
    SceneObject obj;
    obj.id = id;
    obj.cls = ObjectClass::Car;
    for (int i = 0; i < 12; ++i) {
        const double x = -1.8 + 3.6 * i / 11.0;
        const double z = z_center + 0.3 * std::abs(x) / 1.8;  // gently curved front
        obj.scatterers.push_back({x_center + x, z, 1.0, 0.6});
    }
    return obj;
}

/// Front bumper at z_center, rear corner 2 m deeper: the ramped profile
/// the intra-object fusion tests lean on.
inline SceneObject make_angled_car(int id, double z_center, double x_center = 0.0,
                                   double ramp = 2.0) {
    SceneObject obj;
    obj.id = id;
    obj.cls = ObjectClass::Car;
    for (int i = 0; i < 12; ++i) {
        const double x = -1.8 + 3.6 * i / 11.0;
        const double z = z_center + ramp * (x + 1.8) / 3.6;
        obj.scatterers.push_back({x_center + x, z, 1.0, 0.3});
    }
    return obj;
}

inline SceneObject make_person(int id, double z_center, double x_center = 0.0) {
    static constexpr double kJitter[8] = {0.02, 0.07, 0.0, 0.12, 0.05, 0.10, 0.01, 0.08};
    SceneObject obj;
    obj.id = id;
    obj.cls = ObjectClass::Person;
    for (int i = 0; i < 8; ++i) {
        const double x = -0.25 + 0.5 * i / 7.0;
        obj.scatterers.push_back({x_center + x, z_center + kJitter[i], 0.35, 0.2});
    }
    return obj;
}

inline SceneObject make_sign(int id, double z_center, double x_center = 0.0) {
    SceneObject obj;
    obj.id = id;
    obj.cls = ObjectClass::Sign;
    for (int i = 0; i < 4; ++i) {
        const double x = -0.381 + 0.762 * i / 3.0;
        obj.scatterers.push_back({x_center + x, z_center, 0.25, 0.9});
    }
    return obj;
}

/// Unlabeled obstruction (a cart): strong enough that a first-peak rule
/// latches onto it.
inline SceneObject make_cart(int id, double z_center, double x_center = 0.0) {
    SceneObject obj;
    obj.id = id;
    obj.cls = ObjectClass::Unknown;
    obj.is_occluder = true;
    for (int i = 0; i < 6; ++i) {
        const double x = -0.45 + 0.9 * i / 5.0;
        obj.scatterers.push_back({x_center + x, z_center + 0.05 * (i % 2), 0.8, 0.2});
    }
    return obj;
}

inline Scene single_object_scene(SceneObject obj, double noise_power = 0.0) {
    Scene scene;
    scene.objects.push_back(std::move(obj));
    scene.noise_power = noise_power;
    return scene;
}

/// Point interferer whose beamformed peak sits `power_db` above the peak of
/// `base` under `cfg` (amplitude solved from a one-off noiseless render).
inline Scatterer make_interferer(const Scene& base, const specbeam::RadarConfig& cfg,
                                 double range_m, double azimuth_rad, double power_db) {
    const double target_peak = specbeam::noiseless_peak_power(base, cfg);
    Scene probe;
    probe.clutter.push_back(
        {range_m * std::sin(azimuth_rad), range_m * std::cos(azimuth_rad), 1.0, 0.0});
    const double unit_peak = specbeam::noiseless_peak_power(probe, cfg);
    const double sigma = std::sqrt(target_peak * std::pow(10.0, power_db / 10.0) / unit_peak);
    return {range_m * std::sin(azimuth_rad), range_m * std::cos(azimuth_rad), sigma, 0.0};
}

}  // namespace fixtures
