#pragma once

#include <array>
#include <cmath>

namespace specbeam {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Point or displacement in the 2-D working plane: x = cross-range, z = depth.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.z); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Azimuth of a point seen from the origin, measured from the +z axis,
/// positive toward +x.
inline double azimuth_of(Vec2 p) { return std::atan2(p.x, p.z); }

/// Proper rigid transform in the plane (rotation by `angle` then translation).
struct Transform2 {
    double angle = 0.0;  // radians
    Vec2 translation{};

    Vec2 apply(Vec2 p) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * p.x + s * p.z + translation.x,
                -s * p.x + c * p.z + translation.z};
    }

    Vec2 rotate(Vec2 p) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * p.x + s * p.z, -s * p.x + c * p.z};
    }

    Transform2 inverse() const {
        Transform2 inv;
        inv.angle = -angle;
        inv.translation = -1.0 * inv.rotate(translation);
        return inv;
    }

    bool is_identity() const { return angle == 0.0 && translation.x == 0.0 && translation.z == 0.0; }
};

}  // namespace specbeam
