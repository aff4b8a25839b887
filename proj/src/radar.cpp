#include "specbeam/radar.hpp"

#include <cmath>
#include <random>

#include "specbeam/errors.hpp"
#include "specbeam/parallel.hpp"

namespace specbeam {

void RadarConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz must be > 0");
    if (num_samples < 2) throw ValidationError("num_samples must be >= 2");
    if (num_antennas < 1) throw ValidationError("num_antennas must be >= 1");
    if (!(element_spacing_wavelengths > 0.0)) {
        throw ValidationError("element_spacing_wavelengths must be > 0");
    }
    if (!(carrier_hz > 0.0)) throw ValidationError("carrier_hz must be > 0");
}

double range_resolution(const RadarConfig& cfg) {
    cfg.validate();
    return kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
}

double max_unambiguous_range(const RadarConfig& cfg) {
    return cfg.num_samples * range_resolution(cfg);
}

double azimuth_beamwidth(const RadarConfig& cfg) {
    cfg.validate();
    if (cfg.num_antennas < 2) {
        throw ValidationError("azimuth resolution undefined for a single antenna");
    }
    return 1.0 / (cfg.num_antennas * cfg.element_spacing_wavelengths);
}

RadarConfig preset_for_bucket(RangeBucket bucket) {
    RadarConfig cfg;
    switch (bucket) {
        case RangeBucket::Near: cfg.bandwidth_hz = kSpeedOfLight / (2.0 * 0.042); break;
        case RangeBucket::Mid:  cfg.bandwidth_hz = kSpeedOfLight / (2.0 * 0.116); break;
        case RangeBucket::Far:  cfg.bandwidth_hz = kSpeedOfLight / (2.0 * 0.178); break;
    }
    return cfg;
}

RangeBucket bucket_for_range(double range_m) {
    if (range_m < 20.0) return RangeBucket::Near;
    if (range_m < 60.0) return RangeBucket::Mid;
    return RangeBucket::Far;
}

std::string_view to_string(RangeBucket bucket) {
    switch (bucket) {
        case RangeBucket::Near: return "0-20m";
        case RangeBucket::Mid: return "20-60m";
        case RangeBucket::Far: return "60-90m";
    }
    return "?";
}

IQCube synthesize_points(std::span<const PointSource> points, const RadarConfig& cfg) {
    cfg.validate();
    IQCube cube(cfg);
    const int n_ant = cfg.num_antennas;
    const int n_smp = cfg.num_samples;
    const double f0 = cfg.carrier_hz;
    const double df = cfg.frequency_step();

    for (const auto& p : points) {
        if (!(p.z > 0.0)) {
            throw ValidationError("point source behind the array (z <= 0)");
        }
        const double d_center = std::hypot(p.x, p.z);
        const double amp = p.amplitude / std::pow(d_center, cfg.amplitude_exponent);
        for (int n = 0; n < n_ant; ++n) {
            const double d_elem = std::hypot(p.x - cfg.element_x(n), p.z);
            const double round_trip = d_center + d_elem;
            // phase(k) = -2 pi f_k round_trip / c, advanced by a per-sample
            // rotation so only one sincos pair is paid per (point, antenna)
            const double phi0 = -2.0 * kPi * f0 * round_trip / kSpeedOfLight;
            const double dphi = -2.0 * kPi * df * round_trip / kSpeedOfLight;
            std::complex<double> w(amp * std::cos(phi0), amp * std::sin(phi0));
            const std::complex<double> rot(std::cos(dphi), std::sin(dphi));
            auto* row = cube.data.data() + static_cast<std::size_t>(n) * n_smp;
            for (int k = 0; k < n_smp; ++k) {
                row[k] += w;
                w *= rot;
            }
        }
    }
    return cube;
}

void add_noise(IQCube& cube, double noise_power, std::uint64_t seed) {
    if (noise_power < 0.0) throw ValidationError("noise_power must be >= 0");
    if (noise_power == 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
    // canonical (n, k) order regardless of any caller-side parallelism
    for (auto& v : cube.data) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += std::complex<double>(re, im);
    }
}

IQCube synthesize_capture(const Scene& scene, const RadarConfig& cfg,
                          const Transform2& radar_pose, double lobe_exponent) {
    scene.validate();
    std::vector<PointSource> points;
    auto add = [&](const Scatterer& s, double orientation) {
        Vec2 p{s.x, s.z};
        if (!radar_pose.is_identity()) p = radar_pose.apply(p);
        if (!(p.z > 0.0)) {
            throw ValidationError("scatterer behind the array after pose transform (z <= 0)");
        }
        const double view = azimuth_of(p);
        const double sigma = effective_reflectivity(s, orientation, view, lobe_exponent);
        points.push_back({p.x, p.z, sigma});
    };
    for (const auto& obj : scene.objects) {
        for (const auto& s : obj.scatterers) add(s, obj.orientation);
    }
    for (const auto& s : scene.clutter) add(s, 0.0);

    IQCube cube = synthesize_points(points, cfg);
    add_noise(cube, scene.noise_power, cfg.rng_seed);
    return cube;
}

}  // namespace specbeam
