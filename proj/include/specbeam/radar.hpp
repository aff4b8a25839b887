#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "specbeam/geometry.hpp"
#include "specbeam/scene.hpp"

namespace specbeam {

/// Stepped-frequency FMCW front end: K frequency samples spanning
/// bandwidth B from the carrier, received on a uniform linear array of N
/// virtual azimuth elements centered on the origin.
struct RadarConfig {
    double carrier_hz = 77e9;
    double bandwidth_hz = 4e9;
    int num_samples = 512;   // K
    int num_antennas = 86;   // N
    double element_spacing_wavelengths = 0.5;
    std::uint64_t rng_seed = 0;
    double amplitude_exponent = 1.0;  // per-point amplitude 1/d^e

    void validate() const;

    double wavelength() const { return kSpeedOfLight / carrier_hz; }
    double element_spacing_m() const { return element_spacing_wavelengths * wavelength(); }
    double element_x(int n) const {
        return (n - (num_antennas - 1) / 2.0) * element_spacing_m();
    }
    double frequency_step() const { return bandwidth_hz / (num_samples - 1); }
    double frequency(int k) const { return carrier_hz + k * frequency_step(); }
    /// Reference frequency for narrowband steering. The band center keeps
    /// the steered peak on the source azimuth across the swept band; the
    /// carrier alone squints by (B/2f0)*sin(theta).
    double steering_frequency() const { return carrier_hz + 0.5 * bandwidth_hz; }

    bool operator==(const RadarConfig&) const = default;
};

double range_resolution(const RadarConfig& cfg);       // c / 2B
double max_unambiguous_range(const RadarConfig& cfg);  // K * c / 2B
/// Broadside main-lobe width, lambda / (N * d). Throws for N < 2.
double azimuth_beamwidth(const RadarConfig& cfg);

/// Range/resolution presets mirroring the capture buckets: 4.2 cm at
/// 0-20 m, 11.6 cm at 20-60 m, 17.8 cm at 60-90 m.
enum class RangeBucket { Near, Mid, Far };
RadarConfig preset_for_bucket(RangeBucket bucket);
RangeBucket bucket_for_range(double range_m);
std::string_view to_string(RangeBucket bucket);

/// Complex channel measurements, row-major [antenna][frequency sample].
struct IQCube {
    RadarConfig config;
    std::vector<std::complex<double>> data;

    IQCube() = default;
    explicit IQCube(const RadarConfig& cfg)
        : config(cfg),
          data(static_cast<std::size_t>(cfg.num_antennas) * cfg.num_samples) {}

    std::complex<double>& at(int n, int k) {
        return data[static_cast<std::size_t>(n) * config.num_samples + k];
    }
    std::complex<double> at(int n, int k) const {
        return data[static_cast<std::size_t>(n) * config.num_samples + k];
    }
    std::span<const std::complex<double>> row(int n) const {
        return {data.data() + static_cast<std::size_t>(n) * config.num_samples,
                static_cast<std::size_t>(config.num_samples)};
    }
};

/// Ideal point source contributing amplitude/d^e with round-trip phase
/// 2*pi*f*(d + d_n)/c, d the distance to the array center and d_n the
/// distance to element n.
struct PointSource {
    double x = 0.0;
    double z = 0.0;
    double amplitude = 0.0;
};

/// Noiseless coherent sum of point contributions; the synthesis model
/// shared by the scene simulator and the object templates.
IQCube synthesize_points(std::span<const PointSource> points, const RadarConfig& cfg);

/// Adds the circularly-symmetric complex noise stream (variance
/// cfg... noise_power per sample) in canonical (n, k) order.
void add_noise(IQCube& cube, double noise_power, std::uint64_t seed);

/// Full scene capture: per-scatterer amplitudes from the specular lobe
/// model, clutter included, noise drawn from cfg.rng_seed. `radar_pose`
/// maps world coordinates into the radar frame (identity by default).
/// Throws if any scatterer lands at z <= 0 in the radar frame.
IQCube synthesize_capture(const Scene& scene, const RadarConfig& cfg,
                          const Transform2& radar_pose = {},
                          double lobe_exponent = kDefaultLobeExponent);

}  // namespace specbeam
