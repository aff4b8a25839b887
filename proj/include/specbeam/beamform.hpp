#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "specbeam/radar.hpp"

namespace specbeam {

/// Half-open-free azimuth interval [lo, hi], radians.
struct AzimuthSpan {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double azimuth) const { return azimuth >= lo && azimuth <= hi; }
    double center() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool overlaps(const AzimuthSpan& other) const { return lo <= other.hi && other.lo <= hi; }
    double overlap_width(const AzimuthSpan& other) const;
};

/// Azimuth selector for peak searches: everything, inside a span, or its
/// complement.
struct Region {
    enum class Kind { Full, Inside, Outside };
    Kind kind = Kind::Full;
    AzimuthSpan span{};

    static Region full() { return {}; }
    static Region inside(AzimuthSpan s) { return {Kind::Inside, s}; }
    static Region outside(AzimuthSpan s) { return {Kind::Outside, s}; }
    bool contains(double azimuth) const;
};

/// Bartlett power over (range bin, azimuth bin). power is row-major
/// [range][azimuth]; range bin m sits at m * (c/2B) * (K-1)/K.
struct RadarProfile {
    RadarConfig config;
    int num_range_bins = 0;
    int num_azimuth_bins = 0;
    std::vector<double> power;
    std::vector<double> range_axis;    // meters
    std::vector<double> azimuth_axis;  // radians, strictly increasing

    double at(int m, int j) const {
        return power[static_cast<std::size_t>(m) * num_azimuth_bins + j];
    }
    double& at(int m, int j) {
        return power[static_cast<std::size_t>(m) * num_azimuth_bins + j];
    }
    double max_power() const;
    int nearest_range_bin(double range_m) const;
    int nearest_azimuth_bin(double azimuth_rad) const;
};

struct BeamformOptions {
    bool hann_window = false;       // rectangular by default: side lobes are the phenomenon under test
    bool wideband_steering = false; // per-bin steering weights
    int jobs = 0;
};

/// 0.2 degree steps over +-60 degrees; oversampled against the ~1.4 degree
/// beamwidth so subtraction can localize side lobes.
std::vector<double> default_azimuth_grid();

/// Steers with conjugate weights exp(-j 2 pi f_s x_n sin theta / c) at the
/// band-center reference, then an inverse DFT across frequency samples.
/// Grid must be strictly increasing within (-pi/2, pi/2) and non-empty.
RadarProfile beamform(const IQCube& iq, std::span<const double> azimuth_grid,
                      const BeamformOptions& options = {});

struct Peak {
    int range_bin = 0;
    int azimuth_bin = 0;
    double range = 0.0;    // m
    double azimuth = 0.0;  // rad
    double power = 0.0;
};

/// 8-neighborhood local maxima within the region with power >=
/// min_prominence * global max (global max over the whole profile).
/// Sorted by power descending; ties by (range_bin, azimuth_bin) ascending.
std::vector<Peak> find_peaks(const RadarProfile& profile, const Region& region,
                             double min_prominence = 0.05);

void write_profile_csv(const RadarProfile& profile, const std::filesystem::path& path);
/// 8-bit grayscale heatmap, log scaled with a 40 dB floor. Row 0 = range bin 0.
void write_profile_pgm(const RadarProfile& profile, const std::filesystem::path& path);

}  // namespace specbeam
