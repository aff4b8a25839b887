#pragma once

// Brute-force reference implementations, kept deliberately independent of
// the library's evaluation strategies: direct per-sample complex
// exponentials instead of phase recurrences, direct DFT sums instead of
// FFTs, full distance matrices instead of streaming minima.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "specbeam/beamform.hpp"
#include "specbeam/radar.hpp"
#include "specbeam/specular.hpp"

namespace oracles {

using specbeam::Contour;
using specbeam::IQCube;
using specbeam::kPi;
using specbeam::kSpeedOfLight;
using specbeam::PointSource;
using specbeam::RadarConfig;
using specbeam::Vec2;

inline IQCube synthesize(const std::vector<PointSource>& points, const RadarConfig& cfg) {
    IQCube cube(cfg);
    for (int n = 0; n < cfg.num_antennas; ++n) {
        for (int k = 0; k < cfg.num_samples; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (const auto& p : points) {
                const double d = std::hypot(p.x, p.z);
                const double dn = std::hypot(p.x - cfg.element_x(n), p.z);
                const double phase =
                    -2.0 * kPi * cfg.frequency(k) * (d + dn) / kSpeedOfLight;
                acc += (p.amplitude / std::pow(d, cfg.amplitude_exponent)) *
                       std::polar(1.0, phase);
            }
            cube.at(n, k) = acc;
        }
    }
    return cube;
}

/// Plain delay-and-sum power over (range bin, azimuth) by direct sums.
inline std::vector<std::vector<double>> beamform_power(const IQCube& iq,
                                                       const std::vector<double>& az_grid) {
    const RadarConfig& cfg = iq.config;
    const double fs = cfg.steering_frequency();
    std::vector<std::vector<double>> power(
        cfg.num_samples, std::vector<double>(az_grid.size(), 0.0));
    for (std::size_t j = 0; j < az_grid.size(); ++j) {
        std::vector<std::complex<double>> steered(cfg.num_samples, {0.0, 0.0});
        for (int n = 0; n < cfg.num_antennas; ++n) {
            const std::complex<double> w = std::polar(
                1.0, -2.0 * kPi * fs * cfg.element_x(n) * std::sin(az_grid[j]) / kSpeedOfLight);
            for (int k = 0; k < cfg.num_samples; ++k) steered[k] += w * iq.at(n, k);
        }
        for (int m = 0; m < cfg.num_samples; ++m) {
            std::complex<double> acc(0.0, 0.0);
            for (int k = 0; k < cfg.num_samples; ++k) {
                acc += steered[k] *
                       std::polar(1.0, 2.0 * kPi * k * m / static_cast<double>(cfg.num_samples));
            }
            power[m][j] = std::norm(acc);
        }
    }
    return power;
}

inline IQCube shift_template(const Contour& contour, double d, const RadarConfig& cfg) {
    std::vector<PointSource> points;
    for (const auto& e : contour.entries) {
        const double r = d + e.relative_depth;
        points.push_back({r * std::sin(e.azimuth), r * std::cos(e.azimuth), e.weight});
    }
    return synthesize(points, cfg);
}

/// P(d) with the template built point by point and normalized by its
/// exact Frobenius energy.
inline std::vector<double> matched_filter(const IQCube& h, const Contour& contour,
                                          const std::vector<double>& d_grid) {
    std::vector<double> out;
    out.reserve(d_grid.size());
    for (double d : d_grid) {
        const IQCube t = shift_template(contour, d, h.config);
        std::complex<double> num(0.0, 0.0);
        double energy = 0.0;
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            num += std::conj(t.data[i]) * h.data[i];
            energy += std::norm(t.data[i]);
        }
        out.push_back(std::abs(num) / std::sqrt(energy));
    }
    return out;
}

/// Modified Hausdorff via the full pairwise distance matrix.
inline double modified_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    std::vector<std::vector<double>> dist(a.size(), std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            dist[i][j] = std::hypot(a[i].x - b[j].x, a[i].z - b[j].z);
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab.push_back(*std::min_element(dist[i].begin(), dist[i].end()));
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        double best = dist[0][j];
        for (std::size_t i = 1; i < a.size(); ++i) best = std::min(best, dist[i][j]);
        ba.push_back(best);
    }
    return std::min(median(ab), median(ba));
}

}  // namespace oracles
