#include "specbeam/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <fftw3.h>

#include "specbeam/detail/fftw_lock.hpp"
#include "specbeam/errors.hpp"
#include "specbeam/parallel.hpp"
#include "specbeam/serial.hpp"

namespace specbeam {

namespace {

struct FftwPlan {
    fftw_plan plan = nullptr;
    ~FftwPlan() {
        if (plan) {
            std::lock_guard lock(detail::fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

}  // namespace

double AzimuthSpan::overlap_width(const AzimuthSpan& other) const {
    return std::max(0.0, std::min(hi, other.hi) - std::max(lo, other.lo));
}

bool Region::contains(double azimuth) const {
    switch (kind) {
        case Kind::Full: return true;
        case Kind::Inside: return span.contains(azimuth);
        case Kind::Outside: return !span.contains(azimuth);
    }
    return true;
}

double RadarProfile::max_power() const {
    double m = 0.0;
    for (double v : power) m = std::max(m, v);
    return m;
}

int RadarProfile::nearest_range_bin(double range_m) const {
    const double bin = range_axis.size() > 1 ? range_axis[1] - range_axis[0] : 1.0;
    const int m = static_cast<int>(std::lround(range_m / bin));
    return std::clamp(m, 0, num_range_bins - 1);
}

int RadarProfile::nearest_azimuth_bin(double azimuth_rad) const {
    int best = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < num_azimuth_bins; ++j) {
        const double d = std::abs(azimuth_axis[j] - azimuth_rad);
        if (d < dmin) {
            dmin = d;
            best = j;
        }
    }
    return best;
}

std::vector<double> default_azimuth_grid() {
    std::vector<double> grid;
    grid.reserve(601);
    for (int i = 0; i <= 600; ++i) {
        grid.push_back(deg2rad(-60.0 + 0.2 * i));
    }
    return grid;
}

RadarProfile beamform(const IQCube& iq, std::span<const double> azimuth_grid,
                      const BeamformOptions& options) {
    const RadarConfig& cfg = iq.config;
    cfg.validate();
    if (iq.data.size() != static_cast<std::size_t>(cfg.num_antennas) * cfg.num_samples) {
        throw ValidationError("IQ cube dimensions do not match its config");
    }
    if (azimuth_grid.empty()) throw ValidationError("azimuth grid is empty");
    for (std::size_t i = 0; i < azimuth_grid.size(); ++i) {
        if (std::abs(azimuth_grid[i]) >= kPi / 2) {
            throw ValidationError("azimuth grid must lie within (-pi/2, pi/2)");
        }
        if (i > 0 && !(azimuth_grid[i] > azimuth_grid[i - 1])) {
            throw ValidationError("azimuth grid must be strictly increasing");
        }
    }

    const int n_ant = cfg.num_antennas;
    const int n_smp = cfg.num_samples;
    const int n_az = static_cast<int>(azimuth_grid.size());
    const double fs = cfg.steering_frequency();

    std::vector<double> window;
    if (options.hann_window) {
        window.resize(n_smp);
        for (int k = 0; k < n_smp; ++k) {
            window[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * k / (n_smp - 1)));
        }
    }

    RadarProfile profile;
    profile.config = cfg;
    profile.num_range_bins = n_smp;
    profile.num_azimuth_bins = n_az;
    profile.power.assign(static_cast<std::size_t>(n_smp) * n_az, 0.0);
    const double bin_m = range_resolution(cfg) * (n_smp - 1) / n_smp;
    profile.range_axis.resize(n_smp);
    for (int m = 0; m < n_smp; ++m) profile.range_axis[m] = m * bin_m;
    profile.azimuth_axis.assign(azimuth_grid.begin(), azimuth_grid.end());

    FftwPlan plan;
    std::vector<std::complex<double>> dummy(n_smp);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan.plan = fftw_plan_dft_1d(n_smp, reinterpret_cast<fftw_complex*>(dummy.data()),
                                     reinterpret_cast<fftw_complex*>(dummy.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    parallel_for(static_cast<std::size_t>(n_az), options.jobs, [&](std::size_t begin, std::size_t end) {
        std::vector<std::complex<double>> steered(n_smp);
        for (std::size_t j = begin; j < end; ++j) {
            const double sin_th = std::sin(azimuth_grid[j]);
            std::fill(steered.begin(), steered.end(), std::complex<double>(0.0, 0.0));
            for (int n = 0; n < n_ant; ++n) {
                const double xn = cfg.element_x(n);
                const auto row = iq.row(n);
                if (!options.wideband_steering) {
                    const double phi = -2.0 * kPi * fs * xn * sin_th / kSpeedOfLight;
                    const double wr = std::cos(phi), wi = std::sin(phi);
                    for (int k = 0; k < n_smp; ++k) {
                        const double hr = row[k].real(), hi = row[k].imag();
                        steered[k] += std::complex<double>(wr * hr - wi * hi, wr * hi + wi * hr);
                    }
                } else {
                    // per-bin weights at each swept frequency
                    const double phi0 = -2.0 * kPi * cfg.carrier_hz * xn * sin_th / kSpeedOfLight;
                    const double dphi = -2.0 * kPi * cfg.frequency_step() * xn * sin_th / kSpeedOfLight;
                    std::complex<double> w(std::cos(phi0), std::sin(phi0));
                    const std::complex<double> rot(std::cos(dphi), std::sin(dphi));
                    for (int k = 0; k < n_smp; ++k) {
                        const double hr = row[k].real(), hi = row[k].imag();
                        steered[k] += std::complex<double>(w.real() * hr - w.imag() * hi,
                                                           w.real() * hi + w.imag() * hr);
                        w *= rot;
                    }
                }
            }
            if (options.hann_window) {
                for (int k = 0; k < n_smp; ++k) steered[k] *= window[k];
            }
            fftw_execute_dft(plan.plan, reinterpret_cast<fftw_complex*>(steered.data()),
                             reinterpret_cast<fftw_complex*>(steered.data()));
            for (int m = 0; m < n_smp; ++m) {
                profile.power[static_cast<std::size_t>(m) * n_az + j] = std::norm(steered[m]);
            }
        }
    });

    return profile;
}

std::vector<Peak> find_peaks(const RadarProfile& profile, const Region& region,
                             double min_prominence) {
    if (!(min_prominence > 0.0 && min_prominence <= 1.0)) {
        throw ValidationError("min_prominence must be in (0, 1]");
    }
    std::vector<char> selected(profile.num_azimuth_bins, 0);
    int n_selected = 0;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (region.contains(profile.azimuth_axis[j])) {
            selected[j] = 1;
            ++n_selected;
        }
    }
    if (n_selected == 0) throw ValidationError("peak search region selects no azimuth bins");

    const double threshold = min_prominence * profile.max_power();
    std::vector<Peak> peaks;
    for (int m = 0; m < profile.num_range_bins; ++m) {
        for (int j = 0; j < profile.num_azimuth_bins; ++j) {
            if (!selected[j]) continue;
            const double p = profile.at(m, j);
            if (!(p > 0.0) || p < threshold) continue;
            bool is_max = true;
            bool strictly_above_one = false;
            bool has_neighbor = false;
            for (int dm = -1; dm <= 1 && is_max; ++dm) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (dm == 0 && dj == 0) continue;
                    const int mm = m + dm, jj = j + dj;
                    if (mm < 0 || mm >= profile.num_range_bins || jj < 0 ||
                        jj >= profile.num_azimuth_bins) {
                        continue;
                    }
                    has_neighbor = true;
                    const double q = profile.at(mm, jj);
                    if (q > p) {
                        is_max = false;
                        break;
                    }
                    if (p > q) strictly_above_one = true;
                }
            }
            // a flat plateau spanning the whole neighborhood is not a peak
            if (is_max && (strictly_above_one || !has_neighbor)) {
                peaks.push_back({m, j, profile.range_axis[m], profile.azimuth_axis[j], p});
            }
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.power != b.power) return a.power > b.power;
        if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
        return a.azimuth_bin < b.azimuth_bin;
    });
    return peaks;
}

void write_profile_csv(const RadarProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write profile CSV: " + path.string());
    out << "range_m";
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        out << ',' << format_double(rad2deg(profile.azimuth_axis[j]));
    }
    out << '\n';
    for (int m = 0; m < profile.num_range_bins; ++m) {
        out << format_double(profile.range_axis[m]);
        for (int j = 0; j < profile.num_azimuth_bins; ++j) {
            out << ',' << format_double(profile.at(m, j));
        }
        out << '\n';
    }
}

void write_profile_pgm(const RadarProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write profile PGM: " + path.string());
    const double pmax = profile.max_power();
    out << "P5\n" << profile.num_azimuth_bins << ' ' << profile.num_range_bins << "\n255\n";
    constexpr double kFloorDb = -40.0;
    for (int m = 0; m < profile.num_range_bins; ++m) {
        for (int j = 0; j < profile.num_azimuth_bins; ++j) {
            double db = kFloorDb;
            const double p = profile.at(m, j);
            if (p > 0.0 && pmax > 0.0) {
                db = std::clamp(10.0 * std::log10(p / pmax), kFloorDb, 0.0);
            }
            const auto byte = static_cast<unsigned char>(
                std::lround((db - kFloorDb) / (-kFloorDb) * 255.0));
            out.put(static_cast<char>(byte));
        }
    }
}

}  // namespace specbeam
