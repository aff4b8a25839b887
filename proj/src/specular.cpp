#include "specbeam/specular.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "specbeam/detail/fftw_lock.hpp"
#include "specbeam/errors.hpp"
#include "specbeam/parallel.hpp"

namespace specbeam {

namespace {

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void Contour::validate() const {
    if (entries.empty()) throw ValidationError("contour has no entries");
    double min_rel = std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
        if (!(e.weight > 0.0)) throw ValidationError("contour weights must be > 0");
        if (!(e.relative_depth >= -1e-9)) {
            throw ValidationError("contour relative depths must be >= 0");
        }
        min_rel = std::min(min_rel, e.relative_depth);
    }
    if (std::abs(min_rel) > 1e-9) {
        throw ValidationError("contour relative depths must be normalized to min 0");
    }
}

AzimuthSpan Contour::span() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& e : entries) {
        lo = std::min(lo, e.azimuth);
        hi = std::max(hi, e.azimuth);
    }
    return {lo, hi};
}

double Contour::max_relative_depth() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.relative_depth);
    return m;
}

std::size_t Contour::anchor_index() const {
    const double center = span().center();
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].weight > entries[best].weight) {
            best = i;
        } else if (entries[i].weight == entries[best].weight &&
                   std::abs(entries[i].azimuth - center) <
                       std::abs(entries[best].azimuth - center)) {
            best = i;
        }
    }
    return best;
}

Contour Contour::decimated(std::size_t max_entries) const {
    if (max_entries == 0 || entries.size() <= max_entries) return *this;
    Contour out;
    out.source = source;
    const std::size_t n = entries.size();
    double min_rel = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < max_entries; ++g) {
        const std::size_t b = g * n / max_entries;
        const std::size_t e = (g + 1) * n / max_entries;
        double w = 0.0, az = 0.0, rel = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            w += entries[i].weight;
            az += entries[i].weight * entries[i].azimuth;
            rel += entries[i].weight * entries[i].relative_depth;
        }
        out.entries.push_back({az / w, rel / w, w});
        min_rel = std::min(min_rel, rel / w);
    }
    for (auto& e : out.entries) e.relative_depth -= min_rel;
    return out;
}

std::vector<DepthSample> masked_column_depths(const SegmentationMask& mask,
                                              const MonocularDepthMap& mono,
                                              const CameraModel& cam,
                                              const CalibrationTransform& calib) {
    cam.validate();
    if (mask.col_min < 0 || mask.col_max >= mono.width || mask.col_max < mask.col_min) {
        throw ValidationError("mask columns lie outside the depth map");
    }
    std::vector<DepthSample> out;
    std::vector<double> depths;
    for (int col = mask.col_min; col <= mask.col_max; ++col) {
        const int i = col - mask.col_min;
        const int cnt = i < static_cast<int>(mask.rows_per_column.size())
                            ? mask.rows_per_column[i]
                            : mono.height;
        const int r0 = std::max(0, (mono.height - cnt) / 2);
        const int r1 = std::min(mono.height, r0 + cnt);
        depths.clear();
        for (int r = r0; r < r1; ++r) {
            if (mono.defined(r, col)) depths.push_back(mono.at(r, col));
        }
        if (depths.empty()) continue;
        const double med = median_of(depths);
        const double ang = cam.angle_of_column(col);
        const Vec2 radar_pt = calib.apply({med * std::sin(ang), med * std::cos(ang)});
        out.push_back({azimuth_of(radar_pt), med, static_cast<double>(depths.size())});
    }
    if (out.empty()) {
        throw ValidationError("mask and monocular depth map share no defined pixel");
    }
    std::sort(out.begin(), out.end(),
              [](const DepthSample& a, const DepthSample& b) { return a.azimuth < b.azimuth; });
    return out;
}

Contour contour_from_columns(std::span<const DepthSample> columns) {
    if (columns.empty()) throw ValidationError("no columns to build a contour from");
    double min_depth = std::numeric_limits<double>::infinity();
    for (const auto& c : columns) min_depth = std::min(min_depth, c.depth);
    Contour contour;
    contour.source = Contour::Source::Oracle;
    for (const auto& c : columns) {
        contour.entries.push_back({c.azimuth, c.depth - min_depth, c.weight});
    }
    std::sort(contour.entries.begin(), contour.entries.end(),
              [](const ContourEntry& a, const ContourEntry& b) { return a.azimuth < b.azimuth; });
    contour.validate();
    return contour;
}

IQCube shift_by_depth(const Contour& contour, double depth, const RadarConfig& cfg) {
    contour.validate();
    cfg.validate();
    if (!(depth > 0.0)) throw ValidationError("template depth must be > 0");
    if (depth + contour.max_relative_depth() >= max_unambiguous_range(cfg)) {
        throw ValidationError("template depth exceeds the unambiguous range");
    }
    std::vector<PointSource> points;
    points.reserve(contour.entries.size());
    for (const auto& e : contour.entries) {
        const double r = depth + e.relative_depth;
        points.push_back({r * std::sin(e.azimuth), r * std::cos(e.azimuth), e.weight});
    }
    return synthesize_points(points, cfg);
}

namespace {

/// Per-antenna band envelope S_n(rho) = sum_k h[n,k] e^{+j 2 pi k df rho/c},
/// sampled densely by a zero-padded inverse FFT so arbitrary round-trip
/// sums can be read off with cubic interpolation. The carrier phase is
/// applied exactly outside.
struct EnvelopeTable {
    int n_ant = 0;
    int length = 0;         // padded FFT size, power of two
    double rho_step = 0.0;  // meters of round-trip per sample
    std::vector<std::complex<double>> data;  // [antenna][length]

    std::complex<double> sample(int antenna, double rho) const {
        double u = rho / rho_step;
        u -= std::floor(u / length) * length;
        const int j = static_cast<int>(u);
        const double t = u - j;
        const auto* row = data.data() + static_cast<std::size_t>(antenna) * length;
        const int jm = (j - 1 + length) % length;
        const int j1 = (j + 1) % length;
        const int j2 = (j + 2) % length;
        const std::complex<double> y0 = row[jm], y1 = row[j], y2 = row[j1], y3 = row[j2];
        // Catmull-Rom
        const std::complex<double> a = y1;
        const std::complex<double> b = 0.5 * (y2 - y0);
        const std::complex<double> c = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
        const std::complex<double> d = 0.5 * (y3 - y0) + 1.5 * (y1 - y2);
        return a + t * (b + t * (c + t * d));
    }
};

EnvelopeTable build_envelope(const IQCube& h) {
    const RadarConfig& cfg = h.config;
    const int k_n = cfg.num_samples;
    int L = 1;
    while (L < 16 * k_n) L <<= 1;

    EnvelopeTable table;
    table.n_ant = cfg.num_antennas;
    table.length = L;
    table.rho_step = kSpeedOfLight / (cfg.frequency_step() * L);
    table.data.assign(static_cast<std::size_t>(cfg.num_antennas) * L, {0.0, 0.0});

    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(L, reinterpret_cast<fftw_complex*>(table.data.data()),
                                reinterpret_cast<fftw_complex*>(table.data.data()),
                                FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    for (int n = 0; n < cfg.num_antennas; ++n) {
        auto* row = table.data.data() + static_cast<std::size_t>(n) * L;
        const auto src = h.row(n);
        std::copy(src.begin(), src.end(), row);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(row),
                         reinterpret_cast<fftw_complex*>(row));
    }
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return table;
}

std::complex<double> carrier_phase(double cycles) {
    const double frac = cycles - std::floor(cycles);
    const double phi = 2.0 * kPi * frac;
    return {std::cos(phi), std::sin(phi)};
}

/// sum_k e^{j 2 pi f_k delta / c} in closed form (geometric series).
std::complex<double> band_sum(double delta, const RadarConfig& cfg) {
    const int K = cfg.num_samples;
    const double phi = 2.0 * kPi * cfg.frequency_step() * delta / kSpeedOfLight;
    const double half = 0.5 * phi;
    const double s = std::sin(half);
    double mag;
    if (std::abs(s) < 1e-12) {
        mag = K;
    } else {
        mag = std::sin(K * half) / s;
    }
    const double carrier_cycles = cfg.carrier_hz * delta / kSpeedOfLight;
    const std::complex<double> rot =
        carrier_phase(carrier_cycles) * carrier_phase((K - 1) * phi / (4.0 * kPi));
    return mag * rot;
}

struct TemplateGeometry {
    std::vector<double> px, pz, amp;  // per contour entry at this depth
};

TemplateGeometry geometry_at(const Contour& contour, double d) {
    TemplateGeometry g;
    const std::size_t m_n = contour.entries.size();
    g.px.resize(m_n);
    g.pz.resize(m_n);
    g.amp.resize(m_n);
    for (std::size_t m = 0; m < m_n; ++m) {
        const auto& e = contour.entries[m];
        const double r = d + e.relative_depth;
        g.px[m] = r * std::sin(e.azimuth);
        g.pz[m] = r * std::cos(e.azimuth);
        g.amp[m] = e.weight / r;
    }
    return g;
}

/// Exact ||t(d)||^2 via the closed-form band sum over entry pairs.
double template_energy(const Contour& contour, double d, const RadarConfig& cfg) {
    const TemplateGeometry g = geometry_at(contour, d);
    const std::size_t m_n = contour.entries.size();
    const int n_ant = cfg.num_antennas;
    const int K = cfg.num_samples;
    double energy = 0.0;
    std::vector<double> rho(m_n);
    for (int n = 0; n < n_ant; ++n) {
        const double xn = cfg.element_x(n);
        for (std::size_t m = 0; m < m_n; ++m) {
            const double d_elem = std::hypot(g.px[m] - xn, g.pz[m]);
            rho[m] = std::hypot(g.px[m], g.pz[m]) + d_elem;
        }
        for (std::size_t m = 0; m < m_n; ++m) {
            energy += g.amp[m] * g.amp[m] * K;
            for (std::size_t m2 = m + 1; m2 < m_n; ++m2) {
                const std::complex<double> cross = band_sum(rho[m] - rho[m2], cfg);
                energy += 2.0 * g.amp[m] * g.amp[m2] * cross.real();
            }
        }
    }
    return energy;
}

}  // namespace

CorrelationCurve matched_filter(const IQCube& h, const Contour& contour,
                                std::span<const double> d_grid,
                                const MatchedFilterOptions& options) {
    const RadarConfig& cfg = h.config;
    cfg.validate();
    contour.validate();
    if (h.data.size() != static_cast<std::size_t>(cfg.num_antennas) * cfg.num_samples) {
        throw ValidationError("channel dimensions do not match the radar config");
    }
    if (d_grid.empty()) throw ValidationError("depth grid is empty");
    const double max_rel = contour.max_relative_depth();
    const double max_range = max_unambiguous_range(cfg);
    const double max_step = range_resolution(cfg) / 4.0 + 1e-12;
    for (std::size_t i = 0; i < d_grid.size(); ++i) {
        if (!(d_grid[i] > 0.0) || d_grid[i] + max_rel >= max_range) {
            throw ValidationError("depth grid leaves the unambiguous range");
        }
        if (i > 0) {
            const double step = d_grid[i] - d_grid[i - 1];
            if (!(step > 0.0)) throw ValidationError("depth grid must be strictly increasing");
            if (step > max_step) {
                throw ValidationError("depth grid step must be <= range_resolution / 4");
            }
        }
    }

    const EnvelopeTable envelope = build_envelope(h);
    const std::size_t m_n = contour.entries.size();
    const int n_ant = cfg.num_antennas;

    CorrelationCurve curve;
    curve.d_grid.assign(d_grid.begin(), d_grid.end());
    curve.values.assign(d_grid.size(), 0.0);

    // Template energy is exact everywhere when cheap; for large contours it
    // is exact on a coarse stride and interpolated between (the energy is
    // very smooth in d: pairwise path differences are stationary to first
    // order under a common depth shift).
    const double exact_cost = static_cast<double>(m_n) * m_n * n_ant * d_grid.size();
    std::size_t stride = 1;
    if (exact_cost > 4e7 && d_grid.size() >= 8) {
        stride = std::min<std::size_t>(32, static_cast<std::size_t>(exact_cost / 4e7) + 1);
    }
    std::vector<double> energy(d_grid.size(), 0.0);
    {
        std::vector<std::size_t> knots;
        for (std::size_t i = 0; i < d_grid.size(); i += stride) knots.push_back(i);
        if (knots.back() != d_grid.size() - 1) knots.push_back(d_grid.size() - 1);
        std::vector<double> knot_energy(knots.size());
        parallel_for(knots.size(), options.jobs, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                knot_energy[i] = template_energy(contour, d_grid[knots[i]], cfg);
            }
        });
        if (stride == 1) {
            for (std::size_t i = 0; i < knots.size(); ++i) energy[knots[i]] = knot_energy[i];
        } else {
            // Catmull-Rom through the knots
            for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
                const std::size_t i0 = knots[seg], i1 = knots[seg + 1];
                const double y0 = knot_energy[seg > 0 ? seg - 1 : 0];
                const double y1 = knot_energy[seg];
                const double y2 = knot_energy[seg + 1];
                const double y3 = knot_energy[std::min(seg + 2, knots.size() - 1)];
                for (std::size_t i = i0; i <= i1; ++i) {
                    const double t = i1 > i0 ? static_cast<double>(i - i0) / (i1 - i0) : 0.0;
                    const double a = y1;
                    const double b = 0.5 * (y2 - y0);
                    const double c = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
                    const double d = 0.5 * (y3 - y0) + 1.5 * (y1 - y2);
                    energy[i] = a + t * (b + t * (c + t * d));
                }
            }
        }
    }

    const double f0 = cfg.carrier_hz;
    parallel_for(d_grid.size(), options.jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const TemplateGeometry g = geometry_at(contour, d_grid[i]);
            std::complex<double> acc(0.0, 0.0);
            for (std::size_t m = 0; m < m_n; ++m) {
                std::complex<double> inner(0.0, 0.0);
                for (int n = 0; n < n_ant; ++n) {
                    const double d_elem = std::hypot(g.px[m] - cfg.element_x(n), g.pz[m]);
                    const double rho = std::hypot(g.px[m], g.pz[m]) + d_elem;
                    inner += carrier_phase(f0 * rho / kSpeedOfLight) * envelope.sample(n, rho);
                }
                acc += g.amp[m] * inner;
            }
            const double nrm = std::sqrt(std::max(energy[i], 1e-300));
            const double v = options.real_part ? std::max(0.0, acc.real()) : std::abs(acc);
            curve.values[i] = v / nrm;
        }
    });

    return curve;
}

std::vector<double> depth_search_grid(const RadarConfig& cfg, const Contour& contour,
                                      const std::optional<DepthPrior>& prior) {
    cfg.validate();
    const double step = range_resolution(cfg) / 4.0;
    const double max_rel = contour.entries.empty() ? 0.0 : contour.max_relative_depth();
    const double lo_limit = step;
    const double hi_limit = max_unambiguous_range(cfg) - max_rel - step;
    if (hi_limit <= lo_limit) {
        throw ValidationError("contour depth extent leaves no unambiguous search range");
    }
    double lo = lo_limit, hi = hi_limit;
    if (prior) {
        const double half = std::max(5.0, 3.0 * prior->sigma_abs);
        lo = std::max(lo_limit, prior->depth - half);
        hi = std::min(hi_limit, prior->depth + half);
        if (hi <= lo) {  // prior fell outside the feasible range
            lo = lo_limit;
            hi = hi_limit;
        }
    }
    const auto count = static_cast<std::size_t>((hi - lo) / step) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
    return grid;
}

double estimate_depth(const CorrelationCurve& curve, bool parabolic_refine) {
    if (curve.d_grid.empty() || curve.d_grid.size() != curve.values.size()) {
        throw ValidationError("empty or inconsistent correlation curve");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.values.size(); ++i) {
        if (curve.values[i] > curve.values[best]) best = i;  // ties keep the smaller d
    }
    if (!(curve.values[best] > 0.0)) {
        throw NoDetectionError("correlation curve is identically zero");
    }
    double d = curve.d_grid[best];
    if (parabolic_refine && best > 0 && best + 1 < curve.values.size()) {
        const double y0 = curve.values[best - 1];
        const double y1 = curve.values[best];
        const double y2 = curve.values[best + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        if (denom < 0.0) {
            const double delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
            const double step = 0.5 * (curve.d_grid[best + 1] - curve.d_grid[best - 1]);
            d += delta * step;
        }
    }
    return d;
}

SparsePointCloud sparse_point_cloud(const CorrelationCurve& curve, const RadarProfile& profile,
                                    const AzimuthSpan& span, double d_star, double window) {
    if (curve.d_grid.empty()) throw ValidationError("empty correlation curve");
    const double w = window > 0.0 ? window : 4.0 * range_resolution(profile.config);

    std::vector<int> span_cols;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (span.contains(profile.azimuth_axis[j])) span_cols.push_back(j);
    }

    SparsePointCloud cloud;
    const std::size_t n = curve.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = curve.d_grid[i];
        if (d < d_star - w || d > d_star + w) continue;
        const double v = curve.values[i];
        if (!(v > 0.0)) continue;
        const bool up = i == 0 || curve.values[i - 1] <= v;
        const bool down = i + 1 == n || curve.values[i + 1] <= v;
        const bool strict = (i > 0 && curve.values[i - 1] < v) || (i + 1 < n && curve.values[i + 1] < v);
        if (!(up && down && strict)) continue;

        if (!span_cols.empty()) {
            const int row = profile.nearest_range_bin(d);
            std::vector<double> powers;
            powers.reserve(span_cols.size());
            for (int j : span_cols) powers.push_back(profile.at(row, j));
            const double med = median_of(powers);
            for (std::size_t c = 0; c < span_cols.size(); ++c) {
                if (powers[c] > med) {
                    const double az = profile.azimuth_axis[span_cols[c]];
                    cloud.points.push_back({d * std::sin(az), d * std::cos(az), powers[c]});
                }
            }
        }
    }
    if (cloud.points.empty()) {
        // anchor fallback: the depth estimate at the span center
        const double az = span.center();
        double p = 0.0;
        if (!span_cols.empty()) {
            p = profile.at(profile.nearest_range_bin(d_star), profile.nearest_azimuth_bin(az));
        }
        cloud.points.push_back({d_star * std::sin(az), d_star * std::cos(az), p});
    }
    return cloud;
}

}  // namespace specbeam
