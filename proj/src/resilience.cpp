#include "specbeam/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specbeam/errors.hpp"

namespace specbeam {

namespace {

/// Parabolic vertex refinement of a peak along one profile axis.
double refine_axis(double y0, double y1, double y2, double x0, double step) {
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom >= 0.0) return x0;
    const double delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
    return x0 + delta * step;
}

/// Cell-wise maximum power over azimuth bins outside the span.
double out_of_span_max(const RadarProfile& profile, const AzimuthSpan& span) {
    double m = 0.0;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (span.contains(profile.azimuth_axis[j])) continue;
        for (int r = 0; r < profile.num_range_bins; ++r) {
            m = std::max(m, profile.at(r, j));
        }
    }
    return m;
}

/// Strongest in-span power within +-1 range bin of `range_bin`; used to
/// spot out-of-span peaks that are really side lobes of an in-span main
/// lobe.
double in_span_power_near_range(const RadarProfile& profile, const AzimuthSpan& span,
                                int range_bin) {
    double m = 0.0;
    for (int r = std::max(0, range_bin - 1);
         r <= std::min(profile.num_range_bins - 1, range_bin + 1); ++r) {
        for (int j = 0; j < profile.num_azimuth_bins; ++j) {
            if (span.contains(profile.azimuth_axis[j])) m = std::max(m, profile.at(r, j));
        }
    }
    return m;
}

}  // namespace

double rss_coefficient(ObjectClass cls) {
    // A_c = sqrt(peak profile power) * 10 for the canonical class fixture
    // alone, broadside and on-axis at 10 m, default 4 GHz / 86x512 config
    // and the default azimuth grid. Regenerated by the rss_calibration
    // unit test; update these together with the fixture geometry.
    switch (cls) {
        case ObjectClass::Car: return 2.2967231013e6;
        case ObjectClass::Person: return 6.1295296683e5;
        case ObjectClass::Sign: return 2.6107569110e5;
        case ObjectClass::Unknown: break;
    }
    throw ValidationError("no RSS coefficient for class Unknown");
}

double rss_upper_bound(ObjectClass cls, double distance_m, double margin) {
    if (!(distance_m > 0.0)) throw ValidationError("distance must be > 0");
    if (cls == ObjectClass::Unknown) return std::numeric_limits<double>::infinity();
    const double a = rss_coefficient(cls) / distance_m;
    return a * a * margin;
}

void subtract_point(IQCube& iq, double range_m, double azimuth_rad) {
    const PointSource point{range_m * std::sin(azimuth_rad), range_m * std::cos(azimuth_rad),
                            1.0};
    const IQCube t = synthesize_points({&point, 1}, iq.config);
    std::complex<double> num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < iq.data.size(); ++i) {
        num += std::conj(t.data[i]) * iq.data[i];
        den += std::norm(t.data[i]);
    }
    if (den <= 0.0) return;
    const std::complex<double> alpha = num / den;
    for (std::size_t i = 0; i < iq.data.size(); ++i) {
        iq.data[i] -= alpha * t.data[i];
    }
}

DeclutterResult declutter(const IQCube& iq, const RadarProfile& profile,
                          const AzimuthSpan& span, ObjectClass target_class,
                          const DeclutterOptions& options) {
    if (span.lo < profile.azimuth_axis.front() || span.hi > profile.azimuth_axis.back()) {
        throw ValidationError("span lies outside the profile azimuth axis");
    }

    DeclutterResult result{iq, profile, {}};
    DeclutterReport& report = result.report;
    const double bin_m = profile.num_range_bins > 1
                             ? profile.range_axis[1] - profile.range_axis[0]
                             : range_resolution(iq.config);
    const double az_step = profile.num_azimuth_bins > 1
                               ? profile.azimuth_axis[1] - profile.azimuth_axis[0]
                               : 0.0;

    double prev_oos = out_of_span_max(result.profile, span);
    report.out_of_span_max_history.push_back(prev_oos);

    while (report.iterations < options.max_iterations) {
        const auto peaks = find_peaks(result.profile, Region::full(), options.min_prominence);
        const Peak* candidate = nullptr;
        for (const auto& p : peaks) {  // sorted by power descending
            const double bound =
                rss_upper_bound(target_class, std::max(p.range, bin_m), options.rss_margin);
            if (!(p.power > bound)) continue;
            if (!span.contains(p.azimuth)) {
                // never subtract what is plausibly a side lobe of an
                // in-span main lobe
                if (in_span_power_near_range(result.profile, span, p.range_bin) > p.power) {
                    report.unresolved_peaks.push_back(p);
                    continue;
                }
            }
            candidate = &p;
            break;
        }
        if (!candidate) {
            report.converged = true;
            break;
        }

        // refine the peak location on both axes before fitting
        const Peak pk = *candidate;
        double range = pk.range;
        if (pk.range_bin > 0 && pk.range_bin + 1 < result.profile.num_range_bins) {
            range = refine_axis(result.profile.at(pk.range_bin - 1, pk.azimuth_bin), pk.power,
                                result.profile.at(pk.range_bin + 1, pk.azimuth_bin), pk.range,
                                bin_m);
        }
        double azimuth = pk.azimuth;
        if (pk.azimuth_bin > 0 && pk.azimuth_bin + 1 < result.profile.num_azimuth_bins) {
            azimuth = refine_axis(result.profile.at(pk.range_bin, pk.azimuth_bin - 1), pk.power,
                                  result.profile.at(pk.range_bin, pk.azimuth_bin + 1),
                                  pk.azimuth, az_step);
        }

        IQCube trial = result.iq;
        subtract_point(trial, std::max(range, bin_m), azimuth);
        RadarProfile trial_profile =
            beamform(trial, result.profile.azimuth_axis, options.beamform);
        const double new_oos = out_of_span_max(trial_profile, span);
        if (new_oos > prev_oos) {
            // subtraction would raise the out-of-span floor; leave it be
            report.unresolved_peaks.push_back(pk);
            report.converged = false;
            break;
        }

        result.iq = std::move(trial);
        result.profile = std::move(trial_profile);
        report.removed_peaks.push_back(pk);
        ++report.iterations;
        prev_oos = new_oos;
        report.out_of_span_max_history.push_back(new_oos);
    }

    report.residual_out_of_span_max = out_of_span_max(result.profile, span);
    return result;
}

OcclusionDecision resolve_occlusion(std::span<const Peak> in_span_peaks,
                                    std::span<const MaskSpan> masks,
                                    const AzimuthSpan& span, ObjectClass target_class,
                                    double rss_margin) {
    if (in_span_peaks.empty()) throw NoDetectionError("no in-span peaks to resolve");

    std::vector<Peak> peaks(in_span_peaks.begin(), in_span_peaks.end());
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return a.power > b.power; });

    // target mask: the target-class mask overlapping the span the most
    const MaskSpan* target_mask = nullptr;
    for (const auto& m : masks) {
        if (m.cls != target_class || !m.span.overlaps(span)) continue;
        if (!target_mask ||
            m.span.overlap_width(span) > target_mask->span.overlap_width(span)) {
            target_mask = &m;
        }
    }

    bool unknown_obstruction = target_mask && target_mask->confidence < 0.5;
    std::vector<const MaskSpan*> known_occluders;
    for (const auto& m : masks) {
        if (&m == target_mask || !m.span.overlaps(span)) continue;
        if (m.cls == ObjectClass::Unknown) {
            unknown_obstruction = true;
        } else {
            known_occluders.push_back(&m);
        }
    }

    OcclusionDecision decision;
    // known-class occluders: peel their expected peak (nearest in range,
    // power consistent with the class bound) off the candidate list
    for (const MaskSpan* occ : known_occluders) {
        if (peaks.size() < 2) break;
        std::size_t best = peaks.size();
        double best_range = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            if (peaks[i].range < best_range &&
                peaks[i].power <= rss_upper_bound(occ->cls, std::max(peaks[i].range, 1e-3),
                                                  rss_margin)) {
                best_range = peaks[i].range;
                best = i;
            }
        }
        if (best < peaks.size()) {
            decision.removed_occluder_peaks.push_back(peaks[best]);
            decision.occluder_removed = true;
            peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(best));
        }
    }

    if (unknown_obstruction && peaks.size() >= 2) {
        // farther of the two strongest
        decision.farther_peak_rule = true;
        decision.peak = peaks[0].range >= peaks[1].range ? peaks[0] : peaks[1];
    } else {
        decision.peak = peaks.front();
    }
    return decision;
}

}  // namespace specbeam
