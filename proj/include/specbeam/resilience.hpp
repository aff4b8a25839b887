#pragma once

#include <span>
#include <vector>

#include "specbeam/beamform.hpp"
#include "specbeam/radar.hpp"
#include "specbeam/scene.hpp"

namespace specbeam {

/// Class RSS coefficient A_c (amplitude * meters) for the received-power
/// upper bound. Throws for Unknown.
double rss_coefficient(ObjectClass cls);

/// Maximum plausible profile power for an object of this class at distance
/// d: (A_c / d)^2 * margin. Unknown class is unbounded (+inf).
double rss_upper_bound(ObjectClass cls, double distance_m, double margin = 2.0);

struct DeclutterOptions {
    int max_iterations = 30;
    double min_prominence = 0.05;
    double rss_margin = 2.0;
    BeamformOptions beamform;
};

struct DeclutterReport {
    int iterations = 0;  // subtractions applied
    std::vector<Peak> removed_peaks;
    double residual_out_of_span_max = 0.0;
    bool converged = false;
    /// Out-of-span maximum before each iteration and after the last.
    std::vector<double> out_of_span_max_history;
    /// Peaks left alone: plausible side lobes of in-span main lobes, or a
    /// subtraction that would have raised the out-of-span maximum.
    std::vector<Peak> unresolved_peaks;
};

struct DeclutterResult {
    IQCube iq;
    RadarProfile profile;  // beamformed from the decluttered cube
    DeclutterReport report;
};

/// Successive interference cancellation outside the target span: while the
/// strongest out-of-span peak exceeds the target-class RSS bound at its own
/// range, fit a unit point template there by least squares, subtract it,
/// and re-beamform. In-span peaks above the bound (too strong to be the
/// target) are removed the same way. Out-of-span peaks that look like side
/// lobes of an in-span main lobe are never subtracted.
DeclutterResult declutter(const IQCube& iq, const RadarProfile& profile,
                          const AzimuthSpan& span, ObjectClass target_class,
                          const DeclutterOptions& options = {});

/// Segmentation mask mapped into the radar frame; the context the
/// occlusion rule needs from the camera side.
struct MaskSpan {
    int object_id = -1;
    ObjectClass cls = ObjectClass::Unknown;
    double confidence = 1.0;
    AzimuthSpan span{};
};

struct OcclusionDecision {
    Peak peak{};
    bool farther_peak_rule = false;   // unknown obstruction: took the farther of two
    bool occluder_removed = false;    // known-class occluder peak removed
    std::vector<Peak> removed_occluder_peaks;
};

/// Applies the partial-occlusion rules to the in-span peaks. Known-class
/// occluder masks overlapping the span have their expected peak (nearest in
/// range, power within the class RSS bound) removed; an Unknown-class
/// occluder or a target mask flagged covered (confidence < 0.5) switches to
/// the farther of the two strongest peaks. Otherwise the strongest peak
/// wins. Throws NoDetectionError when no peaks are given.
OcclusionDecision resolve_occlusion(std::span<const Peak> in_span_peaks,
                                    std::span<const MaskSpan> masks,
                                    const AzimuthSpan& span, ObjectClass target_class,
                                    double rss_margin = 2.0);

/// LS-fit point subtraction shared by declutter and the occlusion path:
/// removes alpha * t where t is the unit point template at (range,
/// azimuth) and alpha = <t, h> / ||t||^2.
void subtract_point(IQCube& iq, double range_m, double azimuth_rad);

}  // namespace specbeam
