#include <doctest.h>

#include <cmath>
#include <random>

#include "specbeam/errors.hpp"
#include "specbeam/pipeline.hpp"
#include "specbeam/specular.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace specbeam;

namespace {

Contour single_point_contour(double azimuth, double weight = 1.0) {
    Contour c;
    c.entries.push_back({azimuth, 0.0, weight});
    return c;
}

Contour small_car_contour() {
    Contour c;
    c.entries = {{deg2rad(-2.0), 0.30, 8.0},
                 {deg2rad(-1.0), 0.10, 12.0},
                 {deg2rad(0.0), 0.00, 14.0},
                 {deg2rad(1.0), 0.12, 12.0},
                 {deg2rad(2.0), 0.35, 8.0}};
    return c;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double d = lo; d <= hi + 1e-12; d += step) g.push_back(d);
    return g;
}

}  // namespace

TEST_CASE("get_shape_contour from oracle renders") {
    CameraModel cam;
    cam.focal_px = 1024.0;
    cam.image_width = 2048;
    cam.image_height = 256;
    OracleParams clean;
    clean.sigma_abs_at_60m = 0.0;
    clean.relative_noise_sigma = 0.0;

    SUBCASE("flat-fronted object: all relative depths zero") {
        Scene scene;
        SceneObject obj;
        obj.id = 0;
        obj.cls = ObjectClass::Car;
        for (int i = 0; i < 9; ++i) obj.scatterers.push_back({-1.0 + 0.25 * i, 12.0, 1.0, 0.0});
        scene.objects.push_back(obj);
        const auto masks = render_masks(scene, cam, clean);
        const auto mono = render_monocular(scene, cam, 1, clean);
        const Contour contour = get_shape_contour(masks[0], mono, cam, {});
        for (const auto& e : contour.entries) CHECK(e.relative_depth < 1e-9);
    }

    SUBCASE("angled car: linear ramp 0 to 2 m") {
        Scene scene = fixtures::single_object_scene(fixtures::make_angled_car(0, 25.0));
        const auto masks = render_masks(scene, cam, clean);
        const auto mono = render_monocular(scene, cam, 1, clean);
        const Contour contour = get_shape_contour(masks[0], mono, cam, {});
        REQUIRE(contour.entries.size() > 20);
        CHECK(contour.max_relative_depth() == doctest::Approx(2.0).epsilon(0.02));
        // ramp is monotone across the span
        for (std::size_t i = 1; i < contour.entries.size(); ++i) {
            CHECK(contour.entries[i].relative_depth >=
                  contour.entries[i - 1].relative_depth - 1e-6);
        }
    }

    SUBCASE("single-column mask gives a single entry") {
        Scene scene;
        scene.objects.push_back({0, ObjectClass::Sign, 0.0, false, {{0.0, 30.0, 1.0, 0.0}}});
        OracleParams tight = clean;
        tight.mask_dilation_px = 0;
        const auto masks = render_masks(scene, cam, tight);
        const auto mono = render_monocular(scene, cam, 1, tight);
        const Contour contour = get_shape_contour(masks[0], mono, cam, {});
        CHECK(contour.entries.size() == 1);
        CHECK(contour.entries[0].relative_depth == 0.0);
    }
}

TEST_CASE("shift_by_depth") {
    RadarConfig cfg;
    cfg.num_antennas = 86;
    cfg.num_samples = 128;

    SUBCASE("single-point template equals a capture of that point") {
        const double theta = deg2rad(3.0);
        const Contour c = single_point_contour(theta, 2.5);
        const IQCube t = shift_by_depth(c, 10.0, cfg);
        Scene scene;
        scene.clutter.push_back({10.0 * std::sin(theta), 10.0 * std::cos(theta), 2.5, 0.0});
        const IQCube capture = synthesize_capture(scene, cfg);
        REQUIRE(t.data.size() == capture.data.size());
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            CHECK(std::abs(t.data[i] - capture.data[i]) <= 1e-12);
        }
    }

    SUBCASE("depth shift is a per-frequency phase rotation (single element)") {
        RadarConfig one = cfg;
        one.num_antennas = 1;
        const double dr = range_resolution(one);
        const Contour c = single_point_contour(0.0);
        const IQCube t0 = shift_by_depth(c, 10.0, one);
        const IQCube t1 = shift_by_depth(c, 10.0 + dr, one);
        for (int k = 0; k < one.num_samples; ++k) {
            const std::complex<double> expected =
                std::polar(10.0 / (10.0 + dr),
                           -4.0 * kPi * one.frequency(k) * dr / kSpeedOfLight);
            const std::complex<double> got = t1.at(0, k) / t0.at(0, k);
            CHECK(std::abs(got - expected) < 1e-9);
        }
    }

    SUBCASE("car contour matches the brute-force point sum") {
        const Contour c = small_car_contour();
        const IQCube got = shift_by_depth(c, 25.0, cfg);
        const IQCube want = oracles::shift_template(c, 25.0, cfg);
        for (std::size_t i = 0; i < got.data.size(); ++i) {
            CHECK(std::abs(got.data[i] - want.data[i]) < 1e-9 * std::abs(want.data[i]) + 1e-12);
        }
    }

    SUBCASE("depth outside the unambiguous range throws") {
        const Contour c = single_point_contour(0.0);
        CHECK_THROWS_AS(shift_by_depth(c, max_unambiguous_range(cfg) + 1.0, cfg),
                        ValidationError);
        CHECK_THROWS_AS(shift_by_depth(c, -1.0, cfg), ValidationError);
    }
}

TEST_CASE("matched_filter") {
    RadarConfig cfg;
    cfg.num_antennas = 86;
    cfg.num_samples = 128;
    const double dr = range_resolution(cfg);

    SUBCASE("template self-consistency: exact on-grid argmax") {
        const Contour c = small_car_contour();
        const double d0 = 15.0;
        const IQCube h = shift_by_depth(c, d0, cfg);
        const auto grid = uniform_grid(d0 - 40 * dr / 4, d0 + 40 * dr / 4, dr / 4);
        const auto curve = matched_filter(h, c, grid);
        std::size_t best = 0;
        for (std::size_t i = 1; i < curve.values.size(); ++i) {
            if (curve.values[i] > curve.values[best]) best = i;
        }
        CHECK(curve.d_grid[best] == doctest::Approx(d0).epsilon(1e-12));
    }

    SUBCASE("zero channel gives a zero curve") {
        const IQCube h(cfg);
        const auto grid = uniform_grid(5.0, 6.0, dr / 4);
        const auto curve = matched_filter(h, small_car_contour(), grid);
        for (double v : curve.values) CHECK(v == 0.0);
    }

    SUBCASE("fast evaluation matches the direct oracle") {
        const Contour c = small_car_contour();
        const IQCube h = shift_by_depth(c, 12.0, cfg);
        const auto grid = uniform_grid(10.0, 14.0, dr / 4);
        const auto curve = matched_filter(h, c, grid);
        const auto want = oracles::matched_filter(h, c, grid);
        double peak = 0.0;
        for (double v : want) peak = std::max(peak, v);
        std::size_t best_got = 0, best_want = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(curve.values[i] - want[i]) < 5e-4 * peak);
            if (curve.values[i] > curve.values[best_got]) best_got = i;
            if (want[i] > want[best_want]) best_want = i;
        }
        CHECK(best_got == best_want);
    }

    SUBCASE("fast evaluation matches the oracle on a wide decimated contour") {
        // enough entries and grid points to exercise the strided-energy path
        Contour wide;
        for (int i = 0; i < 60; ++i) {
            wide.entries.push_back(
                {deg2rad(-3.0 + 6.0 * i / 59.0), 0.4 * i / 59.0, 5.0 + (i % 7)});
        }
        double min_rel = 1e9;
        for (auto& e : wide.entries) min_rel = std::min(min_rel, e.relative_depth);
        for (auto& e : wide.entries) e.relative_depth -= min_rel;
        const IQCube h = shift_by_depth(wide, 18.0, cfg);
        const auto grid = uniform_grid(16.0, 20.0, dr / 2 / 2);
        const auto curve = matched_filter(h, wide, grid);
        const auto want = oracles::matched_filter(h, wide, grid);
        double peak = 0.0;
        for (double v : want) peak = std::max(peak, v);
        std::size_t best_got = 0, best_want = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(curve.values[i] - want[i]) < 1e-3 * peak);
            if (curve.values[i] > curve.values[best_got]) best_got = i;
            if (want[i] > want[best_want]) best_want = i;
        }
        CHECK(best_got == best_want);
    }

    SUBCASE("argmax is invariant under positive scaling of h") {
        const Contour c = small_car_contour();
        IQCube h = shift_by_depth(c, 12.0, cfg);
        const auto grid = uniform_grid(10.0, 14.0, dr / 4);
        const auto base = matched_filter(h, c, grid);
        for (auto& v : h.data) v *= 37.5;
        const auto scaled = matched_filter(h, c, grid);
        std::size_t b0 = 0, b1 = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (base.values[i] > base.values[b0]) b0 = i;
            if (scaled.values[i] > scaled.values[b1]) b1 = i;
            CHECK(scaled.values[i] == doctest::Approx(37.5 * base.values[i]).epsilon(1e-9));
        }
        CHECK(b0 == b1);
    }

    SUBCASE("translation covariance") {
        const Contour c = small_car_contour();
        const auto grid = uniform_grid(12.0, 18.0, dr / 4);
        for (double delta : {0.5, 1.0, 2.0}) {
            const IQCube h = shift_by_depth(c, 14.0 + delta, cfg);
            const auto curve = matched_filter(h, c, grid);
            const double d = estimate_depth(curve, false);
            CHECK(std::abs(d - (14.0 + delta)) <= dr / 8 + 1e-9);
        }
    }

    SUBCASE("noisy Monte Carlo: argmax within one grid step in >= 99 of 100") {
        RadarConfig mc = cfg;
        mc.num_samples = 64;
        const double d0 = 15.0;
        const Contour c = single_point_contour(0.0);
        Scene base;
        base.clutter.push_back({0.0, d0, 1.0, 0.0});
        const double peak = noiseless_peak_power(base, mc);
        const double noise = noise_power_for_snr(peak, mc, 20.0);
        const double step = range_resolution(mc) / 4;
        const auto grid = uniform_grid(d0 - 1.0, d0 + 1.0, step);
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Scene scene = base;
            scene.noise_power = noise;
            RadarConfig seeded = mc;
            seeded.rng_seed = seed;
            const IQCube h = synthesize_capture(scene, seeded);
            const auto curve = matched_filter(h, c, grid);
            const double d = estimate_depth(curve, false);
            ok += std::abs(d - d0) <= step + 1e-9;
        }
        CHECK(ok >= 99);
    }

    SUBCASE("input validation") {
        const Contour c = small_car_contour();
        const IQCube h = shift_by_depth(c, 12.0, cfg);
        CHECK_THROWS_AS(matched_filter(h, c, std::vector<double>{}), ValidationError);
        CHECK_THROWS_AS(matched_filter(h, c, std::vector<double>{5.0, 5.0 + dr}),
                        ValidationError);  // step too coarse
        IQCube bad = h;
        bad.data.pop_back();
        CHECK_THROWS_AS(matched_filter(bad, c, uniform_grid(5, 6, dr / 4)), ValidationError);
    }
}

TEST_CASE("estimate_depth") {
    SUBCASE("unique maximum, no refinement") {
        CorrelationCurve curve;
        curve.d_grid = {1.0, 2.0, 3.0};
        curve.values = {0.1, 0.2, 0.15};
        CHECK(estimate_depth(curve, false) == 2.0);
    }

    SUBCASE("ties break toward smaller d") {
        CorrelationCurve curve;
        curve.d_grid = {10.0, 11.0, 12.0};
        curve.values = {0.5, 0.3, 0.5};
        CHECK(estimate_depth(curve, false) == 10.0);
    }

    SUBCASE("parabolic refinement beats the grid") {
        RadarConfig cfg;
        cfg.num_antennas = 16;
        cfg.num_samples = 64;
        const double dr = range_resolution(cfg);
        const Contour c = single_point_contour(0.0);
        const double d0 = 10.0 + dr / 7.0;  // deliberately off-grid
        const IQCube h = shift_by_depth(c, d0, cfg);
        const auto grid = uniform_grid(9.0, 11.0, dr / 4);
        const auto curve = matched_filter(h, c, grid);
        const double refined = estimate_depth(curve, true);
        CHECK(std::abs(refined - d0) < dr / 8);
    }

    SUBCASE("all-zero curve throws") {
        CorrelationCurve curve;
        curve.d_grid = {1.0, 2.0};
        curve.values = {0.0, 0.0};
        CHECK_THROWS_AS(estimate_depth(curve), NoDetectionError);
    }
}

TEST_CASE("depth_search_grid honors the monocular prior") {
    RadarConfig cfg;
    const double dr = range_resolution(cfg);
    const Contour c = small_car_contour();

    const auto full = depth_search_grid(cfg, c);
    CHECK(full.front() == doctest::Approx(dr / 4));
    CHECK(full.back() < max_unambiguous_range(cfg));

    const auto prior = depth_search_grid(cfg, c, DepthPrior{10.0, 0.5});
    CHECK(prior.front() == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(prior.back() <= 15.0 + 1e-9);
    for (std::size_t i = 1; i < prior.size(); ++i) {
        CHECK(prior[i] - prior[i - 1] == doctest::Approx(dr / 4));
    }
}

TEST_CASE("sparse_point_cloud") {
    RadarConfig cfg;
    const double dr = range_resolution(cfg);

    SUBCASE("single point scene yields a point near (0, d0)") {
        const double d0 = 10.0;
        Scene scene;
        scene.clutter.push_back({0.0, d0, 1.0, 0.0});
        const IQCube h = synthesize_capture(scene, cfg);
        const auto profile = beamform(h, default_azimuth_grid());
        const Contour c = single_point_contour(0.0);
        const auto grid = uniform_grid(9.0, 11.0, dr / 4);
        const auto curve = matched_filter(h, c, grid);
        const double d_star = estimate_depth(curve);
        const AzimuthSpan span{deg2rad(-2.0), deg2rad(2.0)};
        const auto cloud = sparse_point_cloud(curve, profile, span, d_star);
        REQUIRE(!cloud.points.empty());
        bool near = false;
        for (const auto& p : cloud.points) {
            if (std::abs(p.x) < 0.5 && std::abs(p.z - d0) < 2 * dr) near = true;
        }
        CHECK(near);
    }

    SUBCASE("empty span power falls back to the anchor") {
        RadarConfig small;
        small.num_antennas = 2;
        small.num_samples = 16;
        RadarProfile profile;
        profile.config = small;
        profile.num_range_bins = 16;
        profile.num_azimuth_bins = 3;
        profile.power.assign(48, 0.0);
        for (int m = 0; m < 16; ++m) {
            profile.range_axis.push_back(m * range_resolution(small) * 15.0 / 16.0);
        }
        profile.azimuth_axis = {-0.1, 0.0, 0.1};
        CorrelationCurve curve;
        curve.d_grid = {4.0, 5.0, 6.0};
        curve.values = {0.1, 0.9, 0.1};
        const AzimuthSpan span{-0.05, 0.05};
        const auto cloud = sparse_point_cloud(curve, profile, span, 5.0);
        REQUIRE(cloud.points.size() == 1);
        CHECK(std::hypot(cloud.points[0].x, cloud.points[0].z) == doctest::Approx(5.0));
        CHECK(std::atan2(cloud.points[0].x, cloud.points[0].z) == doctest::Approx(0.0));
    }

    SUBCASE("two depth surfaces both contribute") {
        const double d0 = 12.0;
        Scene scene;
        for (int i = -2; i <= 2; ++i) {
            scene.clutter.push_back({0.04 * i, d0, 1.0, 0.0});
            scene.clutter.push_back({0.04 * i, d0 + 1.0, 1.0, 0.0});
        }
        const IQCube h = synthesize_capture(scene, cfg);
        const auto profile = beamform(h, default_azimuth_grid());
        Contour c;
        c.entries = {{deg2rad(-0.2), 0.0, 1.0}, {deg2rad(0.2), 1.0, 1.0}};
        const auto grid = uniform_grid(11.0, 13.5, dr / 4);
        const auto curve = matched_filter(h, c, grid);
        const double d_star = estimate_depth(curve);
        const AzimuthSpan span{deg2rad(-1.5), deg2rad(1.5)};
        const auto cloud = sparse_point_cloud(curve, profile, span, d_star, 1.5);
        bool front = false, back = false;
        for (const auto& p : cloud.points) {
            const double r = std::hypot(p.x, p.z);
            if (std::abs(r - d0) < 3 * dr) front = true;
            if (std::abs(r - (d0 + 1.0)) < 3 * dr) back = true;
        }
        CHECK(front);
        CHECK(back);
    }
}

TEST_CASE("super-resolution premise: blob wider than three beamwidths still localizes") {
    // one in-span object only; the Bartlett blob spans well over 3 beamwidths
    RadarConfig cfg = preset_for_bucket(RangeBucket::Mid);
    Scene scene = fixtures::single_object_scene(fixtures::make_car(0, 25.0));
    const IQCube h = synthesize_capture(scene, cfg);
    const auto profile = beamform(h, default_azimuth_grid());

    // measure the in-span blob extent at the object's range
    const int row = profile.nearest_range_bin(25.0);
    double pmax = 0.0;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) pmax = std::max(pmax, profile.at(row, j));
    int first = -1, last = -1;
    for (int j = 0; j < profile.num_azimuth_bins; ++j) {
        if (profile.at(row, j) > 0.25 * pmax) {
            if (first < 0) first = j;
            last = j;
        }
    }
    const double blob = profile.azimuth_axis[last] - profile.azimuth_axis[first];
    CHECK(blob > 3.0 * azimuth_beamwidth(cfg));

    Contour c;
    for (const auto& s : scene.objects[0].scatterers) {
        c.entries.push_back({azimuth_of({s.x, s.z}), s.z - 25.0, 1.0});
    }
    double min_rel = 1e9;
    for (auto& e : c.entries) min_rel = std::min(min_rel, e.relative_depth);
    for (auto& e : c.entries) e.relative_depth -= min_rel;
    std::sort(c.entries.begin(), c.entries.end(),
              [](const ContourEntry& a, const ContourEntry& b) { return a.azimuth < b.azimuth; });

    const double dr = range_resolution(cfg);
    const auto grid = uniform_grid(20.0, 30.0, dr / 4);
    const auto curve = matched_filter(h, c, grid);
    const double d_star = estimate_depth(curve);
    const auto [lo, hi] = scene.objects[0].range_span();
    CHECK(d_star > lo - dr);
    CHECK(d_star < hi + dr);
}
