#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "specbeam/errors.hpp"
#include "specbeam/scene.hpp"
#include "support/fixtures.hpp"

using namespace specbeam;

namespace {
const std::filesystem::path kFixtures = SPECBEAM_FIXTURE_DIR;
}

TEST_CASE("load_scene: minimal single-scatterer file") {
    const Scene scene = load_scene(kFixtures / "minimal.json");
    CHECK(scene.objects.empty());
    REQUIRE(scene.clutter.size() == 1);
    CHECK(scene.clutter[0].x == 0.0);
    CHECK(scene.clutter[0].z == 10.0);
    CHECK(scene.clutter[0].reflectivity == 1.0);
}

TEST_CASE("load_scene: invariant violation names the field") {
    try {
        load_scene(kFixtures / "bad_z.json");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("z") != std::string::npos);
    }
}

TEST_CASE("load_scene: three-object fixture") {
    const Scene scene = load_scene(kFixtures / "three_objects.json");
    REQUIRE(scene.objects.size() == 3);
    CHECK(scene.objects[0].id == 0);
    CHECK(scene.objects[1].id == 1);
    CHECK(scene.objects[2].id == 2);
    CHECK(scene.objects[0].cls == ObjectClass::Car);
    CHECK(scene.objects[1].cls == ObjectClass::Person);
    CHECK(scene.objects[2].cls == ObjectClass::Sign);
}

TEST_CASE("load_scene: unknown fields are rejected") {
    const auto path = std::filesystem::temp_directory_path() / "specbeam_unknown_field.json";
    {
        std::ofstream out(path);
        out << R"({"noise_power": 0.0, "objects": [], "clutter": [], "extra": 1})";
    }
    CHECK_THROWS_AS(load_scene(path), ParseError);
}

TEST_CASE("load_scene: duplicate ids are rejected") {
    Scene scene;
    scene.objects.push_back(fixtures::make_car(3, 20.0));
    scene.objects.push_back(fixtures::make_person(3, 10.0));
    CHECK_THROWS_AS(scene.validate(), ValidationError);
}

TEST_CASE("save/load round-trips bit-exact") {
    Scene scene;
    scene.noise_power = 1.25e-7;
    scene.objects.push_back(fixtures::make_car(0, 25.0));
    scene.objects.back().orientation = deg2rad(12.5);
    scene.objects.push_back(fixtures::make_cart(1, 17.0, 3.0));
    scene.clutter.push_back({1.5, 33.0, 0.125, 0.75});

    const auto path = std::filesystem::temp_directory_path() / "specbeam_roundtrip.json";
    save_scene(scene, path);
    const Scene loaded = load_scene(path);

    REQUIRE(loaded.objects.size() == scene.objects.size());
    CHECK(loaded.noise_power == scene.noise_power);
    CHECK(loaded.objects[0].orientation == scene.objects[0].orientation);
    for (std::size_t i = 0; i < scene.objects[0].scatterers.size(); ++i) {
        CHECK(loaded.objects[0].scatterers[i].x == scene.objects[0].scatterers[i].x);
        CHECK(loaded.objects[0].scatterers[i].z == scene.objects[0].scatterers[i].z);
    }
    CHECK(loaded.clutter[0].specularity == 0.75);
    CHECK(scene_hash(loaded) == scene_hash(scene));

    // a second save is byte-identical
    const auto path2 = std::filesystem::temp_directory_path() / "specbeam_roundtrip2.json";
    save_scene(loaded, path2);
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("effective_reflectivity") {
    Scatterer iso{0.0, 10.0, 2.5, 0.0};
    CHECK(effective_reflectivity(iso, 1.0, -0.7) == 2.5);

    Scatterer spec{0.0, 10.0, 2.5, 1.0};
    CHECK(effective_reflectivity(spec, 0.3, 0.3) == doctest::Approx(2.5));
    CHECK(effective_reflectivity(spec, kPi / 2, 0.0) == doctest::Approx(0.0));

    SUBCASE("maximum at broadside, continuity") {
        Scatterer s{0.0, 10.0, 1.0, 0.6};
        const double orient = 0.4;
        double best_angle = -1.0, best = -1.0, prev = -1.0;
        for (int i = 0; i <= 2000; ++i) {
            const double v = -kPi / 2 + kPi * i / 2000.0;
            const double r = effective_reflectivity(s, orient, v);
            if (r > best) {
                best = r;
                best_angle = v;
            }
            if (i > 0) CHECK(std::abs(r - prev) < 0.01);  // no jumps on a fine grid
            prev = r;
        }
        CHECK(best_angle == doctest::Approx(orient).epsilon(1e-2));
        CHECK(best == doctest::Approx(1.0));
    }
}

TEST_CASE("ground_truth_contour") {
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(deg2rad(0.5 * i));

    SUBCASE("single scatterer") {
        Scene scene;
        scene.objects.push_back({0, ObjectClass::Person, 0.0, false, {{0.0, 10.0, 1.0, 0.0}}});
        const auto contour = ground_truth_contour(scene, 0, grid);
        REQUIRE(contour.size() == 1);
        CHECK(contour[0].azimuth == doctest::Approx(0.0));
        CHECK(contour[0].range == doctest::Approx(10.0));
    }

    SUBCASE("front surface wins inside a bin") {
        Scene scene;
        scene.objects.push_back(
            {0, ObjectClass::Person, 0.0, false, {{0.0, 10.0, 1.0, 0.0}, {0.0, 10.5, 1.0, 0.0}}});
        const auto contour = ground_truth_contour(scene, 0, grid);
        REQUIRE(contour.size() == 1);
        CHECK(contour[0].range == doctest::Approx(10.0));
    }

    SUBCASE("car fixture matches the per-bin brute force") {
        Scene scene = fixtures::single_object_scene(fixtures::make_car(0, 25.0));
        const auto contour = ground_truth_contour(scene, 0, grid);
        CHECK(!contour.empty());
        // brute force: per grid bin, minimum range over scatterers mapped to
        // their nearest grid point
        std::vector<double> expect(grid.size(), std::numeric_limits<double>::infinity());
        for (const auto& s : scene.objects[0].scatterers) {
            const double az = std::atan2(s.x, s.z);
            std::size_t best = 0;
            for (std::size_t i = 1; i < grid.size(); ++i) {
                if (std::abs(grid[i] - az) < std::abs(grid[best] - az)) best = i;
            }
            expect[best] = std::min(expect[best], std::hypot(s.x, s.z));
        }
        std::size_t found = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!std::isfinite(expect[i])) continue;
            REQUIRE(found < contour.size());
            CHECK(contour[found].azimuth == doctest::Approx(grid[i]));
            CHECK(contour[found].range == doctest::Approx(expect[i]));
            ++found;
        }
        CHECK(found == contour.size());

        // values bounded by the object's own range extent
        const auto [lo, hi] = scene.objects[0].range_span();
        for (const auto& c : contour) {
            CHECK(c.range >= lo - 1e-12);
            CHECK(c.range <= hi + 1e-12);
        }
    }

    SUBCASE("unknown id") {
        Scene scene = fixtures::single_object_scene(fixtures::make_car(0, 25.0));
        CHECK_THROWS_AS(ground_truth_contour(scene, 7, grid), ValidationError);
    }
}
