#include <doctest.h>

#include <cmath>
#include <random>

#include "specbeam/errors.hpp"
#include "specbeam/metrics.hpp"
#include "support/oracles.hpp"

using namespace specbeam;

TEST_CASE("modified_hausdorff worked examples") {
    const std::vector<Vec2> a{{0, 0}, {10, 0}};
    const std::vector<Vec2> b{{0, 1}};
    CHECK(modified_hausdorff(a, b) == doctest::Approx(1.0));

    const std::vector<Vec2> p{{0, 0}};
    const std::vector<Vec2> q{{3, 4}};
    CHECK(modified_hausdorff(p, q) == doctest::Approx(5.0));

    const std::vector<Vec2> same{{1, 2}, {3, 4}, {-1, 0.5}};
    CHECK(modified_hausdorff(same, same) == 0.0);
}

TEST_CASE("modified_hausdorff directed medians") {
    // A -> B median of {1, sqrt(101)} = 5.525; B -> A = 1; min wins
    const std::vector<Vec2> a{{0, 0}, {10, 0}};
    const std::vector<Vec2> b{{0, 1}};
    const double ab = 0.5 * (1.0 + std::sqrt(101.0));
    CHECK(ab == doctest::Approx(5.5249).epsilon(1e-4));
    CHECK(modified_hausdorff(a, b) == doctest::Approx(std::min(ab, 1.0)));
}

TEST_CASE("modified_hausdorff properties") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    auto random_cloud = [&](int n) {
        std::vector<Vec2> pts;
        for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
        return pts;
    };

    SUBCASE("symmetry") {
        for (int rep = 0; rep < 50; ++rep) {
            const auto a = random_cloud(7), b = random_cloud(5);
            CHECK(modified_hausdorff(a, b) == doctest::Approx(modified_hausdorff(b, a)));
        }
    }

    SUBCASE("union absorbs") {
        for (int rep = 0; rep < 50; ++rep) {
            const auto a = random_cloud(6), b = random_cloud(6);
            auto ab = a;
            ab.insert(ab.end(), b.begin(), b.end());
            CHECK(modified_hausdorff(a, ab) <= modified_hausdorff(a, b) + 1e-12);
        }
    }

    SUBCASE("homogeneous in scale") {
        for (int rep = 0; rep < 50; ++rep) {
            const auto a = random_cloud(5), b = random_cloud(8);
            const double s = 0.1 + 3.0 * (rep + 1) / 50.0;
            auto sa = a, sb = b;
            for (auto& p : sa) p = s * p;
            for (auto& p : sb) p = s * p;
            CHECK(modified_hausdorff(sa, sb) ==
                  doctest::Approx(s * modified_hausdorff(a, b)).epsilon(1e-12));
        }
    }

    SUBCASE("brute-force oracle equivalence") {
        for (int rep = 0; rep < 200; ++rep) {
            const auto a = random_cloud(10), b = random_cloud(10);
            CHECK(std::abs(modified_hausdorff(a, b) - oracles::modified_hausdorff(a, b)) <
                  1e-12);
        }
    }

    SUBCASE("empty input") {
        const std::vector<Vec2> a{{0, 0}};
        CHECK_THROWS_AS(modified_hausdorff(a, {}), ValidationError);
        CHECK_THROWS_AS(modified_hausdorff({}, a), ValidationError);
    }
}

TEST_CASE("depth_error") {
    CHECK(depth_error(10.0, 9.0, 11.0) == 0.0);
    CHECK(depth_error(8.0, 9.0, 11.0) == doctest::Approx(1.0));
    CHECK(depth_error(12.5, 9.0, 11.0) == doctest::Approx(1.5));
    CHECK(depth_error(9.0, 9.0, 11.0) == 0.0);  // endpoints inclusive
    CHECK_THROWS_AS(depth_error(1.0, 5.0, 4.0), ValidationError);
}

TEST_CASE("naive_fusion_baseline") {
    RadarConfig cfg;
    cfg.num_antennas = 2;
    cfg.num_samples = 8;
    RadarProfile profile;
    profile.config = cfg;
    profile.num_range_bins = 8;
    profile.num_azimuth_bins = 5;
    profile.power.assign(40, 0.0);
    for (int m = 0; m < 8; ++m) profile.range_axis.push_back(0.5 * m);
    profile.azimuth_axis = {-0.2, -0.1, 0.0, 0.1, 0.2};

    SUBCASE("strongest in-span cell") {
        profile.at(4, 2) = 3.0;
        profile.at(6, 0) = 9.0;  // outside the span
        CHECK(naive_fusion_baseline(profile, {-0.15, 0.15}) == doctest::Approx(2.0));
    }

    SUBCASE("all-zero span") {
        CHECK_THROWS_AS(naive_fusion_baseline(profile, {-0.15, 0.15}), NoDetectionError);
    }

    SUBCASE("empty span") {
        CHECK_THROWS_AS(naive_fusion_baseline(profile, {0.3, 0.4}), ValidationError);
    }
}
