#include "overtake/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "overtake/rng.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace overtake;

namespace {
const CameraModel kCamera{1000.0, 1.2, 400.0};
}

TEST_CASE("longitudinal distance follows the pinhole relation") {
    ImageObservation obs;
    obs.y_f_px = kCamera.y_g_px + 120.0;
    CHECK_THAT(longitudinal_distance(kCamera, obs), WithinRel(10.0, 1e-15));

    // Doubling the pixel drop halves the distance.
    obs.y_f_px = kCamera.y_g_px + 240.0;
    CHECK_THAT(longitudinal_distance(kCamera, obs), WithinRel(5.0, 1e-15));

    obs.y_f_px = kCamera.y_g_px;
    CHECK_THROWS_AS(longitudinal_distance(kCamera, obs), std::invalid_argument);
    obs.y_f_px = kCamera.y_g_px - 10.0;
    CHECK_THROWS_AS(longitudinal_distance(kCamera, obs), std::invalid_argument);
}

TEST_CASE("mutual lateral distance from similar triangles") {
    ImageObservation a, b;
    a.x_offset_px = 60.0;
    b.x_offset_px = -40.0;
    CHECK_THAT(mutual_lateral_distance(kCamera, a, b, 10.0), WithinRel(1.0, 1e-15));
    CHECK(mutual_lateral_distance(kCamera, a, a, 10.0) == 0.0);
    CHECK_THAT(mutual_lateral_distance(kCamera, a, b, 20.0),
               WithinRel(2.0 * mutual_lateral_distance(kCamera, a, b, 10.0), 1e-15));
    CHECK_THROWS_AS(mutual_lateral_distance(kCamera, a, b, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mutual_lateral_distance(kCamera, a, b, -3.0), std::invalid_argument);
}

TEST_CASE("projection fixture and round trip") {
    const auto obs = project_to_image(kCamera, 10.0, 0.0);
    CHECK_THAT(obs.y_f_px, WithinRel(520.0, 1e-15));
    CHECK(obs.x_offset_px == 0.0);

    for (double z : {5.0, 10.0, 20.0, 30.0}) {
        const auto p = project_to_image(kCamera, z, 1.7);
        REQUIRE_THAT(longitudinal_distance(kCamera, p), WithinRel(z, 1e-9));
        ImageObservation center;
        REQUIRE_THAT(mutual_lateral_distance(kCamera, p, center, z), WithinRel(1.7, 1e-12));
    }
    CHECK_THROWS_AS(project_to_image(kCamera, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(project_to_image(kCamera, -5.0, 0.0), std::invalid_argument);
}

TEST_CASE("adjacent vehicle speed from gap differencing") {
    CHECK_THAT(adjacent_vehicle_speed(10.0, 10.0, 20.0, 20.0, 1.0), WithinRel(10.0, 1e-15));
    CHECK_THAT(adjacent_vehicle_speed(10.0, 10.0, 20.0, 22.0, 1.0), WithinRel(12.0, 1e-15));
    CHECK_THAT(adjacent_vehicle_speed(10.0, 10.0, 20.0, 18.0, 1.0), WithinRel(8.0, 1e-15));
    CHECK_THROWS_AS(adjacent_vehicle_speed(10.0, 10.0, 20.0, 20.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(adjacent_vehicle_speed(10.0, 10.0, 20.0, 20.0, -0.1), std::invalid_argument);
}

TEST_CASE("gap differencing is exact for constant-acceleration vehicles") {
    // Ego at constant acceleration, lead at a different constant acceleration;
    // the reconstruction returns the lead's trapezoidal mean speed over the
    // step, which equals its midpoint speed.
    const double dt = 0.1;
    const double ego_v0 = 10.0, ego_a = 0.8;
    const double lead_v0 = 13.0, lead_a = -0.4;
    const double lead_s0 = 25.0;
    for (int k = 1; k < 100; ++k) {
        const double t0 = (k - 1) * dt, t1 = k * dt;
        const auto ego_s = [&](double t) { return ego_v0 * t + 0.5 * ego_a * t * t; };
        const auto lead_s = [&](double t) { return lead_s0 + lead_v0 * t + 0.5 * lead_a * t * t; };
        const double recovered = adjacent_vehicle_speed(
            ego_v0 + ego_a * t0, ego_v0 + ego_a * t1, lead_s(t0) - ego_s(t0),
            lead_s(t1) - ego_s(t1), dt);
        const double lead_mid = lead_v0 + lead_a * (t0 + t1) / 2.0;
        REQUIRE_THAT(recovered, WithinAbs(lead_mid, 1e-9));
    }
}

TEST_CASE("mape fixtures") {
    CHECK(mape({{10.0, 10.0}}, {10.0}) == 0.0);
    CHECK_THAT(mape({{11.0}}, {10.0}), WithinRel(10.0, 1e-12));
    // Session means of 4% and 6% average to 5%.
    CHECK_THAT(mape({{10.4}, {21.2}}, {10.0, 20.0}), WithinRel(5.0, 1e-12));
    CHECK_THROWS_AS(mape({{10.0}}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(mape({{10.0}}, {-2.0}), std::invalid_argument);
    CHECK_THROWS_AS(mape({{10.0}, {10.0}}, {10.0}), std::invalid_argument);
    CHECK_THROWS_AS(mape({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(mape({{}}, {10.0}), std::invalid_argument);
}

TEST_CASE("mape is scale invariant") {
    Rng rng(42);
    std::vector<std::vector<double>> calc(4);
    std::vector<double> meas(4);
    for (std::size_t j = 0; j < 4; ++j) {
        meas[j] = rng.uniform(5.0, 30.0);
        for (int c = 0; c < 6; ++c) calc[j].push_back(meas[j] * rng.uniform(0.9, 1.1));
    }
    const double base = mape(calc, meas);
    for (double k : {0.5, 3.0, 120.0}) {
        auto calc_k = calc;
        auto meas_k = meas;
        for (auto& row : calc_k) {
            for (auto& v : row) v *= k;
        }
        for (auto& v : meas_k) v *= k;
        REQUIRE_THAT(mape(calc_k, meas_k), WithinRel(base, 1e-12));
    }
}

TEST_CASE("quantized projection stays within the calibration error budget") {
    // Targets spread over the 5-30 m working range, at positions that do not
    // land on integer pixel rows, observed through 1-px quantization.
    const std::vector<double> targets = {5.2, 9.7, 14.8, 20.1, 24.6, 29.5};
    std::vector<std::vector<double>> noiseless(targets.size()), quantized(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto obs = project_to_image(kCamera, targets[j], 0.3 * rep);
            noiseless[j].push_back(longitudinal_distance(kCamera, obs));
            ImageObservation q = obs;
            q.y_f_px = std::round(q.y_f_px);
            quantized[j].push_back(longitudinal_distance(kCamera, q));
        }
    }
    CHECK(mape(noiseless, targets) < 1e-9);
    const double quantized_mape = mape(quantized, targets);
    CHECK(quantized_mape < 5.0);
    CHECK(quantized_mape > 0.0);
}
