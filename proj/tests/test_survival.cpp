#include "overtake/survival.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "overtake/rng.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace overtake;

namespace {

LogLogisticAft baseline(double gamma, double cons = 0.0, AftMode mode = AftMode::Paper) {
    return LogLogisticAft::with_canonical_names({cons, 0.0, 0.0, 0.0, 0.0}, gamma, mode);
}

LogLogisticAft random_model(Rng& rng) {
    return LogLogisticAft::with_canonical_names(
        {rng.uniform(1.0, 3.0), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
         rng.uniform(-0.05, 0.05), rng.uniform(-0.5, 0.5)},
        rng.uniform(0.22, 0.8));
}

CovariateVector random_covariates(Rng& rng) {
    CovariateVector x;
    x.ud = rng.uniform(0.0, 12.0);
    x.pd = rng.uniform(0.0, 15.0);
    x.dab = rng.uniform(-5.0, 35.0);
    x.multiple = rng.uniform01() < 0.3 ? 1.0 : 0.0;
    return x;
}

}  // namespace

TEST_CASE("linear predictor matches hand arithmetic") {
    const auto model = LogLogisticAft::reference_model();
    CHECK_THAT(linear_predictor(model, CovariateVector{}), WithinRel(2.589, 1e-15));

    CovariateVector x{10.0, 10.0, 20.3, 0.0};
    // 2.589 + 0.27 + 0.49 - 1.0759
    CHECK_THAT(linear_predictor(model, x), WithinAbs(2.2731, 1e-12));

    const auto zero = LogLogisticAft::with_canonical_names({0, 0, 0, 0, 0}, 1.0);
    CHECK(linear_predictor(zero, x) == 0.0);
}

TEST_CASE("linear predictor rejects dimension mismatch") {
    LogLogisticAft model;
    model.beta = {1.0, 2.0};
    model.gamma = 0.5;
    CHECK_THROWS_WITH(linear_predictor(model, CovariateVector{}),
                      Catch::Matchers::ContainsSubstring("5") &&
                          Catch::Matchers::ContainsSubstring("2"));
}

TEST_CASE("survival closed-form fixtures") {
    CHECK_THAT(survival_at(baseline(1.0), {}, 1.0), WithinRel(0.5, 1e-15));
    CHECK(survival_at(baseline(0.31), {}, 0.0) == 1.0);
    // 1 / (1 + 10^(1/0.253)) by high-precision scalar arithmetic.
    CHECK_THAT(survival_at(baseline(0.253), {}, 10.0), WithinRel(1.1152760897303511e-4, 1e-12));
    CHECK_THAT(cdf_at(baseline(0.253), {}, 10.0), WithinRel(0.99988847239102696, 1e-12));
    CHECK(cdf_at(baseline(0.253), {}, 0.0) == 0.0);
    CHECK(survival_at(baseline(0.253), {}, std::numeric_limits<double>::infinity()) == 0.0);
    CHECK_THROWS_AS(survival_at(baseline(0.5), {}, -1.0), std::invalid_argument);
}

TEST_CASE("hazard closed-form fixtures") {
    CHECK_THAT(hazard_at(baseline(1.0), {}, 1.0), WithinRel(0.5, 1e-15));
    // (1/0.253) / 2 at t = 1.
    CHECK_THAT(hazard_at(baseline(0.253), {}, 1.0), WithinRel(1.9762845849802372, 1e-13));
    CHECK(hazard_at(baseline(0.253), {}, 0.0) == 0.0);
    CHECK(hazard_at(baseline(1.0), {}, 0.0) == 1.0);  // k = exp(0)
    CHECK_THROWS_AS(hazard_at(baseline(1.5), {}, 0.0), std::invalid_argument);
}

TEST_CASE("hazard limit toward zero for gamma < 1") {
    const auto model = baseline(0.253);
    double prev = hazard_at(model, {}, 1e-3);
    for (double t : {1e-4, 1e-5, 1e-6}) {
        const double h = hazard_at(model, {}, t);
        CHECK(h < prev);
        prev = h;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("density fixtures and hazard-survival product") {
    CHECK_THAT(density_at(baseline(1.0), {}, 1.0), WithinRel(0.25, 1e-15));
    CHECK(density_at(baseline(0.5), {}, 0.0) == 0.0);
    const auto model = baseline(0.253);
    const double f10 = density_at(model, {}, 10.0);
    CHECK_THAT(f10, WithinRel(4.4077142515996787e-5, 1e-12));
    // Cross-check against the numeric derivative of the CDF.
    const double fd = oracles::derivative(
        [&](double t) { return cdf_at(model, {}, t); }, 10.0, 1e-5);
    CHECK_THAT(f10, WithinRel(fd, 1e-7));
}

TEST_CASE("quantile fixtures and inversion") {
    CHECK_THAT(quantile(baseline(1.0), {}, 0.5), WithinRel(1.0, 1e-15));
    CHECK_THAT(quantile(baseline(1.0), {}, 0.75), WithinRel(3.0, 1e-14));
    CHECK_THAT(survival_at(baseline(1.0), {}, 3.0), WithinRel(0.25, 1e-14));
    // exp(0.253 * 2.589) by scalar arithmetic.
    CHECK_THAT(quantile(baseline(0.253, 2.589), {}, 0.5), WithinRel(1.9251752450773427, 1e-12));
    CHECK_THROWS_AS(quantile(baseline(0.5), {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quantile(baseline(0.5), {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(quantile(baseline(0.5), {}, -0.2), std::invalid_argument);
}

TEST_CASE("median delegates to quantile bit-exactly") {
    Rng rng(20240811);
    for (int i = 0; i < 100; ++i) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        CHECK(median_duration(model, x) == quantile(model, x, 0.5));
    }
    CHECK_THAT(median_duration(baseline(1.0), {}), WithinRel(1.0, 1e-15));
    CHECK_THAT(median_duration(baseline(0.253, 2.589), {}), WithinRel(1.9251752450773427, 1e-12));
}

TEST_CASE("inflection point fixtures") {
    CHECK_THAT(inflection_point(0.5), WithinRel(2.0, 1e-14));
    // exp(0.253 ln 2.95257...) / 0.253 by scalar arithmetic.
    CHECK_THAT(inflection_point(0.253), WithinRel(5.1980457697655185, 1e-12));
    CHECK_THAT(inflection_point(0.999), WithinAbs(0.0, 2e-2));  // -> 0 as gamma -> 1
    CHECK_THROWS_AS(inflection_point(1.0), std::invalid_argument);
    CHECK_THROWS_AS(inflection_point(1.5), std::invalid_argument);
    CHECK_THROWS_AS(inflection_point(0.0), std::invalid_argument);
}

TEST_CASE("hazard mode time differs from the inflection point by 1/gamma") {
    CHECK_THAT(hazard_mode_time(0.253), WithinRel(1.3151055797506762, 1e-12));
    CHECK_THAT(hazard_mode_time(0.253) / 0.253, WithinRel(inflection_point(0.253), 1e-13));
    // Numeric maximization of the hazard curve lands on the analytic mode.
    const auto model = baseline(0.253);
    const double peak = oracles::maximize(
        [&](double t) { return hazard_at(model, {}, t); }, 0.05, 10.0, 1e-11);
    CHECK_THAT(peak, WithinAbs(hazard_mode_time(0.253), 1e-6));
}

TEST_CASE("survival + cdf = 1 and h = f/S on a grid") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        for (double t = 0.1; t <= 50.0; t += 0.7) {
            const double s = survival_at(model, x, t);
            const double f = density_at(model, x, t);
            const double h = hazard_at(model, x, t);
            REQUIRE_THAT(s + cdf_at(model, x, t), WithinAbs(1.0, 1e-12));
            REQUIRE_THAT(h - f / s, WithinAbs(0.0, 1e-9));
        }
    }
}

TEST_CASE("hazard equals the log-survival derivative") {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        for (double t : {0.3, 1.0, 2.5, 7.0, 20.0}) {
            const double eps = 1e-6 * t;
            const double fd = -(std::log(survival_at(model, x, t + eps)) -
                                std::log(survival_at(model, x, t - eps))) /
                              (2.0 * eps);
            const double h = hazard_at(model, x, t);
            REQUIRE_THAT(fd, WithinRel(h, 1e-5));
        }
    }
}

TEST_CASE("survival is strictly decreasing in t and increasing in bx") {
    const auto model = LogLogisticAft::reference_model();
    CovariateVector x{6.9, 8.3, 20.3, 0.0};
    double prev = survival_at(model, x, 0.5);
    for (double t = 1.0; t <= 30.0; t += 0.5) {
        const double s = survival_at(model, x, t);
        REQUIRE(s < prev);
        prev = s;
    }
    // beta_dab < 0: faster closing speed shortens the predicted maneuver, so
    // S(10) falls as dab grows.
    double prev_s10 = 1.0;
    for (double dab : {5.7, 20.3, 34.9}) {
        CovariateVector xi{6.9, 8.3, dab, 0.0};
        const double s10 = survival_at(model, xi, 10.0);
        REQUIRE(s10 < prev_s10);
        prev_s10 = s10;
    }
}

TEST_CASE("quantile inverts the cdf") {
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        for (double t : {0.5, 1.0, 5.0, 20.0}) {
            const double p = cdf_at(model, x, t);
            REQUIRE_THAT(quantile(model, x, p), WithinRel(t, 1e-9));
        }
        // And survival at a quantile recovers the level.
        for (double p : {0.1, 0.5, 0.9}) {
            const double t = quantile(model, x, p);
            REQUIRE_THAT(survival_at(model, x, t), WithinAbs(1.0 - p, 1e-12));
        }
    }
}

TEST_CASE("density integrates to one") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        const double cut = quantile(model, x, 0.9999);
        const double mass = oracles::integrate(
            [&](double t) { return t <= 0.0 ? 0.0 : density_at(model, x, t); }, 0.0, cut, 1e-10);
        const double total = mass + survival_at(model, x, cut);
        REQUIRE_THAT(total, WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("standard mode median matches exp(bx)") {
    const auto model = LogLogisticAft::with_canonical_names({1.2, 0, 0, 0, 0}, 0.4,
                                                            AftMode::Standard);
    CHECK_THAT(median_duration(model, {}), WithinRel(std::exp(1.2), 1e-13));
    // Paper mode stretches the median by gamma in the exponent instead.
    const auto paper = LogLogisticAft::with_canonical_names({1.2, 0, 0, 0, 0}, 0.4, AftMode::Paper);
    CHECK_THAT(median_duration(paper, {}), WithinRel(std::exp(0.4 * 1.2), 1e-13));
}

TEST_CASE("standard mode keeps the analytic identities") {
    Rng rng(19);
    for (int rep = 0; rep < 5; ++rep) {
        auto model = random_model(rng);
        model.mode = AftMode::Standard;
        const auto x = random_covariates(rng);
        for (double t : {0.5, 2.0, 10.0}) {
            const double s = survival_at(model, x, t);
            REQUIRE_THAT(hazard_at(model, x, t) * s, WithinRel(density_at(model, x, t), 1e-12));
            const double p = cdf_at(model, x, t);
            REQUIRE_THAT(quantile(model, x, p), WithinRel(t, 1e-9));
        }
    }
}

TEST_CASE("model and covariate validation") {
    CHECK_THROWS_AS(baseline(0.0), std::invalid_argument);
    CHECK_THROWS_AS(baseline(-1.0), std::invalid_argument);
    CovariateVector bad;
    bad.multiple = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = CovariateVector{};
    bad.ud = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CovariateVector negative_dab;
    negative_dab.dab = -12.0;  // closing slower than the lead is fine
    CHECK_NOTHROW(negative_dab.validate());
}
