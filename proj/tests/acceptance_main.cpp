// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "overtake/avoidance.hpp"
#include "overtake/fit.hpp"
#include "overtake/geometry.hpp"
#include "overtake/io.hpp"
#include "overtake/maneuver.hpp"
#include "overtake/rng.hpp"
#include "overtake/sim.hpp"
#include "overtake/survival.hpp"
#include "oracles.hpp"

using namespace overtake;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Check {
    bool ok = true;
    double worst = 0.0;
    void track(bool condition, double magnitude) {
        ok = ok && condition;
        worst = std::max(worst, magnitude);
    }
};

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

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// 1. Analytic identities over random models and a dense time grid.
Outcome criterion_identities() {
    Rng rng(101);
    Check hazard_identity, unit_sum, log_derivative, quantile_identity;
    for (int rep = 0; rep < 20; ++rep) {
        const auto model = random_model(rng);
        const auto x = random_covariates(rng);
        for (double t = 0.1; t <= 50.0; t += 0.1) {
            const double s = survival_at(model, x, t);
            const double f = density_at(model, x, t);
            const double h = hazard_at(model, x, t);
            hazard_identity.track(std::abs(h - f / s) < 1e-9, std::abs(h - f / s));
            const double sum_err = std::abs(s + cdf_at(model, x, t) - 1.0);
            unit_sum.track(sum_err < 1e-12, sum_err);
        }
        for (double t : {0.3, 1.0, 2.5, 7.0, 20.0, 45.0}) {
            const double eps = 1e-6 * t;
            const double fd = -(std::log(survival_at(model, x, t + eps)) -
                                std::log(survival_at(model, x, t - eps))) /
                              (2.0 * eps);
            const double h = hazard_at(model, x, t);
            const double rel = std::abs(fd - h) / h;
            log_derivative.track(rel < 1e-5, rel);
        }
        for (double t : {0.5, 1.0, 5.0, 20.0}) {
            const double p = cdf_at(model, x, t);
            const double rel = std::abs(quantile(model, x, p) - t) / t;
            quantile_identity.track(rel < 1e-9, rel);
        }
    }
    const bool pass =
        hazard_identity.ok && unit_sum.ok && log_derivative.ok && quantile_identity.ok;
    return {pass, "max |h-f/S| " + fmt(hazard_identity.worst) + ", max |S+F-1| " +
                      fmt(unit_sum.worst) + ", max FD rel " + fmt(log_derivative.worst) +
                      ", max quantile rel " + fmt(quantile_identity.worst)};
}

// 2. Parameter recovery at n=5000 across ten seeds.
Outcome criterion_recovery() {
    const auto truth = LogLogisticAft::with_canonical_names({2.6, 0.03, 0.05, -0.05, 0.46}, 0.25);
    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed * 7919);
        std::vector<CovariateVector> rows(5000);
        for (auto& x : rows) x = random_covariates(rng);
        for (auto& x : rows) x.dab = std::abs(x.dab);  // keep the fitted range positive
        const auto data = simulate_durations(truth, rows, seed * 104729);
        const auto fit = fit_aft(data);
        if (!fit.converged) continue;
        bool ok = true;
        for (std::size_t i = 0; i < 5; ++i) {
            ok = ok && std::abs(fit.model.beta[i] - truth.beta[i]) <= 3.0 * fit.beta_se[i];
        }
        ok = ok && std::abs(fit.model.gamma - truth.gamma) <= 3.0 * fit.gamma_se;
        if (ok) ++successes;
    }
    return {successes >= 9, std::to_string(successes) + "/10 seeds recovered all six parameters "
                                                        "within 3 SE"};
}

// 3. Reference-model survival ordering across the dAB percentiles.
Outcome criterion_reference_ordering() {
    const auto model = LogLogisticAft::reference_model();
    std::vector<double> s10;
    for (double dab : {5.7, 20.3, 34.9}) {
        s10.push_back(survival_at(model, CovariateVector{6.9, 8.3, dab, 0.0}, 10.0));
    }
    const bool pass = s10[0] > s10[1] && s10[1] > s10[2];
    return {pass, "S(10) = " + fmt(s10[0]) + " > " + fmt(s10[1]) + " > " + fmt(s10[2]) +
                      " as dAB rises 5.7 -> 20.3 -> 34.9 km/h"};
}

// 4. Characteristic-time fixtures: closed form and numeric maximization.
Outcome criterion_characteristic_times() {
    const double tau = inflection_point(0.253);
    const bool tau_ok = std::abs(tau - 5.1984) <= 1e-3;

    const auto model = LogLogisticAft::with_canonical_names({0, 0, 0, 0, 0}, 0.253);
    // Coarse grid bracket, then golden-section refinement.
    double best_t = 0.1, best_h = 0.0;
    for (double t = 0.05; t <= 10.0; t += 0.01) {
        const double h = hazard_at(model, {}, t);
        if (h > best_h) {
            best_h = h;
            best_t = t;
        }
    }
    const double peak = oracles::maximize([&](double t) { return hazard_at(model, {}, t); },
                                          std::max(best_t - 0.05, 1e-6), best_t + 0.05, 1e-12);
    const bool peak_ok = std::abs(peak - 1.3152) <= 1e-3;
    return {tau_ok && peak_ok, "inflection " + fmt(tau) + " (target 5.1984 +/- 1e-3), hazard peak " +
                                   fmt(peak) + " (target 1.3152 +/- 1e-3)"};
}

// 5. Monocular geometry round-trip over the 5-30 m calibration range.
Outcome criterion_geometry_roundtrip() {
    const CameraModel camera{1000.0, 1.2, 400.0};
    const std::vector<double> targets = {5.2, 9.7, 14.8, 20.1, 24.6, 29.5};
    std::vector<std::vector<double>> noiseless(targets.size()), quantized(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto obs = project_to_image(camera, targets[j], 0.3 * rep);
            noiseless[j].push_back(longitudinal_distance(camera, obs));
            auto q = obs;
            q.y_f_px = std::round(q.y_f_px);
            quantized[j].push_back(longitudinal_distance(camera, q));
        }
    }
    const double clean = mape(noiseless, targets);
    const double rough = mape(quantized, targets);
    return {clean < 0.01 && rough < 5.0,
            "noiseless MAPE " + fmt(clean) + "% (< 0.01%), 1-px quantized MAPE " + fmt(rough) +
                "% (< 5%)"};
}

// 6. Adjacent-speed recovery for constant-speed and constant-acceleration leads.
Outcome criterion_speed_recovery() {
    const double dt = 0.1;
    double worst_exact = 0.0, worst_rounded = 0.0;
    const auto round_to = [](double v, double q) { return std::round(v / q) * q; };

    for (const double lead_a : {0.0, 0.7, -0.4}) {
        const double ego_v0 = 10.0, ego_a = 0.5;
        const double lead_v0 = 13.0, lead_s0 = 30.0;
        for (int k = 1; k <= 200; ++k) {
            const double t0 = (k - 1) * dt, t1 = k * dt;
            const auto ego_s = [&](double t) { return ego_v0 * t + 0.5 * ego_a * t * t; };
            const auto lead_s = [&](double t) {
                return lead_s0 + lead_v0 * t + 0.5 * lead_a * t * t;
            };
            const double truth = lead_v0 + lead_a * (t0 + t1) / 2.0;

            const double exact = adjacent_vehicle_speed(
                ego_v0 + ego_a * t0, ego_v0 + ego_a * t1, lead_s(t0) - ego_s(t0),
                lead_s(t1) - ego_s(t1), dt);
            worst_exact = std::max(worst_exact, std::abs(exact - truth));

            // Millimeter-grade rounding on gaps and speeds.
            const double rounded = adjacent_vehicle_speed(
                round_to(ego_v0 + ego_a * t0, 1e-3), round_to(ego_v0 + ego_a * t1, 1e-3),
                round_to(lead_s(t0) - ego_s(t0), 1e-3), round_to(lead_s(t1) - ego_s(t1), 1e-3),
                dt);
            worst_rounded = std::max(worst_rounded, std::abs(rounded - truth));
        }
    }
    return {worst_exact < 1e-9 && worst_rounded < 0.02,
            "exact error " + fmt(worst_exact) + " m/s (< 1e-9), rounded-input error " +
                fmt(worst_rounded) + " m/s (< 0.02)"};
}

// 7. End-to-end pipeline through the trace CSV.
Outcome criterion_pipeline() {
    namespace fs = std::filesystem;
    const auto sim = run_scenario(default_overtake_scenario());
    if (!sim.ground_truth) return {false, "simulator produced no ground truth"};
    const auto& gt = *sim.ground_truth;

    const auto csv = fs::temp_directory_path() / "overtake_acceptance_traces.csv";
    save_traces_csv(csv.string(), sim.traces);
    const auto traces = load_traces_csv(csv.string());
    fs::remove(csv);

    const Trace* ego = nullptr;
    const Trace* lead = nullptr;
    for (const auto& tr : traces) {
        if (tr.id() == "bike1") ego = &tr;
        if (tr.id() == "car1") lead = &tr;
    }
    const auto phases = segment_phases(*ego, *lead, RoadGeometry{});
    const auto rec = extract_variables(traces, phases, RoadGeometry{}, "bike1", "car1");

    double worst_boundary = 0.0;
    for (int i = 0; i < 6; ++i) {
        worst_boundary = std::max(worst_boundary,
                                  std::abs(phases.t_s[static_cast<std::size_t>(i)] -
                                           gt.phases.t_s[static_cast<std::size_t>(i)]));
    }
    const double t_total_err = std::abs(rec.t_total_s - gt.record.t_total_s);

    double worst_distance = 0.0;
    const auto span = [&worst_distance](double a, double b) {
        worst_distance = std::max(worst_distance, std::abs(a - b));
    };
    span(rec.m1_m, gt.record.m1_m);
    span(rec.m2_m, gt.record.m2_m);
    span(rec.m_m, gt.record.m_m);
    span(rec.m3_m.value_or(-1.0), gt.record.m3_m.value_or(-1.0));
    span(rec.m4_m.value_or(-1.0), gt.record.m4_m.value_or(-1.0));
    span(rec.d_total_m, gt.record.d_total_m);
    for (int i = 0; i < 4; ++i) {
        span(rec.dp_m[static_cast<std::size_t>(i)], gt.record.dp_m[static_cast<std::size_t>(i)]);
    }

    const double occupancy_target_err = std::abs(rec.opposite_lane_time_s - 4.0);
    const bool pass = worst_boundary <= 0.1 + 1e-9 && t_total_err <= 0.1 + 1e-9 &&
                      worst_distance <= 1e-6 && occupancy_target_err <= 0.5;
    return {pass, "boundaries off by " + fmt(worst_boundary) + " s (<= 0.1), t_total off by " +
                      fmt(t_total_err) + " s, distances off by " + fmt(worst_distance) +
                      " m (<= 1e-6), opposite lane " + fmt(rec.opposite_lane_time_s) +
                      " s (target 4 +/- 0.5)"};
}

// 8. Decision engine thresholds, single transition, determinism.
Outcome criterion_decision_engine() {
    const auto model = LogLogisticAft::reference_model();
    TrafficSnapshot snap;
    snap.ego_speed_mps = 15.0;
    snap.lead = {20.0, 8.0};

    bool below_threshold_always_unsafe = true;
    for (double gap = 0.5; gap < 115.0; gap += 0.5) {
        snap.oncoming = ObservedVehicle{gap, 10.0};
        below_threshold_always_unsafe =
            below_threshold_always_unsafe && decide(snap, model).verdict == Verdict::Unsafe;
    }

    int transitions = 0;
    bool prev_safe = false;
    bool monotone = true;
    for (double gap = 0.0; gap <= 500.0; gap += 0.25) {
        snap.oncoming = ObservedVehicle{gap, 10.0};
        const bool safe = decide(snap, model).verdict == Verdict::Safe;
        if (safe != prev_safe) {
            ++transitions;
            monotone = monotone && safe;
        }
        prev_safe = safe;
    }

    snap.oncoming = ObservedVehicle{130.0, 9.0};
    const auto first = decide(snap, model);
    bool deterministic = true;
    for (int i = 0; i < 1000; ++i) {
        const auto d = decide(snap, model);
        deterministic = deterministic && d.verdict == first.verdict &&
                        d.reasons.size() == first.reasons.size() &&
                        d.t_pred_s == first.t_pred_s && d.risk == first.risk;
    }

    const bool pass =
        below_threshold_always_unsafe && transitions == 1 && monotone && deterministic;
    return {pass, std::string("gap < 115 m always unsafe: ") +
                      (below_threshold_always_unsafe ? "yes" : "NO") + ", sweep transitions " +
                      std::to_string(transitions) + " (expected 1), deterministic over 1000 "
                                                    "calls: " +
                      (deterministic ? "yes" : "NO")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;  // 0 = unconstrained
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "analytic identity suite", criterion_identities, 5.0},
        {2, "parameter recovery", criterion_recovery, 60.0},
        {3, "reference-model survival ordering", criterion_reference_ordering, 0.0},
        {4, "characteristic-time fixtures", criterion_characteristic_times, 0.0},
        {5, "geometry round-trip", criterion_geometry_roundtrip, 1.0},
        {6, "adjacent-speed recovery", criterion_speed_recovery, 0.0},
        {7, "end-to-end pipeline", criterion_pipeline, 2.0},
        {8, "decision engine", criterion_decision_engine, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = outcome.pass;
        std::string note = outcome.detail;
        if (c.time_limit_s > 0.0) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "; %.2fs (limit %.0fs)", elapsed, c.time_limit_s);
            note += buf;
            pass = pass && elapsed < c.time_limit_s;
        }
        std::printf("[%s] criterion %d: %s - %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    note.c_str());
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
