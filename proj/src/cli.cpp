#include "overtake/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "overtake/avoidance.hpp"
#include "overtake/fit.hpp"
#include "overtake/io.hpp"
#include "overtake/maneuver.hpp"
#include "overtake/sim.hpp"
#include "overtake/survival.hpp"

namespace overtake {

namespace {

std::optional<std::uint64_t> env_seed() {
    const char* env = std::getenv("OVERTAKE_LAB_SEED");
    if (!env || !*env) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
        throw std::runtime_error("OVERTAKE_LAB_SEED is not an integer: " + std::string(env));
    }
    return v;
}

CovariateVector parse_covariates(const std::string& text) {
    CovariateVector x;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("covariate item \"" + item + "\" is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const double value = std::stod(item.substr(eq + 1));
        if (key == "ud") x.ud = value;
        else if (key == "pd") x.pd = value;
        else if (key == "dab") x.dab = value;
        else if (key == "multiple") x.multiple = value;
        else throw std::runtime_error("unknown covariate \"" + key +
                                      "\" (expected ud, pd, dab, multiple)");
    }
    x.validate();
    return x;
}

int run_simulate(const std::string& spec_path, const std::string& out_traces,
                 const std::string& out_ground_truth, std::optional<std::uint64_t> seed,
                 bool verbose) {
    ScenarioSpec spec =
        spec_path == "default-overtake" ? default_overtake_scenario() : load_scenario(spec_path);
    if (!seed) seed = env_seed();
    if (seed) spec.seed = *seed;
    const SimOutput sim = run_scenario(spec);
    save_traces_csv(out_traces, sim.traces);
    if (verbose) {
        for (const auto& tr : sim.traces) {
            const auto& first = tr.samples().front();
            std::cout << "  " << tr.id() << " (" << to_string(tr.direction()) << ") s0 "
                      << first.s_m << " m, d " << first.d_m << " m, v0 " << first.v_mps
                      << " m/s, " << tr.samples().size() << " samples\n";
        }
    }
    std::cout << "traces " << sim.traces.size() << " vehicles, "
              << (sim.traces.empty() ? 0 : sim.traces.front().samples().size())
              << " samples at dt " << sim.dt_s << " s -> " << out_traces << "\n";
    if (sim.collision) {
        std::cout << "collision " << sim.collision->vehicle_a << " / " << sim.collision->vehicle_b
                  << " at t " << sim.collision->t_s << " s; traces truncated\n";
    }
    if (sim.ground_truth) {
        std::cout << "ground truth: t_total " << sim.ground_truth->record.t_total_s
                  << " s, opposite lane " << sim.ground_truth->events.opposite_lane_span_s
                  << " s\n";
        if (!out_ground_truth.empty()) save_ground_truth(out_ground_truth, *sim.ground_truth);
    } else if (!out_ground_truth.empty()) {
        throw std::runtime_error("scenario produced no ground truth (no completed scripted "
                                 "maneuver); cannot write " + out_ground_truth);
    }
    return 0;
}

int run_extract(const std::string& traces_path, const std::string& out_path, std::string ego_id,
                std::string lead_id, bool verbose) {
    const std::vector<Trace> traces = load_traces_csv(traces_path);
    if (ego_id.empty()) {
        for (const auto& tr : traces) {
            if (tr.direction() == Direction::WithEgo) {
                ego_id = tr.id();
                break;
            }
        }
        if (ego_id.empty()) throw std::runtime_error("no same-direction vehicle to use as ego");
    }
    const Trace* ego = nullptr;
    for (const auto& tr : traces) {
        if (tr.id() == ego_id) ego = &tr;
    }
    if (!ego) throw std::runtime_error("no trace for ego \"" + ego_id + "\"");
    if (lead_id.empty()) {
        // Nearest same-direction vehicle ahead of the ego at its first sample.
        const double t0 = ego->start_time();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tr : traces) {
            if (tr.id() == ego_id || tr.direction() != Direction::WithEgo || !tr.covers(t0)) continue;
            const double gap = tr.s_at(t0) - ego->s_at(t0);
            if (gap > 0.0 && gap < best) {
                best = gap;
                lead_id = tr.id();
            }
        }
        if (lead_id.empty()) throw std::runtime_error("no lead vehicle ahead of ego");
    }
    const Trace* lead = nullptr;
    for (const auto& tr : traces) {
        if (tr.id() == lead_id) lead = &tr;
    }
    if (!lead) throw std::runtime_error("no trace for lead \"" + lead_id + "\"");

    const RoadGeometry road;
    const PhaseBoundaries phases = segment_phases(*ego, *lead, road);
    const ManeuverRecord record = extract_variables(traces, phases, road, ego_id, lead_id);
    save_maneuver(out_path, phases, record);
    std::cout << "maneuver ego=" << ego_id << " lead=" << lead_id << ": t_total "
              << record.t_total_s << " s, N " << record.n_overtaken << ", opposite lane "
              << record.opposite_lane_time_s << " s -> " << out_path << "\n";
    if (verbose) {
        std::cout << "  boundaries_s";
        for (double t : phases.t_s) std::cout << " " << t;
        std::cout << "\n  m1 " << record.m1_m << " m, m2 " << record.m2_m << " m, m "
                  << record.m_m << " m, dab " << record.dab_kmh << " km/h\n";
    }
    return 0;
}

int run_calibrate(const std::string& calib_path, const std::string& camera_path) {
    const CalibrationSet set = load_calibration_csv(calib_path);
    const CameraModel camera = load_camera(camera_path);
    std::vector<std::vector<double>> calculated;
    std::vector<double> measured;
    for (const auto& session : set.sessions) {
        std::vector<double> reps;
        reps.reserve(session.observations.size());
        for (const auto& obs : session.observations) {
            reps.push_back(longitudinal_distance(camera, obs));
        }
        calculated.push_back(std::move(reps));
        measured.push_back(session.target_m);
    }
    std::cout << "sessions " << set.sessions.size() << "\n";
    std::cout << "mape_percent " << mape(calculated, measured) << "\n";
    return 0;
}

int run_fit(const std::string& data_path, const std::string& out_path, const std::string& mode,
            double tolerance, int max_iterations) {
    const auto data = load_observations_csv(data_path);
    FitOptions options;
    options.mode = aft_mode_from_string(mode);
    options.tolerance = tolerance;
    options.max_iterations = max_iterations;
    const FitResult fit = fit_aft(data, options);

    FitMeta meta;
    meta.log_likelihood = fit.log_likelihood;
    meta.n_observations = fit.n_observations;
    meta.converged = fit.converged;
    meta.iterations = fit.iterations;
    meta.beta_se = fit.beta_se;
    meta.gamma_se = fit.gamma_se;
    save_model(out_path, fit.model, meta);

    std::cout << "n " << fit.n_observations << ", log-likelihood " << fit.log_likelihood
              << ", iterations " << fit.iterations << "\n";
    for (std::size_t i = 0; i < fit.model.beta.size(); ++i) {
        std::cout << fit.model.names[i] << " " << fit.model.beta[i];
        if (i < fit.beta_se.size()) {
            std::cout << " (se " << fit.beta_se[i] << ", z " << fit.wald_z(i) << ")";
        }
        std::cout << "\n";
    }
    std::cout << "gamma " << fit.model.gamma;
    if (fit.gamma_se > 0.0) std::cout << " (se " << fit.gamma_se << ")";
    std::cout << "\n";
    if (!fit.converged) {
        std::cerr << "error: fit did not converge: " << fit.message << "\n";
        return 1;
    }
    std::cout << "converged true -> " << out_path << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& covariates, double t_s) {
    const LogLogisticAft model = resolve_model(model_path);
    const CovariateVector x = parse_covariates(covariates);
    std::cout << "t_s " << t_s << "\n";
    std::cout << "linear_predictor " << linear_predictor(model, x) << "\n";
    std::cout << "survival " << survival_at(model, x, t_s) << "\n";
    std::cout << "hazard " << hazard_at(model, x, t_s) << "\n";
    std::cout << "density " << density_at(model, x, t_s) << "\n";
    std::cout << "cdf " << cdf_at(model, x, t_s) << "\n";
    std::cout << "median_s " << median_duration(model, x) << "\n";
    return 0;
}

int run_decide(const std::string& snapshot_path, const std::string& model_path,
               const std::string& out_path, const DecisionConfig& config) {
    const TrafficSnapshot snapshot = load_snapshot(snapshot_path);
    const LogLogisticAft model = resolve_model(model_path);
    const Decision decision = decide(snapshot, model, config);
    const std::string json = decision_to_json(decision);
    if (out_path.empty()) {
        std::cout << json;
    } else {
        save_decision(out_path, decision);
        std::cout << (decision.verdict == Verdict::Safe ? "safe" : "unsafe") << " -> " << out_path
                  << "\n";
    }
    return decision.verdict == Verdict::Safe ? 0 : 2;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Overtaking-duration modeling, trace geometry, and collision-avoidance toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Print extra per-item detail");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write vehicle traces");
    std::string spec_path, out_traces, out_ground_truth;
    std::optional<std::uint64_t> seed;
    simulate->add_option("--spec", spec_path,
                         "Scenario JSON path or the built-in name default-overtake")
        ->required();
    simulate->add_option("--out-traces", out_traces, "Output trace CSV")->required();
    simulate->add_option("--out-ground-truth", out_ground_truth, "Optional ground-truth JSON");
    simulate->add_option("--seed", seed, "Override the scenario seed (fallback: OVERTAKE_LAB_SEED)");

    // extract
    auto* extract = app.add_subcommand("extract", "Segment a trace CSV into maneuver variables");
    std::string traces_path, maneuver_out, ego_id, lead_id;
    extract->add_option("--traces", traces_path, "Input trace CSV")->required();
    extract->add_option("--out", maneuver_out, "Output maneuver JSON")->required();
    extract->add_option("--ego-id", ego_id, "Ego vehicle id (default: first same-direction)");
    extract->add_option("--lead-id", lead_id, "Lead vehicle id (default: nearest ahead)");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "Report camera calibration MAPE");
    std::string calib_path, camera_path;
    calibrate->add_option("--calib", calib_path, "Calibration CSV")->required();
    calibrate->add_option("--camera", camera_path, "Camera JSON")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Fit the duration model to observations");
    std::string data_path, model_out, mode = "paper";
    double tolerance = 1e-8;
    int max_iterations = 500;
    fit->add_option("--data", data_path, "Observations CSV")->required();
    fit->add_option("--out", model_out, "Output model JSON")->required();
    fit->add_option("--mode", mode, "AFT form: paper or standard");
    fit->add_option("--tol", tolerance, "Gradient max-norm tolerance");
    fit->add_option("--max-iter", max_iterations, "Iteration cap");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate survival quantities at covariates");
    std::string eval_model, covariates;
    double eval_t = 0.0;
    eval->add_option("--model", eval_model, "Model JSON path or paper-table")->required();
    eval->add_option("--covariates", covariates, "e.g. ud=7,pd=8.3,dab=20.3,multiple=0")
        ->required();
    eval->add_option("--t", eval_t, "Evaluation time, seconds")->required();

    // decide
    auto* decide_cmd = app.add_subcommand("decide", "SAFE/UNSAFE advisory for a traffic snapshot");
    std::string snapshot_path, decide_model, decision_out;
    DecisionConfig config;
    decide_cmd->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();
    decide_cmd->add_option("--model", decide_model, "Model JSON path or paper-table")->required();
    decide_cmd->add_option("--out", decision_out, "Optional decision JSON output (default stdout)");
    decide_cmd->add_option("--time-threshold", config.time_threshold_s, "Seconds");
    decide_cmd->add_option("--distance-threshold", config.distance_threshold_m, "Meters");
    decide_cmd->add_option("--risk-tolerance", config.risk_tolerance, "Probability in (0,1)");
    decide_cmd->add_option("--time-margin", config.time_margin, "Multiplier on the prediction");
    decide_cmd->add_option("--return-gap", config.return_gap_m, "Target ultimate distance, m");
    decide_cmd->add_option("--platoon-window", config.platoon_window_m, "Meters ahead of the lead");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(spec_path, out_traces, out_ground_truth, seed, verbose);
        }
        if (extract->parsed()) {
            return run_extract(traces_path, maneuver_out, ego_id, lead_id, verbose);
        }
        if (calibrate->parsed()) return run_calibrate(calib_path, camera_path);
        if (fit->parsed()) return run_fit(data_path, model_out, mode, tolerance, max_iterations);
        if (eval->parsed()) return run_eval(eval_model, covariates, eval_t);
        if (decide_cmd->parsed()) {
            return run_decide(snapshot_path, decide_model, decision_out, config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << app.help();
    return 1;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

}  // namespace overtake
