#include "overtake/io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace overtake {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kModelSchemaVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open \"" + path + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing \"" + path + "\"");
}

ordered_json parse_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("malformed JSON in \"" + path + "\": " + e.what());
    }
}

const ordered_json& require_field(const ordered_json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw std::runtime_error("\"" + path + "\" is missing required field \"" + key + "\"");
    }
    return *it;
}

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize a non-finite number");
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

double parse_double(const std::string& field, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE) {
        throw std::runtime_error("bad number \"" + field + "\" " + where);
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

struct CsvReader {
    explicit CsvReader(const std::string& path, const std::string& expected_header)
        : path_(path), in_(path) {
        if (!in_) throw std::runtime_error("cannot open \"" + path + "\" for reading");
        std::string header;
        if (!std::getline(in_, header)) {
            throw std::runtime_error("\"" + path + "\" is empty (expected header " +
                                     expected_header + ")");
        }
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header != expected_header) {
            throw std::runtime_error("\"" + path + "\" has header \"" + header +
                                     "\", expected \"" + expected_header + "\"");
        }
    }

    bool next(std::vector<std::string>& fields, std::size_t expected_count) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            fields = split_csv_line(line);
            if (fields.size() != expected_count) {
                throw std::runtime_error("\"" + path_ + "\" line " + std::to_string(line_no_ + 1) +
                                         ": expected " + std::to_string(expected_count) +
                                         " fields, got " + std::to_string(fields.size()));
            }
            return true;
        }
        return false;
    }

    std::string where() const { return "in \"" + path_ + "\" line " + std::to_string(line_no_ + 1); }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace

void save_model(const std::string& path, const LogLogisticAft& model,
                const std::optional<FitMeta>& meta) {
    model.validate();
    if (model.names.size() != model.beta.size()) {
        throw std::invalid_argument("model must carry one name per coefficient to be saved");
    }
    ordered_json j;
    j["schema_version"] = kModelSchemaVersion;
    j["mode"] = to_string(model.mode);
    j["gamma"] = model.gamma;
    auto coeffs = ordered_json::array();
    for (std::size_t i = 0; i < model.beta.size(); ++i) {
        coeffs.push_back({{"name", model.names[i]}, {"beta", model.beta[i]}});
    }
    j["coefficients"] = std::move(coeffs);
    if (meta) {
        ordered_json m;
        m["log_likelihood"] = meta->log_likelihood;
        m["n_observations"] = meta->n_observations;
        m["converged"] = meta->converged;
        m["iterations"] = meta->iterations;
        ordered_json se = ordered_json::object();
        ordered_json ci = ordered_json::object();
        for (std::size_t i = 0; i < meta->beta_se.size() && i < model.names.size(); ++i) {
            se[model.names[i]] = meta->beta_se[i];
            ci[model.names[i]] = {model.beta[i] - 1.96 * meta->beta_se[i],
                                  model.beta[i] + 1.96 * meta->beta_se[i]};
        }
        if (meta->gamma_se > 0.0) {
            se["gamma"] = meta->gamma_se;
            ci["gamma"] = {model.gamma - 1.96 * meta->gamma_se,
                           model.gamma + 1.96 * meta->gamma_se};
        }
        m["standard_errors"] = std::move(se);
        m["ci95"] = std::move(ci);
        j["fit_meta"] = std::move(m);
    } else {
        j["fit_meta"] = nullptr;
    }
    write_file(path, j.dump(2) + "\n");
}

LogLogisticAft load_model(const std::string& path) {
    const ordered_json j = parse_json(path);
    const auto& version = require_field(j, "schema_version", path);
    if (!version.is_number_integer() || version.get<int>() != kModelSchemaVersion) {
        throw std::runtime_error("\"" + path + "\" has unsupported schema_version " +
                                 version.dump() + " (expected " +
                                 std::to_string(kModelSchemaVersion) + ")");
    }
    LogLogisticAft model;
    model.mode = aft_mode_from_string(require_field(j, "mode", path).get<std::string>());
    model.gamma = require_field(j, "gamma", path).get<double>();
    const auto& coeffs = require_field(j, "coefficients", path);
    if (!coeffs.is_array() || coeffs.empty()) {
        throw std::runtime_error("\"" + path + "\" has no coefficients");
    }
    for (const auto& c : coeffs) {
        model.names.push_back(require_field(c, "name", path).get<std::string>());
        model.beta.push_back(require_field(c, "beta", path).get<double>());
    }
    model.validate();
    return model;
}

std::optional<FitMeta> load_fit_meta(const std::string& path) {
    const ordered_json j = parse_json(path);
    const auto it = j.find("fit_meta");
    if (it == j.end() || it->is_null()) return std::nullopt;
    FitMeta meta;
    meta.log_likelihood = require_field(*it, "log_likelihood", path).get<double>();
    meta.n_observations = require_field(*it, "n_observations", path).get<std::size_t>();
    meta.converged = require_field(*it, "converged", path).get<bool>();
    meta.iterations = require_field(*it, "iterations", path).get<int>();
    if (const auto se = it->find("standard_errors"); se != it->end()) {
        const LogLogisticAft model = load_model(path);
        for (const auto& name : model.names) {
            if (se->contains(name)) meta.beta_se.push_back((*se)[name].get<double>());
        }
        if (se->contains("gamma")) meta.gamma_se = (*se)["gamma"].get<double>();
    }
    return meta;
}

LogLogisticAft resolve_model(const std::string& path_or_name) {
    if (path_or_name == "paper-table") return LogLogisticAft::reference_model();
    return load_model(path_or_name);
}

void save_observations_csv(const std::string& path,
                           const std::vector<DurationObservation>& data) {
    std::ostringstream out;
    out << "duration_s,ud_m,pd_m,dab_kmh,multiple\n";
    for (const auto& obs : data) {
        out << format_double(obs.duration_s) << ',' << format_double(obs.covariates.ud) << ','
            << format_double(obs.covariates.pd) << ',' << format_double(obs.covariates.dab) << ','
            << static_cast<int>(obs.covariates.multiple) << '\n';
    }
    write_file(path, out.str());
}

std::vector<DurationObservation> load_observations_csv(const std::string& path) {
    CsvReader reader(path, "duration_s,ud_m,pd_m,dab_kmh,multiple");
    std::vector<DurationObservation> data;
    std::vector<std::string> f;
    while (reader.next(f, 5)) {
        DurationObservation obs;
        obs.duration_s = parse_double(f[0], reader.where());
        obs.covariates.ud = parse_double(f[1], reader.where());
        obs.covariates.pd = parse_double(f[2], reader.where());
        obs.covariates.dab = parse_double(f[3], reader.where());
        obs.covariates.multiple = parse_double(f[4], reader.where());
        data.push_back(obs);
    }
    return data;
}

void save_traces_csv(const std::string& path, const std::vector<Trace>& traces) {
    std::ostringstream out;
    out << "t_s,vehicle_id,direction,s_m,d_m,v_mps\n";
    for (const auto& tr : traces) {
        for (const auto& s : tr.samples()) {
            out << format_double(s.t_s) << ',' << tr.id() << ',' << to_string(tr.direction())
                << ',' << format_double(s.s_m) << ',' << format_double(s.d_m) << ','
                << format_double(s.v_mps) << '\n';
        }
    }
    write_file(path, out.str());
}

std::vector<Trace> load_traces_csv(const std::string& path) {
    CsvReader reader(path, "t_s,vehicle_id,direction,s_m,d_m,v_mps");
    std::vector<std::string> order;
    std::map<std::string, Direction> directions;
    std::map<std::string, std::vector<TraceSample>> samples;
    std::vector<std::string> f;
    while (reader.next(f, 6)) {
        const std::string& id = f[1];
        if (id.empty()) throw std::runtime_error("empty vehicle id " + reader.where());
        const Direction dir = direction_from_string(f[2]);
        if (!samples.count(id)) {
            order.push_back(id);
            directions[id] = dir;
        } else if (directions[id] != dir) {
            throw std::runtime_error("vehicle \"" + id + "\" changes direction " + reader.where());
        }
        TraceSample s;
        s.t_s = parse_double(f[0], reader.where());
        s.s_m = parse_double(f[3], reader.where());
        s.d_m = parse_double(f[4], reader.where());
        s.v_mps = parse_double(f[5], reader.where());
        samples[id].push_back(s);
    }
    std::vector<Trace> traces;
    traces.reserve(order.size());
    for (const auto& id : order) {
        traces.emplace_back(id, directions[id], std::move(samples[id]));
    }
    return traces;
}

void save_camera(const std::string& path, const CameraModel& camera) {
    camera.validate();
    ordered_json j;
    j["c_px"] = camera.c_px;
    j["y1_m"] = camera.y1_m;
    j["y_g_px"] = camera.y_g_px;
    write_file(path, j.dump(2) + "\n");
}

CameraModel load_camera(const std::string& path) {
    const ordered_json j = parse_json(path);
    CameraModel camera;
    camera.c_px = require_field(j, "c_px", path).get<double>();
    camera.y1_m = require_field(j, "y1_m", path).get<double>();
    camera.y_g_px = require_field(j, "y_g_px", path).get<double>();
    camera.validate();
    return camera;
}

void save_calibration_csv(const std::string& path, const CalibrationSet& set) {
    set.validate();
    std::ostringstream out;
    out << "session,target_m,y_f_px,x_offset_px\n";
    for (std::size_t j = 0; j < set.sessions.size(); ++j) {
        for (const auto& obs : set.sessions[j].observations) {
            out << j << ',' << format_double(set.sessions[j].target_m) << ','
                << format_double(obs.y_f_px) << ',' << format_double(obs.x_offset_px) << '\n';
        }
    }
    write_file(path, out.str());
}

CalibrationSet load_calibration_csv(const std::string& path) {
    CsvReader reader(path, "session,target_m,y_f_px,x_offset_px");
    std::vector<std::string> order;
    std::map<std::string, CalibrationSession> sessions;
    std::vector<std::string> f;
    while (reader.next(f, 4)) {
        const std::string& id = f[0];
        const double target = parse_double(f[1], reader.where());
        ImageObservation obs;
        obs.y_f_px = parse_double(f[2], reader.where());
        obs.x_offset_px = parse_double(f[3], reader.where());
        auto [it, fresh] = sessions.try_emplace(id);
        if (fresh) {
            order.push_back(id);
            it->second.target_m = target;
        } else if (it->second.target_m != target) {
            throw std::runtime_error("session \"" + id + "\" mixes target distances " +
                                     reader.where());
        }
        it->second.observations.push_back(obs);
    }
    CalibrationSet set;
    for (const auto& id : order) set.sessions.push_back(std::move(sessions[id]));
    set.validate();
    return set;
}

namespace {

ordered_json vehicle_json(const ObservedVehicle& v) {
    return {{"gap_m", v.gap_m}, {"speed_mps", v.speed_mps}};
}

ObservedVehicle vehicle_from_json(const ordered_json& j, const std::string& path) {
    ObservedVehicle v;
    v.gap_m = require_field(j, "gap_m", path).get<double>();
    v.speed_mps = require_field(j, "speed_mps", path).get<double>();
    return v;
}

}  // namespace

void save_snapshot(const std::string& path, const TrafficSnapshot& snapshot) {
    snapshot.validate();
    ordered_json j;
    j["timestamp_s"] = snapshot.timestamp_s;
    j["ego"] = {{"position_m", snapshot.ego_position_m}, {"speed_mps", snapshot.ego_speed_mps}};
    j["lead"] = vehicle_json(snapshot.lead);
    j["oncoming"] = snapshot.oncoming ? vehicle_json(*snapshot.oncoming) : ordered_json(nullptr);
    j["follower_of_lead"] =
        snapshot.follower_of_lead ? vehicle_json(*snapshot.follower_of_lead) : ordered_json(nullptr);
    write_file(path, j.dump(2) + "\n");
}

TrafficSnapshot load_snapshot(const std::string& path) {
    const ordered_json j = parse_json(path);
    TrafficSnapshot snap;
    snap.timestamp_s = require_field(j, "timestamp_s", path).get<double>();
    const auto& ego = require_field(j, "ego", path);
    snap.ego_position_m = require_field(ego, "position_m", path).get<double>();
    snap.ego_speed_mps = require_field(ego, "speed_mps", path).get<double>();
    snap.lead = vehicle_from_json(require_field(j, "lead", path), path);
    if (const auto it = j.find("oncoming"); it != j.end() && !it->is_null()) {
        snap.oncoming = vehicle_from_json(*it, path);
    }
    if (const auto it = j.find("follower_of_lead"); it != j.end() && !it->is_null()) {
        snap.follower_of_lead = vehicle_from_json(*it, path);
    }
    snap.validate();
    return snap;
}

void save_scenario(const std::string& path, const ScenarioSpec& spec) {
    spec.validate();
    ordered_json j;
    j["road"] = {{"lane_width_m", spec.road.lane_width_m}, {"num_lanes", spec.road.num_lanes}};
    j["dt_s"] = spec.dt_s;
    j["duration_s"] = spec.duration_s;
    j["seed"] = spec.seed;
    auto vehicles = ordered_json::array();
    for (const auto& v : spec.vehicles) {
        ordered_json vj;
        vj["id"] = v.id;
        vj["direction"] = to_string(v.direction);
        vj["initial_s_m"] = v.initial_s_m;
        vj["initial_d_m"] = v.initial_d_m;
        vj["initial_speed_mps"] = v.initial_speed_mps;
        auto segs = ordered_json::array();
        for (const auto& s : v.accel_segments) {
            segs.push_back({{"duration_s", s.duration_s}, {"accel_mps2", s.accel_mps2}});
        }
        vj["accel_segments"] = std::move(segs);
        vehicles.push_back(std::move(vj));
    }
    j["vehicles"] = std::move(vehicles);
    if (spec.ego_script) {
        const auto& sc = *spec.ego_script;
        j["ego_script"] = {{"ego_id", sc.ego_id},
                           {"lead_id", sc.lead_id},
                           {"trigger_gap_m", sc.trigger_gap_m},
                           {"peak_speed_mps", sc.peak_speed_mps},
                           {"lateral_transition_s", sc.lateral_transition_s},
                           {"accel_mps2", sc.accel_mps2},
                           {"return_gap_m", sc.return_gap_m}};
    } else {
        j["ego_script"] = nullptr;
    }
    write_file(path, j.dump(2) + "\n");
}

ScenarioSpec load_scenario(const std::string& path) {
    const ordered_json j = parse_json(path);
    ScenarioSpec spec;
    const auto& road = require_field(j, "road", path);
    spec.road.lane_width_m = require_field(road, "lane_width_m", path).get<double>();
    spec.road.num_lanes = require_field(road, "num_lanes", path).get<int>();
    spec.dt_s = require_field(j, "dt_s", path).get<double>();
    spec.duration_s = require_field(j, "duration_s", path).get<double>();
    if (const auto it = j.find("seed"); it != j.end() && !it->is_null()) {
        spec.seed = it->get<std::uint64_t>();
    }
    for (const auto& vj : require_field(j, "vehicles", path)) {
        VehicleSpec v;
        v.id = require_field(vj, "id", path).get<std::string>();
        v.direction = direction_from_string(require_field(vj, "direction", path).get<std::string>());
        v.initial_s_m = require_field(vj, "initial_s_m", path).get<double>();
        v.initial_d_m = require_field(vj, "initial_d_m", path).get<double>();
        v.initial_speed_mps = require_field(vj, "initial_speed_mps", path).get<double>();
        if (const auto it = vj.find("accel_segments"); it != vj.end() && !it->is_null()) {
            for (const auto& sj : *it) {
                v.accel_segments.push_back({require_field(sj, "duration_s", path).get<double>(),
                                            require_field(sj, "accel_mps2", path).get<double>()});
            }
        }
        spec.vehicles.push_back(std::move(v));
    }
    if (const auto it = j.find("ego_script"); it != j.end() && !it->is_null()) {
        EgoScript sc;
        sc.ego_id = require_field(*it, "ego_id", path).get<std::string>();
        sc.lead_id = require_field(*it, "lead_id", path).get<std::string>();
        sc.trigger_gap_m = require_field(*it, "trigger_gap_m", path).get<double>();
        sc.peak_speed_mps = require_field(*it, "peak_speed_mps", path).get<double>();
        sc.lateral_transition_s = require_field(*it, "lateral_transition_s", path).get<double>();
        sc.accel_mps2 = require_field(*it, "accel_mps2", path).get<double>();
        sc.return_gap_m = require_field(*it, "return_gap_m", path).get<double>();
        spec.ego_script = std::move(sc);
    }
    spec.validate();
    return spec;
}

namespace {

ordered_json record_json(const ManeuverRecord& rec) {
    ordered_json j;
    j["n_overtaken"] = rec.n_overtaken;
    j["t_total_s"] = rec.t_total_s;
    j["tp_s"] = rec.tp_s;
    j["d_total_m"] = rec.d_total_m;
    j["dp_m"] = rec.dp_m;
    j["m1_m"] = rec.m1_m;
    j["m2_m"] = rec.m2_m;
    j["m_m"] = rec.m_m;
    j["m3_m"] = rec.m3_m ? ordered_json(*rec.m3_m) : ordered_json(nullptr);
    j["m4_m"] = rec.m4_m ? ordered_json(*rec.m4_m) : ordered_json(nullptr);
    j["a1_mps"] = rec.a1_mps;
    j["a12_mps"] = rec.a12_mps;
    j["a11_mps"] = rec.a11_mps;
    j["dab_kmh"] = rec.dab_kmh;
    j["opposite_lane_time_s"] = rec.opposite_lane_time_s;
    return j;
}

ordered_json phases_json(const PhaseBoundaries& phases) {
    return {{"t_s", phases.t_s}, {"intrusion", phases.intrusion}};
}

}  // namespace

void save_maneuver(const std::string& path, const PhaseBoundaries& phases,
                   const ManeuverRecord& record) {
    ordered_json j;
    j["phases"] = phases_json(phases);
    j["record"] = record_json(record);
    write_file(path, j.dump(2) + "\n");
}

void save_ground_truth(const std::string& path, const GroundTruth& gt) {
    ordered_json j;
    j["phases"] = phases_json(gt.phases);
    j["record"] = record_json(gt.record);
    j["events"] = {{"script_start_s", gt.events.script_start_s},
                   {"lateral_onset_s", gt.events.lateral_onset_s},
                   {"cross_out_s", gt.events.cross_out_s},
                   {"pass_s", gt.events.pass_s},
                   {"return_start_s", gt.events.return_start_s},
                   {"cross_back_s", gt.events.cross_back_s},
                   {"recentered_s", gt.events.recentered_s},
                   {"transition_end_s", gt.events.transition_end_s},
                   {"speed_restored_s", gt.events.speed_restored_s},
                   {"opposite_lane_span_s", gt.events.opposite_lane_span_s}};
    write_file(path, j.dump(2) + "\n");
}

std::string decision_to_json(const Decision& decision) {
    ordered_json j;
    j["verdict"] = decision.verdict == Verdict::Safe ? "safe" : "unsafe";
    auto reasons = ordered_json::array();
    for (const auto& r : decision.reasons) {
        reasons.push_back({{"rule", to_string(r.rule)}, {"detail", r.detail}});
    }
    j["reasons"] = std::move(reasons);
    j["t_pred_s"] = decision.t_pred_s;
    j["t_avail_s"] =
        std::isinf(decision.t_avail_s) ? ordered_json(nullptr) : ordered_json(decision.t_avail_s);
    j["risk"] = decision.risk;
    j["covariates"] = {{"ud", decision.covariates.ud},
                       {"pd", decision.covariates.pd},
                       {"dab", decision.covariates.dab},
                       {"multiple", decision.covariates.multiple}};
    return j.dump(2) + "\n";
}

void save_decision(const std::string& path, const Decision& decision) {
    write_file(path, decision_to_json(decision));
}

}  // namespace overtake
