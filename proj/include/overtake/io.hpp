#pragma once

#include <optional>
#include <string>
#include <vector>

#include "overtake/avoidance.hpp"
#include "overtake/fit.hpp"
#include "overtake/geometry.hpp"
#include "overtake/maneuver.hpp"
#include "overtake/sim.hpp"
#include "overtake/survival.hpp"

namespace overtake {

// Extra information persisted next to a fitted model inside the model JSON.
struct FitMeta {
    double log_likelihood = 0.0;
    std::size_t n_observations = 0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> beta_se;
    double gamma_se = 0.0;
};

// Model JSON document, schema version 1:
//   {"schema_version":1, "mode":"paper"|"standard", "gamma":g,
//    "coefficients":[{"name":n,"beta":b},...], "fit_meta":{...}|null}
// Numbers round-trip bit-exactly.
void save_model(const std::string& path, const LogLogisticAft& model,
                const std::optional<FitMeta>& meta = std::nullopt);
LogLogisticAft load_model(const std::string& path);
std::optional<FitMeta> load_fit_meta(const std::string& path);

// Resolves either a file path or the built-in fixture name "paper-table".
LogLogisticAft resolve_model(const std::string& path_or_name);

// Duration observations: CSV `duration_s,ud_m,pd_m,dab_kmh,multiple`.
void save_observations_csv(const std::string& path, const std::vector<DurationObservation>& data);
std::vector<DurationObservation> load_observations_csv(const std::string& path);

// Vehicle traces: CSV `t_s,vehicle_id,direction,s_m,d_m,v_mps`, grouped by
// vehicle in first-appearance order. Doubles are written with the shortest
// representation that parses back bit-exactly.
void save_traces_csv(const std::string& path, const std::vector<Trace>& traces);
std::vector<Trace> load_traces_csv(const std::string& path);

// Camera intrinsics: JSON {"c_px":..., "y1_m":..., "y_g_px":...}.
void save_camera(const std::string& path, const CameraModel& camera);
CameraModel load_camera(const std::string& path);

// Calibration measurements: CSV `session,target_m,y_f_px,x_offset_px`.
// Rows sharing a session id must share the target distance.
void save_calibration_csv(const std::string& path, const CalibrationSet& set);
CalibrationSet load_calibration_csv(const std::string& path);

// Traffic snapshot JSON for the decide workflow.
void save_snapshot(const std::string& path, const TrafficSnapshot& snapshot);
TrafficSnapshot load_snapshot(const std::string& path);

// Scenario spec JSON for the simulate workflow.
void save_scenario(const std::string& path, const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::string& path);

// Maneuver extraction output: phases plus the variables record, with nulls
// for absent optionals.
void save_maneuver(const std::string& path, const PhaseBoundaries& phases,
                   const ManeuverRecord& record);

// Simulator ground truth (phases + record + script events).
void save_ground_truth(const std::string& path, const GroundTruth& gt);

std::string decision_to_json(const Decision& decision);
void save_decision(const std::string& path, const Decision& decision);

}  // namespace overtake
