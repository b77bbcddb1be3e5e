#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overtake/geometry.hpp"
#include "overtake/maneuver.hpp"

namespace overtake {

// One constant-acceleration leg of a speed profile.
struct SpeedSegment {
    double duration_s = 0.0;
    double accel_mps2 = 0.0;
};

struct VehicleSpec {
    std::string id;
    Direction direction = Direction::WithEgo;
    double initial_s_m = 0.0;
    double initial_d_m = 0.0;
    double initial_speed_mps = 0.0;
    std::vector<SpeedSegment> accel_segments;  // constant speed afterwards
};

// Scripted overtake: accelerate toward the centerline once the gap to the
// lead shrinks to the trigger, hold a peak speed through the opposite lane,
// start the return transition once ahead of the lead by the return gap, then
// decelerate back to the initial speed. Lateral motion follows a normalized
// logistic S-curve over the transition duration.
struct EgoScript {
    std::string ego_id;
    std::string lead_id;
    double trigger_gap_m = 20.0;
    double peak_speed_mps = 16.0;
    double lateral_transition_s = 2.0;
    double accel_mps2 = 1.5;
    double return_gap_m = 7.0;
};

struct ScenarioSpec {
    RoadGeometry road;
    std::vector<VehicleSpec> vehicles;
    std::optional<EgoScript> ego_script;
    double dt_s = 0.1;
    double duration_s = 20.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Continuous-time truth of the scripted maneuver, before grid snapping.
struct ScriptEvents {
    double script_start_s = 0.0;     // gap trigger reached
    double lateral_onset_s = 0.0;    // lateral velocity reaches the detection threshold
    double cross_out_s = 0.0;        // centerline crossing into the opposite lane
    double pass_s = 0.0;             // ego's position passes the lead's
    double return_start_s = 0.0;     // return transition begins
    double cross_back_s = 0.0;       // centerline crossing back
    double recentered_s = 0.0;       // within the recenter tolerance of home
    double transition_end_s = 0.0;   // lateral return complete, deceleration starts
    double speed_restored_s = 0.0;   // speed back within tolerance of the start speed
    double opposite_lane_span_s = 0.0;  // cross_back - cross_out
};

struct GroundTruth {
    PhaseBoundaries phases;  // boundaries snapped to the sample grid
    ManeuverRecord record;   // variables computed from the sampled traces
    ScriptEvents events;
};

struct CollisionReport {
    double t_s = 0.0;
    std::string vehicle_a;
    std::string vehicle_b;
};

struct SimOutput {
    std::vector<Trace> traces;  // common clock, sample period dt_s
    std::string ego_id;
    double dt_s = 0.0;
    std::optional<GroundTruth> ground_truth;
    std::optional<CollisionReport> collision;  // traces truncated at the report time
};

// Deterministic kinematic integration of the scenario. Positions are evaluated
// from closed-form piecewise-constant-acceleration profiles at every sample,
// so integrating the speed series reproduces the position series exactly.
SimOutput run_scenario(const ScenarioSpec& spec);

struct RenderedObservation {
    double t_s = 0.0;
    std::string vehicle_id;
    ImageObservation obs;
};

// Project every vehicle ahead of the ego (depth 0 < Z <= 60 m) through the
// camera at each sample.
std::vector<RenderedObservation> render_observations(const SimOutput& sim,
                                                     const CameraModel& camera);

// Seeded zero-mean Gaussian noise on s, d (sigma_pos) and v (sigma_speed),
// independently per sample. Zero sigmas reproduce the input exactly.
std::vector<Trace> add_gps_noise(const std::vector<Trace>& traces, double sigma_pos_m,
                                 double sigma_speed_mps, std::uint64_t seed);

// The stock two-lane overtake used across tests and docs: ego bike at 12 m/s
// overtaking an 8 m/s car, distant oncoming traffic, one far platoon vehicle.
// Tuned so the scripted opposite-lane span lands near 4 s.
ScenarioSpec default_overtake_scenario();

}  // namespace overtake
