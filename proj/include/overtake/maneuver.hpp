#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace overtake {

enum class Direction { WithEgo, Oncoming };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

// Two-lane road; the centerline sits at lateral offset 0, the ego lane center
// at -lane_width/2 and the opposite lane center at +lane_width/2.
struct RoadGeometry {
    double lane_width_m = 4.0;
    int num_lanes = 2;

    double half_width_m() const { return lane_width_m * num_lanes / 2.0; }
    void validate() const;
};

// State of one vehicle at one instant. Lateral offset d is signed from the
// centerline: ego's own lane negative, the opposite lane positive.
struct TraceSample {
    double t_s = 0.0;
    double s_m = 0.0;    // longitudinal position along the road axis
    double d_m = 0.0;    // signed lateral offset from the centerline
    double v_mps = 0.0;  // speed magnitude in the vehicle's own direction
};

// Time series for one vehicle with strictly increasing timestamps. Values at
// arbitrary times come from linear interpolation, clamped at the ends.
class Trace {
public:
    Trace(std::string vehicle_id, Direction direction, std::vector<TraceSample> samples);

    const std::string& id() const { return id_; }
    Direction direction() const { return direction_; }
    const std::vector<TraceSample>& samples() const { return samples_; }

    double start_time() const { return samples_.front().t_s; }
    double end_time() const { return samples_.back().t_s; }
    bool covers(double t_s) const { return t_s >= start_time() && t_s <= end_time(); }

    double s_at(double t_s) const;
    double d_at(double t_s) const;
    double v_at(double t_s) const;

private:
    std::string id_;
    Direction direction_;
    std::vector<TraceSample> samples_;
};

struct NoManeuverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thresholds for phase detection. Derivatives are least-squares slopes over a
// centered window; the 0.2 s defaults make that the classic central
// difference on a 10 Hz grid. Widen the windows for noisy positioning data.
struct SegmentationConfig {
    double lateral_velocity_threshold_mps = 0.1;  // toward the centerline
    double sustain_s = 0.3;
    double accel_threshold_mps2 = 0.1;
    double crossing_hysteresis_s = 0.2;
    double recenter_tolerance_m = 0.3;
    double speed_return_fraction = 0.05;
    double lateral_velocity_window_s = 0.2;
    double accel_window_s = 0.2;
    // Once the lateral evidence confirms a trigger, the boundary is pulled
    // back to the start of the surrounding acceleration run (at most this
    // far), anchoring t0 and the pre-maneuver speed a1 on the speed signal.
    double trigger_backtrack_limit_s = 1.0;
};

// The five maneuver periods as contiguous half-open intervals
// [t0,t1) .. [t4,t5):
//   1 approach: sustained motion toward the centerline under acceleration
//   2 begins at the first centerline crossing
//   3 begins when ego's longitudinal position passes the lead's
//   4 begins at the return centerline crossing
//   5 begins once re-centered in the own lane, ends at speed recovery
// All boundaries are ego sample timestamps.
struct PhaseBoundaries {
    std::array<double, 6> t_s{};
    bool intrusion = false;  // ego crossed the centerline (periods 2-4 non-degenerate)

    double period_duration(int period_1_to_5) const;
    double total_duration() const { return t_s[5] - t_s[0]; }
    void validate() const;
};

// The full variables record for one maneuver. m3/m4 stay empty when the
// scenario has no oncoming vehicle or no platoon vehicle ahead of the lead.
struct ManeuverRecord {
    int n_overtaken = 0;
    double t_total_s = 0.0;
    std::array<double, 4> tp_s{};  // durations of periods 1-4
    double d_total_m = 0.0;
    std::array<double, 4> dp_m{};  // ego distance covered in periods 1-4
    double m1_m = 0.0;             // gap ego -> lead at period-1 start
    double m2_m = 0.0;             // gap lead -> ego at period-4 end
    double m_m = 0.0;              // min lateral clearance to lead in period 3
    std::optional<double> m3_m;    // gap ego -> oncoming at period-2 start
    std::optional<double> m4_m;    // gap lead -> next platoon vehicle at period-2 start
    double a1_mps = 0.0;           // ego speed at period-1 start
    double a12_mps = 0.0;          // ego speed at the first crossing
    double a11_mps = 0.0;          // ego speed at the return crossing
    double dab_kmh = 0.0;          // (a1 - lead speed) * 3.6
    double opposite_lane_time_s = 0.0;
};

PhaseBoundaries segment_phases(const Trace& ego, const Trace& lead, const RoadGeometry& road,
                               const SegmentationConfig& config = {});

ManeuverRecord extract_variables(const std::vector<Trace>& all_traces,
                                 const PhaseBoundaries& phases, const RoadGeometry& road,
                                 const std::string& ego_id, const std::string& lead_id);

// Time the ego spends beyond the centerline (d > 0) within the maneuver
// window, with piecewise-linear crossing interpolation.
double opposite_lane_occupancy(const PhaseBoundaries& phases, const Trace& ego);

// Same-direction vehicles whose longitudinal position the ego passes between
// period-1 start and period-5 end.
int count_overtaken(const std::vector<Trace>& all_traces, const PhaseBoundaries& phases,
                    const std::string& ego_id);

}  // namespace overtake
