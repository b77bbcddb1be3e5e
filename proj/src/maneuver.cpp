#include "overtake/maneuver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace overtake {

namespace {

constexpr double kTimeEps = 1e-9;  // slack for window membership on sampled grids

double interpolate(const std::vector<TraceSample>& samples, double t,
                   double TraceSample::*field) {
    if (t <= samples.front().t_s) return samples.front().*field;
    if (t >= samples.back().t_s) return samples.back().*field;
    const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                     [](double v, const TraceSample& s) { return v < s.t_s; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (t == lo.t_s) return lo.*field;
    const double w = (t - lo.t_s) / (hi.t_s - lo.t_s);
    return lo.*field + w * (hi.*field - lo.*field);
}

// Least-squares slope of `field` over samples within [t_k - w/2, t_k + w/2].
// On a uniform grid with w = 2*dt this reduces to the central difference.
double window_slope(const std::vector<TraceSample>& samples, std::size_t k, double window_s,
                    double TraceSample::*field) {
    const double t_center = samples[k].t_s;
    const double lo = t_center - window_s / 2.0 - kTimeEps;
    const double hi = t_center + window_s / 2.0 + kTimeEps;
    std::size_t first = k, last = k;
    while (first > 0 && samples[first - 1].t_s >= lo) --first;
    while (last + 1 < samples.size() && samples[last + 1].t_s <= hi) ++last;
    if (last == first) {  // fall back to a one-sided difference at the edges
        if (last + 1 < samples.size()) ++last;
        else if (first > 0) --first;
        else return 0.0;
    }
    double mean_t = 0.0, mean_y = 0.0;
    const double n = static_cast<double>(last - first + 1);
    for (std::size_t j = first; j <= last; ++j) {
        mean_t += samples[j].t_s;
        mean_y += samples[j].*field;
    }
    mean_t /= n;
    mean_y /= n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t j = first; j <= last; ++j) {
        const double dt = samples[j].t_s - mean_t;
        stt += dt * dt;
        sty += dt * (samples[j].*field - mean_y);
    }
    return stt > 0.0 ? sty / stt : 0.0;
}

// True when `pred` holds at every sample in [t_k, t_k + span].
template <typename Pred>
bool sustained(const std::vector<TraceSample>& samples, std::size_t k, double span_s, Pred pred) {
    const double hi = samples[k].t_s + span_s + kTimeEps;
    for (std::size_t j = k; j < samples.size() && samples[j].t_s <= hi; ++j) {
        if (!pred(j)) return false;
    }
    return true;
}

}  // namespace

const char* to_string(Direction d) {
    return d == Direction::WithEgo ? "with_ego" : "oncoming";
}

Direction direction_from_string(const std::string& s) {
    if (s == "with_ego") return Direction::WithEgo;
    if (s == "oncoming") return Direction::Oncoming;
    throw std::invalid_argument("unknown direction \"" + s +
                                "\" (expected \"with_ego\" or \"oncoming\")");
}

void RoadGeometry::validate() const {
    if (!(lane_width_m > 0.0) || !std::isfinite(lane_width_m)) {
        throw std::invalid_argument("lane width must be > 0 m");
    }
    if (num_lanes != 2) {
        throw std::invalid_argument("only two-lane roads are supported, got " +
                                    std::to_string(num_lanes) + " lanes");
    }
}

Trace::Trace(std::string vehicle_id, Direction direction, std::vector<TraceSample> samples)
    : id_(std::move(vehicle_id)), direction_(direction), samples_(std::move(samples)) {
    if (id_.empty()) throw std::invalid_argument("trace needs a vehicle id");
    if (samples_.size() < 2) {
        throw std::invalid_argument("trace for \"" + id_ + "\" needs at least 2 samples");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t_s) || !std::isfinite(s.s_m) || !std::isfinite(s.d_m) ||
            !std::isfinite(s.v_mps)) {
            throw std::invalid_argument("trace for \"" + id_ + "\" has a non-finite sample at index " +
                                        std::to_string(i));
        }
        if (i > 0 && !(s.t_s > samples_[i - 1].t_s)) {
            throw std::invalid_argument("trace for \"" + id_ +
                                        "\" has non-increasing timestamps at index " +
                                        std::to_string(i));
        }
    }
}

double Trace::s_at(double t_s) const { return interpolate(samples_, t_s, &TraceSample::s_m); }
double Trace::d_at(double t_s) const { return interpolate(samples_, t_s, &TraceSample::d_m); }
double Trace::v_at(double t_s) const { return interpolate(samples_, t_s, &TraceSample::v_mps); }

double PhaseBoundaries::period_duration(int period_1_to_5) const {
    if (period_1_to_5 < 1 || period_1_to_5 > 5) {
        throw std::out_of_range("period must be 1..5");
    }
    return t_s[static_cast<std::size_t>(period_1_to_5)] -
           t_s[static_cast<std::size_t>(period_1_to_5 - 1)];
}

void PhaseBoundaries::validate() const {
    // t0 < t1 <= t2 <= t3 <= t4 < t5.
    if (!(t_s[0] < t_s[1])) {
        throw std::logic_error("phase boundaries must advance past t0");
    }
    for (int i = 1; i < 4; ++i) {
        if (t_s[static_cast<std::size_t>(i)] > t_s[static_cast<std::size_t>(i + 1)]) {
            throw std::logic_error("phase boundaries out of order at t" + std::to_string(i));
        }
    }
    if (!(t_s[4] < t_s[5])) {
        throw std::logic_error("period 5 must have positive duration");
    }
}

PhaseBoundaries segment_phases(const Trace& ego, const Trace& lead, const RoadGeometry& road,
                               const SegmentationConfig& config) {
    road.validate();
    const auto& samples = ego.samples();
    const double half_width = road.half_width_m();
    for (const auto& s : samples) {
        if (std::abs(s.d_m) > half_width + kTimeEps) {
            throw std::invalid_argument("ego lateral offset " + std::to_string(s.d_m) +
                                        " m exceeds the road half-width " +
                                        std::to_string(half_width) + " m");
        }
    }
    if (lead.direction() != Direction::WithEgo) {
        throw NoManeuverError("lead vehicle \"" + lead.id() + "\" travels oncoming");
    }
    if (lead.s_at(samples.front().t_s) <= samples.front().s_m) {
        throw NoManeuverError("no lead vehicle ahead of ego at trace start");
    }

    const auto lat_vel = [&](std::size_t k) {
        return window_slope(samples, k, config.lateral_velocity_window_s, &TraceSample::d_m);
    };
    const auto accel = [&](std::size_t k) {
        return window_slope(samples, k, config.accel_window_s, &TraceSample::v_mps);
    };

    // Period-1 trigger: lateral velocity toward the centerline above threshold,
    // sustained, while accelerating.
    std::optional<std::size_t> trigger;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        if (accel(k) <= config.accel_threshold_mps2) continue;
        const bool lat_ok = sustained(samples, k, config.sustain_s, [&](std::size_t j) {
            return lat_vel(j) > config.lateral_velocity_threshold_mps;
        });
        if (lat_ok) {
            trigger = k;
            break;
        }
    }
    if (!trigger) {
        throw NoManeuverError("no overtaking trigger found (no sustained motion toward the "
                              "centerline under acceleration)");
    }
    // Attribute the trigger to the onset of the acceleration run the lateral
    // evidence confirmed.
    std::size_t k0 = *trigger;
    while (k0 > 0 && accel(k0 - 1) > config.accel_threshold_mps2 &&
           samples[*trigger].t_s - samples[k0 - 1].t_s <=
               config.trigger_backtrack_limit_s + kTimeEps) {
        --k0;
    }
    const double d_home = samples[k0].d_m;
    const double a1 = samples[k0].v_mps;

    // First sustained centerline crossing after the trigger.
    std::optional<std::size_t> k_cross_out;
    for (std::size_t k = k0 + 1; k < samples.size(); ++k) {
        if (samples[k - 1].d_m <= 0.0 && samples[k].d_m > 0.0) {
            const bool holds = sustained(samples, k, config.crossing_hysteresis_s,
                                         [&](std::size_t j) { return samples[j].d_m > 0.0; });
            if (holds) {
                k_cross_out = k;
                break;
            }
        }
    }

    PhaseBoundaries phases;
    phases.t_s[0] = samples[k0].t_s;

    std::size_t k4 = k0;  // index where period 5 starts
    if (!k_cross_out) {
        // No intrusion: the lateral approach fizzles out within the own lane.
        phases.intrusion = false;
        std::size_t k_peak = samples.size() - 1;
        for (std::size_t k = k0 + 1; k < samples.size(); ++k) {
            if (lat_vel(k) <= 0.0) {
                k_peak = k;
                break;
            }
        }
        phases.t_s[1] = phases.t_s[2] = phases.t_s[3] = phases.t_s[4] = samples[k_peak].t_s;
        k4 = k_peak;
    } else {
        phases.intrusion = true;
        const std::size_t k1 = *k_cross_out;
        phases.t_s[1] = samples[k1].t_s;

        // Sustained return crossing.
        std::optional<std::size_t> k_cross_back;
        for (std::size_t k = k1 + 1; k < samples.size(); ++k) {
            if (samples[k - 1].d_m >= 0.0 && samples[k].d_m < 0.0) {
                const bool holds = sustained(samples, k, config.crossing_hysteresis_s,
                                             [&](std::size_t j) { return samples[j].d_m < 0.0; });
                if (holds) {
                    k_cross_back = k;
                    break;
                }
            }
        }
        if (!k_cross_back) {
            throw NoManeuverError("maneuver incomplete: ego never returns to its own lane");
        }
        const std::size_t k3 = *k_cross_back;
        phases.t_s[3] = samples[k3].t_s;

        // Pass instant within the opposite-lane window; an aborted attempt
        // (no pass) collapses period 3 to empty.
        std::size_t k2 = k3;
        for (std::size_t k = k1; k <= k3; ++k) {
            if (samples[k].s_m >= lead.s_at(samples[k].t_s)) {
                k2 = k;
                break;
            }
        }
        phases.t_s[2] = samples[k2].t_s;
        if (phases.t_s[2] < phases.t_s[1]) phases.t_s[2] = phases.t_s[1];

        // Re-centered in the own lane.
        std::optional<std::size_t> k_recentered;
        for (std::size_t k = k3; k < samples.size(); ++k) {
            if (std::abs(samples[k].d_m - d_home) <= config.recenter_tolerance_m) {
                k_recentered = k;
                break;
            }
        }
        if (!k_recentered || *k_recentered + 1 >= samples.size()) {
            throw NoManeuverError("trace ends before ego re-centers in its own lane");
        }
        k4 = *k_recentered;
        phases.t_s[4] = samples[k4].t_s;
    }

    // Period 5 ends when speed returns within tolerance of the pre-maneuver
    // speed; if it never does, the maneuver runs to the end of the trace.
    std::size_t k5 = samples.size() - 1;
    for (std::size_t k = k4 + 1; k < samples.size(); ++k) {
        if (std::abs(samples[k].v_mps - a1) <= config.speed_return_fraction * std::abs(a1)) {
            k5 = k;
            break;
        }
    }
    if (k5 <= k4) {
        throw NoManeuverError("trace ends before the maneuver completes");
    }
    phases.t_s[5] = samples[k5].t_s;
    phases.validate();
    return phases;
}

namespace {

const Trace& find_trace(const std::vector<Trace>& traces, const std::string& id) {
    for (const auto& t : traces) {
        if (t.id() == id) return t;
    }
    throw std::invalid_argument("no trace for vehicle \"" + id + "\"");
}

}  // namespace

ManeuverRecord extract_variables(const std::vector<Trace>& all_traces,
                                 const PhaseBoundaries& phases, const RoadGeometry& road,
                                 const std::string& ego_id, const std::string& lead_id) {
    road.validate();
    phases.validate();
    const Trace& ego = find_trace(all_traces, ego_id);
    const Trace& lead = find_trace(all_traces, lead_id);
    const auto& t = phases.t_s;
    if (!ego.covers(t[0]) || !ego.covers(t[5])) {
        throw std::invalid_argument("phase boundaries fall outside the ego trace");
    }

    ManeuverRecord rec;
    rec.a1_mps = ego.v_at(t[0]);
    rec.a12_mps = ego.v_at(t[1]);
    rec.a11_mps = ego.v_at(t[3]);
    rec.dab_kmh = (rec.a1_mps - lead.v_at(t[0])) * 3.6;

    rec.m1_m = lead.s_at(t[0]) - ego.s_at(t[0]);
    if (rec.m1_m < 0.0) {
        throw std::invalid_argument("lead vehicle behind ego at maneuver start");
    }
    // Negative when the maneuver never completed a pass.
    rec.m2_m = ego.s_at(t[4]) - lead.s_at(t[4]);

    // Minimum lateral clearance to the lead during period 3.
    double min_clearance = std::numeric_limits<double>::infinity();
    for (const auto& s : ego.samples()) {
        if (s.t_s < t[2] || s.t_s > t[3]) continue;
        min_clearance = std::min(min_clearance, std::abs(s.d_m - lead.d_at(s.t_s)));
    }
    if (!std::isfinite(min_clearance)) {
        min_clearance = std::abs(ego.d_at(t[2]) - lead.d_at(t[2]));
    }
    rec.m_m = min_clearance;

    // Nearest oncoming vehicle ahead of ego at the intrusion start.
    const double ego_s1 = ego.s_at(t[1]);
    double best_oncoming = std::numeric_limits<double>::infinity();
    for (const auto& tr : all_traces) {
        if (tr.direction() != Direction::Oncoming || !tr.covers(t[1])) continue;
        const double gap = tr.s_at(t[1]) - ego_s1;
        if (gap >= 0.0 && gap < best_oncoming) best_oncoming = gap;
    }
    if (std::isfinite(best_oncoming)) rec.m3_m = best_oncoming;

    // Nearest same-direction vehicle ahead of the lead (next platoon member).
    const double lead_s1 = lead.s_at(t[1]);
    double best_platoon = std::numeric_limits<double>::infinity();
    for (const auto& tr : all_traces) {
        if (tr.direction() != Direction::WithEgo || tr.id() == ego_id || tr.id() == lead_id ||
            !tr.covers(t[1])) {
            continue;
        }
        const double gap = tr.s_at(t[1]) - lead_s1;
        if (gap >= 0.0 && gap < best_platoon) best_platoon = gap;
    }
    if (std::isfinite(best_platoon)) rec.m4_m = best_platoon;

    rec.t_total_s = phases.total_duration();
    for (int p = 1; p <= 4; ++p) {
        rec.tp_s[static_cast<std::size_t>(p - 1)] = phases.period_duration(p);
        rec.dp_m[static_cast<std::size_t>(p - 1)] =
            ego.s_at(t[static_cast<std::size_t>(p)]) - ego.s_at(t[static_cast<std::size_t>(p - 1)]);
    }
    rec.d_total_m = ego.s_at(t[5]) - ego.s_at(t[0]);
    rec.opposite_lane_time_s = opposite_lane_occupancy(phases, ego);
    rec.n_overtaken = count_overtaken(all_traces, phases, ego_id);
    return rec;
}

double opposite_lane_occupancy(const PhaseBoundaries& phases, const Trace& ego) {
    phases.validate();
    const double t_begin = phases.t_s[0];
    const double t_end = phases.t_s[5];
    const auto& samples = ego.samples();
    double occupancy = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        double ta = std::max(samples[i].t_s, t_begin);
        double tb = std::min(samples[i + 1].t_s, t_end);
        if (ta >= tb) continue;
        const double span = samples[i + 1].t_s - samples[i].t_s;
        const double da = samples[i].d_m + (ta - samples[i].t_s) / span * (samples[i + 1].d_m - samples[i].d_m);
        const double db = samples[i].d_m + (tb - samples[i].t_s) / span * (samples[i + 1].d_m - samples[i].d_m);
        if (da > 0.0 && db > 0.0) {
            occupancy += tb - ta;
        } else if (da > 0.0 || db > 0.0) {
            // One interpolated zero crossing inside [ta, tb].
            const double cross = ta + (tb - ta) * da / (da - db);
            occupancy += da > 0.0 ? cross - ta : tb - cross;
        }
    }
    return occupancy;
}

int count_overtaken(const std::vector<Trace>& all_traces, const PhaseBoundaries& phases,
                    const std::string& ego_id) {
    phases.validate();
    const Trace& ego = find_trace(all_traces, ego_id);
    const double t0 = phases.t_s[0];
    const double t5 = phases.t_s[5];
    const double ego_s0 = ego.s_at(t0);
    const double ego_s5 = ego.s_at(t5);
    int count = 0;
    for (const auto& tr : all_traces) {
        if (tr.direction() != Direction::WithEgo || tr.id() == ego_id) continue;
        if (tr.s_at(t0) >= ego_s0 && tr.s_at(t5) < ego_s5) ++count;
    }
    return count;
}

}  // namespace overtake
