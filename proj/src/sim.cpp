#include "overtake/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "overtake/rng.hpp"

namespace overtake {

namespace {

constexpr double kLogisticSteepness = 12.0;  // lateral S-curve shape
constexpr double kMaxRenderRangeM = 60.0;
constexpr double kCollisionLongitudinalM = 2.0;
constexpr double kCollisionLateralM = 1.0;
constexpr double kTimeEps = 1e-9;

// Normalized logistic easing: exactly 0 at u=0 and 1 at u=1, midpoint 0.5.
double ease(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double lo = 1.0 / (1.0 + std::exp(kLogisticSteepness * 0.5));
    const double hi = 1.0 / (1.0 + std::exp(-kLogisticSteepness * 0.5));
    const double v = 1.0 / (1.0 + std::exp(-kLogisticSteepness * (u - 0.5)));
    return (v - lo) / (hi - lo);
}

double ease_slope(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double lo = 1.0 / (1.0 + std::exp(kLogisticSteepness * 0.5));
    const double hi = 1.0 / (1.0 + std::exp(-kLogisticSteepness * 0.5));
    const double v = 1.0 / (1.0 + std::exp(-kLogisticSteepness * (u - 0.5)));
    return kLogisticSteepness * v * (1.0 - v) / (hi - lo);
}

// Piecewise-constant-acceleration speed profile with closed-form
// displacement. Speed is constant after the last breakpoint.
class SpeedProfile {
public:
    explicit SpeedProfile(double v0) {
        times_ = {0.0};
        speeds_ = {v0};
        disps_ = {0.0};
    }

    // Accelerate at `accel` from the last breakpoint until absolute time t_end.
    void append_until(double accel, double t_end) {
        const double t0 = times_.back();
        if (t_end <= t0 + kTimeEps) return;
        const double dt = t_end - t0;
        const double v0 = speeds_.back();
        const double v1 = v0 + accel * dt;
        if (v1 < -kTimeEps) {
            throw std::invalid_argument("speed profile goes negative");
        }
        accels_.push_back(accel);
        times_.push_back(t_end);
        speeds_.push_back(std::max(v1, 0.0));
        disps_.push_back(disps_.back() + (v0 + v1) / 2.0 * dt);
    }

    // Decelerate (accel < 0) from the last breakpoint down to v_target.
    void append_decel_to(double accel, double v_target) {
        const double v0 = speeds_.back();
        if (v_target >= v0 - kTimeEps) return;
        append_until(accel, times_.back() + (v_target - v0) / accel);
    }

    double speed(double t) const {
        const std::size_t i = segment_of(t);
        if (i + 1 >= times_.size()) return speeds_.back();
        return speeds_[i] + accels_[i] * (t - times_[i]);
    }

    double displacement(double t) const {
        const std::size_t i = segment_of(t);
        if (i + 1 >= times_.size()) return disps_.back() + speeds_.back() * (t - times_.back());
        const double dt = t - times_[i];
        return disps_[i] + speeds_[i] * dt + 0.5 * accels_[i] * dt * dt;
    }

private:
    std::size_t segment_of(double t) const {
        std::size_t i = 0;
        while (i + 1 < times_.size() && t >= times_[i + 1]) ++i;
        return i;
    }

    std::vector<double> times_, speeds_, disps_;
    std::vector<double> accels_;
};

// First t in [lo, hi] where pred flips false -> true, located by a coarse
// scan at `step` followed by bisection. Returns nullopt when pred never
// fires.
template <typename Pred>
std::optional<double> first_crossing(double lo, double hi, double step, Pred pred) {
    if (pred(lo)) return lo;
    double prev = lo;
    for (double t = lo + step; t < hi + step; t += step) {
        const double clamped = std::min(t, hi);
        if (pred(clamped)) {
            double a = prev, b = clamped;
            for (int i = 0; i < 200 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++i) {
                const double mid = (a + b) / 2.0;
                (pred(mid) ? b : a) = mid;
            }
            return b;
        }
        if (clamped >= hi) break;
        prev = clamped;
    }
    return std::nullopt;
}

struct VehicleSim {
    const VehicleSpec* spec;
    SpeedProfile profile;
    bool scripted = false;

    double s_at(double t) const {
        const double disp = profile.displacement(t);
        return spec->direction == Direction::WithEgo ? spec->initial_s_m + disp
                                                     : spec->initial_s_m - disp;
    }
    double v_at(double t) const { return profile.speed(t); }
};

const VehicleSpec& find_vehicle(const ScenarioSpec& spec, const std::string& id) {
    for (const auto& v : spec.vehicles) {
        if (v.id == id) return v;
    }
    throw std::invalid_argument("ego script references unknown vehicle \"" + id + "\"");
}

}  // namespace

void ScenarioSpec::validate() const {
    road.validate();
    if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
        throw std::invalid_argument("dt must be > 0 s");
    }
    if (!(duration_s >= dt_s) || !std::isfinite(duration_s)) {
        throw std::invalid_argument("duration must cover at least one sample period");
    }
    if (vehicles.empty()) throw std::invalid_argument("scenario has no vehicles");
    std::set<std::string> ids;
    for (const auto& v : vehicles) {
        if (v.id.empty()) throw std::invalid_argument("vehicle id must not be empty");
        if (!ids.insert(v.id).second) {
            throw std::invalid_argument("duplicate vehicle id \"" + v.id + "\"");
        }
        if (std::abs(v.initial_d_m) > road.half_width_m()) {
            throw std::invalid_argument("vehicle \"" + v.id + "\" starts off the road");
        }
        if (v.initial_speed_mps < 0.0) {
            throw std::invalid_argument("vehicle \"" + v.id + "\" has negative speed");
        }
        for (const auto& seg : v.accel_segments) {
            if (!(seg.duration_s > 0.0)) {
                throw std::invalid_argument("speed segment durations must be > 0");
            }
        }
    }
    if (ego_script) {
        const auto& script = *ego_script;
        const VehicleSpec& ego = find_vehicle(*this, script.ego_id);
        const VehicleSpec& lead = find_vehicle(*this, script.lead_id);
        if (ego.direction != Direction::WithEgo || lead.direction != Direction::WithEgo) {
            throw std::invalid_argument("scripted ego and lead must travel with the ego direction");
        }
        if (!ego.accel_segments.empty()) {
            throw std::invalid_argument("scripted ego must start from a constant-speed profile");
        }
        if (ego.initial_d_m >= 0.0) {
            throw std::invalid_argument("scripted ego must start in its own lane (d < 0)");
        }
        if (lead.initial_s_m <= ego.initial_s_m) {
            throw std::invalid_argument("scripted lead must start ahead of the ego");
        }
        if (!(script.trigger_gap_m > 0.0) || !(script.return_gap_m > 0.0)) {
            throw std::invalid_argument("script gaps must be > 0 m");
        }
        if (!(script.peak_speed_mps > ego.initial_speed_mps)) {
            throw std::invalid_argument("script peak speed must exceed the ego start speed");
        }
        if (!(script.accel_mps2 > 0.0)) throw std::invalid_argument("script accel must be > 0");
        if (!(script.lateral_transition_s > 0.0)) {
            throw std::invalid_argument("lateral transition must be > 0 s");
        }
    }
}

SimOutput run_scenario(const ScenarioSpec& spec) {
    spec.validate();
    const SegmentationConfig detect;  // ground truth aligns with default detection

    // Closed-form profiles for every unscripted vehicle.
    std::vector<VehicleSim> sims;
    sims.reserve(spec.vehicles.size());
    for (const auto& v : spec.vehicles) {
        SpeedProfile profile(v.initial_speed_mps);
        double t = 0.0;
        for (const auto& seg : v.accel_segments) {
            t += seg.duration_s;
            profile.append_until(seg.accel_mps2, t);
        }
        sims.push_back({&v, std::move(profile), false});
    }

    SimOutput out;
    out.dt_s = spec.dt_s;
    out.ego_id = spec.ego_script ? spec.ego_script->ego_id : spec.vehicles.front().id;

    // Scripted maneuver: solve the continuous event times, then rebuild the
    // ego profile with the acceleration and deceleration legs.
    std::optional<ScriptEvents> events;
    double script_d_home = 0.0, script_d_opp = 0.0;
    double script_tau0 = 0.0, script_return = 0.0;
    bool script_out_leg = false, script_back_leg = false;
    std::size_t ego_index = 0;

    if (spec.ego_script) {
        const auto& script = *spec.ego_script;
        for (std::size_t i = 0; i < sims.size(); ++i) {
            if (sims[i].spec->id == script.ego_id) ego_index = i;
        }
        VehicleSim& ego = sims[ego_index];
        const VehicleSim* lead = nullptr;
        for (const auto& s : sims) {
            if (s.spec->id == script.lead_id) lead = &s;
        }
        ego.scripted = true;
        script_d_home = ego.spec->initial_d_m;
        script_d_opp = spec.road.lane_width_m / 2.0;
        const double v0 = ego.spec->initial_speed_mps;
        const double T = script.lateral_transition_s;

        const auto base_gap = [&](double t) {
            return lead->s_at(t) - (ego.spec->initial_s_m + v0 * t);
        };
        const auto tau0 = first_crossing(0.0, spec.duration_s, spec.dt_s, [&](double t) {
            return base_gap(t) <= script.trigger_gap_m;
        });

        if (tau0) {
            script_tau0 = *tau0;
            script_out_leg = true;

            // Maneuver profile: accelerate to the peak, then hold.
            SpeedProfile man(v0);
            man.append_until(0.0, script_tau0);
            man.append_until(script.accel_mps2,
                             script_tau0 + (script.peak_speed_mps - v0) / script.accel_mps2);
            const auto ego_s = [&](double t) { return ego.spec->initial_s_m + man.displacement(t); };

            const auto pass = first_crossing(script_tau0, spec.duration_s, spec.dt_s, [&](double t) {
                return ego_s(t) >= lead->s_at(t);
            });
            std::optional<double> ret;
            if (pass) {
                ret = first_crossing(*pass, spec.duration_s, spec.dt_s, [&](double t) {
                    return ego_s(t) - lead->s_at(t) >= script.return_gap_m;
                });
            }
            if (ret) {
                if (*ret < script_tau0 + T) {
                    throw std::invalid_argument(
                        "ego script produces overlapping lateral transitions; stretch the "
                        "return gap or shorten the transition");
                }
                script_return = *ret;
                script_back_leg = true;
                ego.profile = std::move(man);
                ego.profile.append_until(0.0, script_return + T);
                ego.profile.append_decel_to(-script.accel_mps2, v0);

                ScriptEvents ev;
                ev.script_start_s = script_tau0;
                ev.pass_s = *pass;
                ev.return_start_s = script_return;
                ev.transition_end_s = script_return + T;

                const double span = script_d_opp - script_d_home;
                const auto d_out = [&](double t) {
                    return script_d_home + span * ease((t - script_tau0) / T);
                };
                const auto d_back = [&](double t) {
                    return script_d_opp - span * ease((t - script_return) / T);
                };
                ev.lateral_onset_s = first_crossing(script_tau0, script_tau0 + T / 2.0, T / 64.0,
                                                    [&](double t) {
                                                        return span *
                                                                   ease_slope((t - script_tau0) / T) /
                                                                   T >=
                                                               detect.lateral_velocity_threshold_mps;
                                                    })
                                         .value_or(script_tau0);
                ev.cross_out_s =
                    first_crossing(script_tau0, script_tau0 + T, T / 64.0,
                                   [&](double t) { return d_out(t) >= 0.0; })
                        .value();
                ev.cross_back_s =
                    first_crossing(script_return, script_return + T, T / 64.0,
                                   [&](double t) { return d_back(t) <= 0.0; })
                        .value();
                ev.recentered_s =
                    first_crossing(script_return, script_return + T, T / 64.0,
                                   [&](double t) {
                                       return d_back(t) - script_d_home <=
                                              detect.recenter_tolerance_m;
                                   })
                        .value();
                ev.opposite_lane_span_s = ev.cross_back_s - ev.cross_out_s;
                events = ev;
            } else {
                // Unfinished maneuver: accelerate and stay out; no ground truth.
                ego.profile = std::move(man);
            }
        }
    }

    const auto ego_d_at = [&](double t) {
        if (!script_out_leg) {
            return sims[ego_index].spec->initial_d_m;
        }
        const double T = spec.ego_script->lateral_transition_s;
        const double span = script_d_opp - script_d_home;
        double d = script_d_home + span * ease((t - script_tau0) / T);
        if (script_back_leg && t >= script_return) {
            d = script_d_opp - span * ease((t - script_return) / T);
        }
        return d;
    };

    // Sample every vehicle on the common clock.
    const auto n_samples = static_cast<std::size_t>(std::floor(spec.duration_s / spec.dt_s + kTimeEps)) + 1;
    std::vector<std::vector<TraceSample>> samples(sims.size());
    for (std::size_t i = 0; i < sims.size(); ++i) {
        samples[i].reserve(n_samples);
        const bool is_ego = spec.ego_script && i == ego_index;
        for (std::size_t k = 0; k < n_samples; ++k) {
            const double t = static_cast<double>(k) * spec.dt_s;
            TraceSample s;
            s.t_s = t;
            s.s_m = sims[i].s_at(t);
            s.d_m = is_ego ? ego_d_at(t) : sims[i].spec->initial_d_m;
            s.v_mps = sims[i].v_at(t);
            samples[i].push_back(s);
        }
    }

    // Collision scan; on a hit, truncate all traces at the report time.
    std::optional<CollisionReport> collision;
    for (std::size_t k = 0; k < n_samples && !collision; ++k) {
        for (std::size_t a = 0; a < sims.size() && !collision; ++a) {
            for (std::size_t b = a + 1; b < sims.size(); ++b) {
                const double ds = std::abs(samples[a][k].s_m - samples[b][k].s_m);
                const double dd = std::abs(samples[a][k].d_m - samples[b][k].d_m);
                if (ds < kCollisionLongitudinalM && dd < kCollisionLateralM) {
                    collision = CollisionReport{samples[a][k].t_s, sims[a].spec->id,
                                                sims[b].spec->id};
                    break;
                }
            }
        }
    }
    if (collision) {
        for (auto& vec : samples) {
            while (!vec.empty() && vec.back().t_s > collision->t_s + kTimeEps) vec.pop_back();
        }
    }

    out.collision = collision;
    for (std::size_t i = 0; i < sims.size(); ++i) {
        if (samples[i].size() >= 2) {
            out.traces.emplace_back(sims[i].spec->id, sims[i].spec->direction,
                                    std::move(samples[i]));
        }
    }

    // Ground truth: snap the continuous events to the sample grid with the
    // same detection predicates the segmenter applies, then read the
    // variables off the sampled traces at those boundaries.
    if (events && !collision) {
        const Trace* ego_trace = nullptr;
        const Trace* lead_trace = nullptr;
        for (const auto& tr : out.traces) {
            if (tr.id() == spec.ego_script->ego_id) ego_trace = &tr;
            if (tr.id() == spec.ego_script->lead_id) lead_trace = &tr;
        }
        if (ego_trace && lead_trace &&
            ego_trace->end_time() + kTimeEps >= events->transition_end_s) {
            const auto& eg = ego_trace->samples();
            const auto& ld = lead_trace->samples();
            const double dt = spec.dt_s;
            const auto index_at_or_after = [&](double t) {
                return static_cast<std::size_t>(
                    std::min<double>(std::ceil(t / dt - kTimeEps), static_cast<double>(eg.size() - 1)));
            };
            const auto central_slope = [&](const std::vector<TraceSample>& v, std::size_t k,
                                           double TraceSample::*field) {
                const std::size_t lo = k > 0 ? k - 1 : k;
                const std::size_t hi = k + 1 < v.size() ? k + 1 : k;
                return (v[hi].*field - v[lo].*field) / (v[hi].t_s - v[lo].t_s);
            };

            // Trigger sample: sustained lateral slope above threshold under
            // acceleration, scanning near the known onset.
            const std::size_t sustain_n =
                static_cast<std::size_t>(std::round(detect.sustain_s / dt));
            std::optional<std::size_t> k0;
            const std::size_t scan_from =
                index_at_or_after(std::max(0.0, events->script_start_s - 1.0));
            for (std::size_t k = scan_from; k + sustain_n + 1 < eg.size(); ++k) {
                if (central_slope(eg, k, &TraceSample::v_mps) <= detect.accel_threshold_mps2) {
                    continue;
                }
                bool ok = true;
                for (std::size_t j = k; j <= k + sustain_n; ++j) {
                    if (central_slope(eg, j, &TraceSample::d_m) <=
                        detect.lateral_velocity_threshold_mps) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    k0 = k;
                    break;
                }
            }
            if (k0) {
                // Pull the boundary back to the acceleration onset, mirroring
                // the segmenter's trigger attribution.
                const std::size_t detected = *k0;
                std::size_t k = detected;
                while (k > 0 &&
                       central_slope(eg, k - 1, &TraceSample::v_mps) >
                           detect.accel_threshold_mps2 &&
                       eg[detected].t_s - eg[k - 1].t_s <=
                           detect.trigger_backtrack_limit_s + kTimeEps) {
                    --k;
                }
                k0 = k;
            }

            std::optional<std::size_t> k4_found, k5_found;
            std::size_t kk0 = 0, k1 = 0, k2 = 0, k3 = 0;
            if (k0) {
                kk0 = *k0;
                k1 = index_at_or_after(events->cross_out_s);
                k3 = index_at_or_after(events->cross_back_s);
                k2 = k3;
                for (std::size_t k = k1; k <= k3; ++k) {
                    if (eg[k].s_m >= ld[k].s_m) {
                        k2 = k;
                        break;
                    }
                }
                for (std::size_t k = k3; k < eg.size(); ++k) {
                    if (std::abs(eg[k].d_m - eg[kk0].d_m) <= detect.recenter_tolerance_m) {
                        k4_found = k;
                        break;
                    }
                }
                const double a1 = eg[kk0].v_mps;
                if (k4_found) {
                    for (std::size_t k = *k4_found + 1; k < eg.size(); ++k) {
                        if (std::abs(eg[k].v_mps - a1) <= detect.speed_return_fraction * a1) {
                            k5_found = k;
                            break;
                        }
                    }
                }
                if (k5_found) {
                    // Continuous speed-recovery instant for the event record.
                    const auto& ego_sim = sims[ego_index];
                    const double band_top = (1.0 + detect.speed_return_fraction) * a1;
                    events->speed_restored_s =
                        first_crossing(events->transition_end_s, eg.back().t_s, spec.dt_s,
                                       [&](double t) { return ego_sim.v_at(t) <= band_top; })
                            .value_or(eg[*k5_found].t_s);
                }
            }
            if (k0 && k4_found && k5_found) {
                PhaseBoundaries phases;
                phases.intrusion = true;
                const std::size_t k4 = *k4_found;
                const std::size_t k5 = *k5_found;
                const double a1 = eg[kk0].v_mps;
                phases.t_s = {eg[kk0].t_s, eg[k1].t_s, eg[k2].t_s,
                              eg[k3].t_s, eg[k4].t_s, eg[k5].t_s};

                ManeuverRecord rec;
                rec.a1_mps = a1;
                rec.a12_mps = eg[k1].v_mps;
                rec.a11_mps = eg[k3].v_mps;
                rec.dab_kmh = (a1 - ld[kk0].v_mps) * 3.6;
                rec.m1_m = ld[kk0].s_m - eg[kk0].s_m;
                rec.m2_m = eg[k4].s_m - ld[k4].s_m;
                double clearance = std::numeric_limits<double>::infinity();
                for (std::size_t k = k2; k <= k3; ++k) {
                    clearance = std::min(clearance, std::abs(eg[k].d_m - ld[k].d_m));
                }
                rec.m_m = clearance;

                double best_oncoming = std::numeric_limits<double>::infinity();
                double best_platoon = std::numeric_limits<double>::infinity();
                for (const auto& tr : out.traces) {
                    if (tr.samples().size() <= k1) continue;
                    const double s1 = tr.samples()[k1].s_m;
                    if (tr.direction() == Direction::Oncoming) {
                        const double gap = s1 - eg[k1].s_m;
                        if (gap >= 0.0) best_oncoming = std::min(best_oncoming, gap);
                    } else if (tr.id() != ego_trace->id() && tr.id() != lead_trace->id()) {
                        const double gap = s1 - ld[k1].s_m;
                        if (gap >= 0.0) best_platoon = std::min(best_platoon, gap);
                    }
                }
                if (std::isfinite(best_oncoming)) rec.m3_m = best_oncoming;
                if (std::isfinite(best_platoon)) rec.m4_m = best_platoon;

                const std::array<std::size_t, 6> idx = {kk0, k1, k2, k3, k4, k5};
                rec.t_total_s = eg[k5].t_s - eg[kk0].t_s;
                for (int p = 1; p <= 4; ++p) {
                    rec.tp_s[static_cast<std::size_t>(p - 1)] =
                        eg[idx[static_cast<std::size_t>(p)]].t_s -
                        eg[idx[static_cast<std::size_t>(p - 1)]].t_s;
                    rec.dp_m[static_cast<std::size_t>(p - 1)] =
                        eg[idx[static_cast<std::size_t>(p)]].s_m -
                        eg[idx[static_cast<std::size_t>(p - 1)]].s_m;
                }
                rec.d_total_m = eg[k5].s_m - eg[kk0].s_m;
                rec.opposite_lane_time_s = events->opposite_lane_span_s;

                int overtaken = 0;
                for (const auto& tr : out.traces) {
                    if (tr.direction() != Direction::WithEgo || tr.id() == ego_trace->id()) continue;
                    if (tr.samples().size() <= k5) continue;
                    if (tr.samples()[kk0].s_m >= eg[kk0].s_m && tr.samples()[k5].s_m < eg[k5].s_m) {
                        ++overtaken;
                    }
                }
                rec.n_overtaken = overtaken;

                out.ground_truth = GroundTruth{phases, rec, *events};
            }
        }
    }

    return out;
}

std::vector<RenderedObservation> render_observations(const SimOutput& sim,
                                                     const CameraModel& camera) {
    camera.validate();
    const Trace* ego = nullptr;
    for (const auto& tr : sim.traces) {
        if (tr.id() == sim.ego_id) ego = &tr;
    }
    if (!ego) throw std::invalid_argument("sim output has no ego trace");

    std::vector<RenderedObservation> out;
    for (const auto& es : ego->samples()) {
        for (const auto& tr : sim.traces) {
            if (tr.id() == sim.ego_id || !tr.covers(es.t_s)) continue;
            const double depth = tr.s_at(es.t_s) - es.s_m;
            if (depth <= 0.0 || depth > kMaxRenderRangeM) continue;
            const double lateral = tr.d_at(es.t_s) - es.d_m;
            out.push_back({es.t_s, tr.id(), project_to_image(camera, depth, lateral, es.t_s)});
        }
    }
    return out;
}

std::vector<Trace> add_gps_noise(const std::vector<Trace>& traces, double sigma_pos_m,
                                 double sigma_speed_mps, std::uint64_t seed) {
    if (sigma_pos_m < 0.0 || sigma_speed_mps < 0.0) {
        throw std::invalid_argument("noise sigmas must be >= 0");
    }
    Rng rng(seed);
    std::vector<Trace> out;
    out.reserve(traces.size());
    for (const auto& tr : traces) {
        std::vector<TraceSample> noisy = tr.samples();
        for (auto& s : noisy) {
            s.s_m += sigma_pos_m * rng.normal();
            s.d_m += sigma_pos_m * rng.normal();
            s.v_mps += sigma_speed_mps * rng.normal();
        }
        out.emplace_back(tr.id(), tr.direction(), std::move(noisy));
    }
    return out;
}

ScenarioSpec default_overtake_scenario() {
    ScenarioSpec spec;
    spec.dt_s = 0.1;
    spec.duration_s = 20.0;
    spec.seed = 1;
    spec.vehicles = {
        {"bike1", Direction::WithEgo, 0.0, -2.0, 12.0, {}},
        {"car1", Direction::WithEgo, 45.3, -2.0, 8.0, {}},
        {"car2", Direction::Oncoming, 500.0, 2.0, 10.0, {}},
        {"bike2", Direction::WithEgo, 200.3, -2.0, 8.0, {}},
    };
    EgoScript script;
    script.ego_id = "bike1";
    script.lead_id = "car1";
    script.trigger_gap_m = 20.0;
    script.peak_speed_mps = 16.0;
    script.lateral_transition_s = 2.0;
    script.accel_mps2 = 1.5;
    script.return_gap_m = 7.0;
    spec.ego_script = script;
    return spec;
}

}  // namespace overtake
