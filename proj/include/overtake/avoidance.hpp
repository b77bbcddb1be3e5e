#pragma once

#include <optional>
#include <string>
#include <vector>

#include "overtake/survival.hpp"

namespace overtake {

// Relative observation of another vehicle: gap along the road axis plus speed
// in the vehicle's own direction of travel (both non-negative).
struct ObservedVehicle {
    double gap_m = 0.0;
    double speed_mps = 0.0;
};

// Instantaneous picture of the traffic around the ego motorcycle. The lead is
// the vehicle to be overtaken; the oncoming vehicle approaches in the
// opposite lane; follower_of_lead is the next same-direction vehicle ahead of
// the lead (its gap is measured from the lead).
struct TrafficSnapshot {
    double timestamp_s = 0.0;
    double ego_position_m = 0.0;
    double ego_speed_mps = 0.0;
    ObservedVehicle lead;
    std::optional<ObservedVehicle> oncoming;
    std::optional<ObservedVehicle> follower_of_lead;

    void validate() const;
};

struct DecisionConfig {
    double time_threshold_s = 6.5;     // predicted duration ceiling
    double distance_threshold_m = 115.0;  // minimum oncoming gap
    double risk_tolerance = 0.05;      // max acceptable overrun probability
    double time_margin = 1.2;          // safety multiplier on the prediction
    double return_gap_m = 7.0;         // target ultimate distance fed to the model
    double platoon_window_m = 30.0;    // platoon membership window ahead of the lead

    void validate() const;
};

enum class DecisionRule {
    OncomingGapBelowThreshold,     // oncoming present and gap < distance threshold
    PredictedExceedsAvailable,     // t_pred * margin > t_avail
    OverrunRiskAboveTolerance,     // P(T > t_avail) > risk tolerance
    PredictedExceedsTimeThreshold  // t_pred > time threshold
};

const char* to_string(DecisionRule rule);

struct TriggeredRule {
    DecisionRule rule;
    std::string detail;
};

enum class Verdict { Safe, Unsafe };

struct Decision {
    Verdict verdict = Verdict::Unsafe;
    std::vector<TriggeredRule> reasons;  // non-empty exactly when Unsafe
    double t_pred_s = 0.0;
    double t_avail_s = 0.0;  // +infinity when unbounded
    double risk = 0.0;       // survival probability at t_avail
    CovariateVector covariates;
};

// Budget an overtake must fit inside: oncoming gap over closing speed.
// Unbounded (+infinity) without an oncoming vehicle or when the gap opens.
double available_time(const TrafficSnapshot& snapshot);

// Live covariates from a snapshot: pd from the current lead gap, ud from the
// configured return gap, dab from the speed difference, multiple from the
// platoon window.
CovariateVector covariates_from_snapshot(const TrafficSnapshot& snapshot,
                                         const DecisionConfig& config);

// Median of the modeled duration distribution at the given covariates.
double predicted_duration(const LogLogisticAft& model, const CovariateVector& x);

// P(T > t_avail): probability the maneuver outlasts the available time.
double overrun_risk(const LogLogisticAft& model, const CovariateVector& x, double t_avail_s);

// Fail-safe disjunction: Unsafe as soon as any rule triggers, with every
// triggered rule reported. Pure function of its inputs.
Decision decide(const TrafficSnapshot& snapshot, const LogLogisticAft& model,
                const DecisionConfig& config = {});

}  // namespace overtake
