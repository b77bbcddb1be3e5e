#include "overtake/avoidance.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace overtake {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

void check_vehicle(const std::optional<ObservedVehicle>& v, const char* what) {
    if (!v) return;
    if (!std::isfinite(v->gap_m) || v->gap_m < 0.0) {
        throw std::invalid_argument(std::string(what) + " gap must be >= 0 m, got " +
                                    std::to_string(v->gap_m));
    }
    if (!std::isfinite(v->speed_mps) || v->speed_mps < 0.0) {
        throw std::invalid_argument(std::string(what) + " speed must be >= 0 m/s, got " +
                                    std::to_string(v->speed_mps));
    }
}

std::string format_s(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

void TrafficSnapshot::validate() const {
    if (!std::isfinite(timestamp_s) || !std::isfinite(ego_position_m)) {
        throw std::invalid_argument("snapshot timestamp/position must be finite");
    }
    if (!std::isfinite(ego_speed_mps) || ego_speed_mps < 0.0) {
        throw std::invalid_argument("ego speed must be >= 0 m/s, got " +
                                    std::to_string(ego_speed_mps));
    }
    check_vehicle(std::optional<ObservedVehicle>(lead), "lead");
    check_vehicle(oncoming, "oncoming");
    check_vehicle(follower_of_lead, "follower_of_lead");
}

void DecisionConfig::validate() const {
    const auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + " must be > 0, got " +
                                        std::to_string(v));
        }
    };
    positive(time_threshold_s, "time threshold");
    positive(distance_threshold_m, "distance threshold");
    positive(time_margin, "time margin");
    positive(return_gap_m, "return gap");
    positive(platoon_window_m, "platoon window");
    if (!(risk_tolerance > 0.0) || !(risk_tolerance < 1.0)) {
        throw std::invalid_argument("risk tolerance must lie in (0,1), got " +
                                    std::to_string(risk_tolerance));
    }
}

const char* to_string(DecisionRule rule) {
    switch (rule) {
        case DecisionRule::OncomingGapBelowThreshold: return "oncoming_gap_below_threshold";
        case DecisionRule::PredictedExceedsAvailable: return "predicted_exceeds_available";
        case DecisionRule::OverrunRiskAboveTolerance: return "overrun_risk_above_tolerance";
        case DecisionRule::PredictedExceedsTimeThreshold: return "predicted_exceeds_time_threshold";
    }
    return "unknown";
}

double available_time(const TrafficSnapshot& snapshot) {
    snapshot.validate();
    if (!snapshot.oncoming) return kUnbounded;
    const double closing = snapshot.ego_speed_mps + snapshot.oncoming->speed_mps;
    if (closing <= 0.0) return kUnbounded;
    return snapshot.oncoming->gap_m / closing;
}

CovariateVector covariates_from_snapshot(const TrafficSnapshot& snapshot,
                                         const DecisionConfig& config) {
    snapshot.validate();
    config.validate();
    CovariateVector x;
    x.pd = snapshot.lead.gap_m;
    x.ud = config.return_gap_m;
    x.dab = (snapshot.ego_speed_mps - snapshot.lead.speed_mps) * 3.6;
    x.multiple = (snapshot.follower_of_lead &&
                  snapshot.follower_of_lead->gap_m <= config.platoon_window_m)
                     ? 1.0
                     : 0.0;
    return x;
}

double predicted_duration(const LogLogisticAft& model, const CovariateVector& x) {
    return median_duration(model, x);
}

double overrun_risk(const LogLogisticAft& model, const CovariateVector& x, double t_avail_s) {
    if (std::isnan(t_avail_s) || t_avail_s <= 0.0) {
        throw std::invalid_argument("available time must be > 0 s, got " +
                                    std::to_string(t_avail_s));
    }
    return survival_at(model, x, t_avail_s);
}

Decision decide(const TrafficSnapshot& snapshot, const LogLogisticAft& model,
                const DecisionConfig& config) {
    snapshot.validate();
    config.validate();
    model.validate();

    Decision decision;
    decision.covariates = covariates_from_snapshot(snapshot, config);
    decision.t_pred_s = predicted_duration(model, decision.covariates);
    decision.t_avail_s = available_time(snapshot);
    // A closed gap leaves no budget at all: certain overrun, S(0) = 1.
    decision.risk = decision.t_avail_s > 0.0
                        ? overrun_risk(model, decision.covariates, decision.t_avail_s)
                        : 1.0;

    if (snapshot.oncoming && snapshot.oncoming->gap_m < config.distance_threshold_m) {
        decision.reasons.push_back(
            {DecisionRule::OncomingGapBelowThreshold,
             "oncoming gap " + format_s(snapshot.oncoming->gap_m) + " m < " +
                 format_s(config.distance_threshold_m) + " m"});
    }
    if (decision.t_pred_s * config.time_margin > decision.t_avail_s) {
        decision.reasons.push_back(
            {DecisionRule::PredictedExceedsAvailable,
             "predicted " + format_s(decision.t_pred_s) + " s x margin " +
                 format_s(config.time_margin) + " exceeds available " +
                 format_s(decision.t_avail_s) + " s"});
    }
    if (decision.risk > config.risk_tolerance) {
        decision.reasons.push_back(
            {DecisionRule::OverrunRiskAboveTolerance,
             "overrun risk " + format_s(decision.risk) + " > tolerance " +
                 format_s(config.risk_tolerance)});
    }
    if (decision.t_pred_s > config.time_threshold_s) {
        decision.reasons.push_back(
            {DecisionRule::PredictedExceedsTimeThreshold,
             "predicted " + format_s(decision.t_pred_s) + " s > threshold " +
                 format_s(config.time_threshold_s) + " s"});
    }

    decision.verdict = decision.reasons.empty() ? Verdict::Safe : Verdict::Unsafe;
    return decision;
}

}  // namespace overtake
