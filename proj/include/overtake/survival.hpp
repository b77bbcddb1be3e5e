#pragma once

#include <array>
#include <string>
#include <vector>

namespace overtake {

// Covariates of one overtaking maneuver, on the scale the coefficients are
// fitted against: distances in meters, speed difference in km/h (entered raw,
// never converted), multiple as a 0/1 indicator for passing more than one
// vehicle in a single maneuver.
struct CovariateVector {
    double ud = 0.0;        // ultimate distance, m (gap lead -> ego after return)
    double pd = 0.0;        // primary distance, m (gap ego -> lead at start)
    double dab = 0.0;       // ego minus lead speed before the maneuver, km/h
    double multiple = 0.0;  // 0 or 1

    std::array<double, 4> values() const { return {ud, pd, dab, multiple}; }
    void validate() const;  // throws std::invalid_argument
};

// Candidate duration families. Only the log-logistic is implemented here;
// the rest are reserved names.
enum class DistributionFamily { LogLogistic, Exponential, Weibull, Gamma };

// Algebraic form tying the linear predictor to the time scale.
//   paper:    S(t) = 1 / (1 + exp(-bx) * t^(1/gamma))
//   standard: S(t) = 1 / (1 + (exp(-bx) * t)^(1/gamma))
// The two differ in how gamma enters the median: exp(gamma*bx) vs exp(bx).
// "standard" matches conventional AFT tooling and is kept for cross-checks.
enum class AftMode { Paper, Standard };

const char* to_string(AftMode mode);
AftMode aft_mode_from_string(const std::string& s);

// Log-logistic accelerated-failure-time model: intercept-first coefficient
// vector on the log-time scale plus a positive scale parameter.
struct LogLogisticAft {
    std::vector<double> beta;        // "cons" first, then one per covariate
    double gamma = 1.0;              // scale, > 0
    AftMode mode = AftMode::Paper;
    std::vector<std::string> names;  // aligned with beta; may be empty

    static const std::vector<std::string>& canonical_names();

    // Model with the canonical five coefficient names attached.
    static LogLogisticAft with_canonical_names(std::vector<double> beta5, double gamma,
                                               AftMode mode = AftMode::Paper);

    // Built-in reference coefficient set shipped as the "paper-table" fixture:
    // cons 2.589, ud 0.027, pd 0.049, dab -0.053, multiple 0.463, gamma 0.253.
    static LogLogisticAft reference_model();

    void validate() const;  // throws std::invalid_argument
};

// bx = cons + sum_i beta_i * x_i. Requires beta length 1 + 4.
double linear_predictor(const LogLogisticAft& model, const CovariateVector& x);

// S(t) = P(T > t). S(0) = 1, strictly decreasing in t, limit 0.
double survival_at(const LogLogisticAft& model, const CovariateVector& x, double t_s);

// F(t) = 1 - S(t).
double cdf_at(const LogLogisticAft& model, const CovariateVector& x, double t_s);

// h(t) = f(t)/S(t) = -d/dt log S(t). For the paper form this is
// exp(-bx) * (1/gamma) * t^(1/gamma - 1) / (1 + exp(-bx) * t^(1/gamma)).
// t = 0 diverges when gamma > 1 and is rejected.
double hazard_at(const LogLogisticAft& model, const CovariateVector& x, double t_s);

// f(t) = h(t) * S(t).
double density_at(const LogLogisticAft& model, const CovariateVector& x, double t_s);

// t with F(t) = p, p in (0,1). Paper form: exp(gamma*bx) * (p/(1-p))^gamma.
double quantile(const LogLogisticAft& model, const CovariateVector& x, double p);

// quantile at p = 0.5.
double median_duration(const LogLogisticAft& model, const CovariateVector& x);

// Characteristic commitment time tau* = (1/gamma - 1)^gamma / gamma.
// Defined for gamma in (0,1) only (interior hazard mode).
double inflection_point(double gamma);

// Time at which the baseline (bx = 0) hazard peaks: (1/gamma - 1)^gamma.
// Distinct from inflection_point by a 1/gamma factor; both are exposed.
double hazard_mode_time(double gamma);

}  // namespace overtake
