#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overtake/survival.hpp"

namespace overtake {

// One completed maneuver: an exact event time with its covariates.
// No censoring — every observed maneuver finishes.
struct DurationObservation {
    double duration_s = 0.0;  // > 0
    CovariateVector covariates;
};

struct FitOptions {
    std::optional<std::vector<double>> initial_beta;  // cons first, length 5
    std::optional<double> initial_gamma;
    double tolerance = 1e-8;  // gradient max-norm at convergence
    int max_iterations = 500;
    AftMode mode = AftMode::Paper;
    // Replace the analytic gradient with central differences. Finite
    // differences carry a noise floor of roughly eps*|ll|/step, so pair this
    // with a tolerance around 1e-5 for realistic sample sizes.
    bool use_numeric_gradient = false;
};

struct FitResult {
    LogLogisticAft model;
    std::vector<double> beta_se;  // one per coefficient; empty unless converged
    double gamma_se = 0.0;        // delta-method SE on the gamma scale
    double log_likelihood = 0.0;
    std::size_t n_observations = 0;
    bool converged = false;
    int iterations = 0;
    std::string message;

    double wald_z(std::size_t coefficient) const;  // beta / SE
};

// Sum over observations of log f(t_i | x_i). Observations are reduced with
// pairwise summation so any work partition reproduces the same value.
double log_likelihood(const LogLogisticAft& model, const std::vector<DurationObservation>& data);

// Gradient of log_likelihood in the optimization coordinates
// (beta_0..beta_4, log gamma). Exposed for diagnostics and tests.
std::vector<double> log_likelihood_gradient(const LogLogisticAft& model,
                                            const std::vector<DurationObservation>& data);
std::vector<double> log_likelihood_gradient_numeric(const LogLogisticAft& model,
                                                    const std::vector<DurationObservation>& data,
                                                    double relative_step = 1e-6);

// Maximum-likelihood fit by quasi-Newton ascent with backtracking line search
// over (beta, log gamma). Never reports convergence silently: converged is
// true only when the gradient max-norm drops below options.tolerance, and the
// returned point is never worse than the supplied initial values.
FitResult fit_aft(const std::vector<DurationObservation>& data, const FitOptions& options = {});

// Standard errors from the observed information: square roots of the diagonal
// of the inverse of the symmetric-difference numeric Hessian of the
// log-likelihood at `model`. Returns one SE per coefficient followed by the
// delta-method SE for gamma. Throws if the information matrix is not positive
// definite (boundary or ill-conditioned fit).
std::vector<double> standard_errors(const LogLogisticAft& model,
                                    const std::vector<DurationObservation>& data);

// Percent change in survival time per unit increase of a covariate:
// (exp(beta) - 1) * 100.
double covariate_effect_percent(const LogLogisticAft& model, const std::string& name);

// Inverse-CDF sampling: t_i = quantile(model, x_i, u_i) with u_i drawn from a
// seeded uniform stream. Deterministic given the seed.
std::vector<DurationObservation> simulate_durations(const LogLogisticAft& model,
                                                    const std::vector<CovariateVector>& covariate_rows,
                                                    std::uint64_t seed);

}  // namespace overtake
