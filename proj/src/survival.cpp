#include "overtake/survival.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace overtake {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log k for S(t) = 1 / (1 + k * t^(1/gamma)).
double log_rate(const LogLogisticAft& model, double bx) {
    return model.mode == AftMode::Paper ? -bx : -bx / model.gamma;
}

void check_time(double t_s) {
    if (std::isnan(t_s) || t_s < 0.0) {
        throw std::invalid_argument("time must be >= 0 seconds, got " + std::to_string(t_s));
    }
}

}  // namespace

void CovariateVector::validate() const {
    require_finite(ud, "ud");
    require_finite(pd, "pd");
    require_finite(dab, "dab");
    if (ud < 0.0) throw std::invalid_argument("ud must be >= 0, got " + std::to_string(ud));
    if (pd < 0.0) throw std::invalid_argument("pd must be >= 0, got " + std::to_string(pd));
    if (multiple != 0.0 && multiple != 1.0) {
        throw std::invalid_argument("multiple must be 0 or 1, got " + std::to_string(multiple));
    }
}

const char* to_string(AftMode mode) {
    return mode == AftMode::Paper ? "paper" : "standard";
}

AftMode aft_mode_from_string(const std::string& s) {
    if (s == "paper") return AftMode::Paper;
    if (s == "standard") return AftMode::Standard;
    throw std::invalid_argument("unknown AFT mode \"" + s + "\" (expected \"paper\" or \"standard\")");
}

const std::vector<std::string>& LogLogisticAft::canonical_names() {
    static const std::vector<std::string> names = {"cons", "ud", "pd", "dab", "multiple"};
    return names;
}

LogLogisticAft LogLogisticAft::with_canonical_names(std::vector<double> beta5, double gamma,
                                                    AftMode mode) {
    if (beta5.size() != canonical_names().size()) {
        throw std::invalid_argument("expected " + std::to_string(canonical_names().size()) +
                                    " coefficients, got " + std::to_string(beta5.size()));
    }
    LogLogisticAft model{std::move(beta5), gamma, mode, canonical_names()};
    model.validate();
    return model;
}

LogLogisticAft LogLogisticAft::reference_model() {
    return with_canonical_names({2.589, 0.027, 0.049, -0.053, 0.463}, 0.253, AftMode::Paper);
}

void LogLogisticAft::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be positive and finite, got " + std::to_string(gamma));
    }
    if (beta.empty()) {
        throw std::invalid_argument("coefficient vector must not be empty");
    }
    for (double b : beta) require_finite(b, "beta");
    if (!names.empty() && names.size() != beta.size()) {
        throw std::invalid_argument("coefficient names (" + std::to_string(names.size()) +
                                    ") do not match coefficients (" + std::to_string(beta.size()) + ")");
    }
}

double linear_predictor(const LogLogisticAft& model, const CovariateVector& x) {
    model.validate();
    x.validate();
    const auto vals = x.values();
    if (model.beta.size() != vals.size() + 1) {
        throw std::invalid_argument("linear predictor expects " + std::to_string(vals.size() + 1) +
                                    " coefficients (cons first), model has " +
                                    std::to_string(model.beta.size()));
    }
    double bx = model.beta[0];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        bx += model.beta[i + 1] * vals[i];
    }
    return bx;
}

double survival_at(const LogLogisticAft& model, const CovariateVector& x, double t_s) {
    check_time(t_s);
    const double bx = linear_predictor(model, x);
    if (t_s == 0.0) return 1.0;
    const double z = log_rate(model, bx) + std::log(t_s) / model.gamma;
    return logistic(-z);
}

double cdf_at(const LogLogisticAft& model, const CovariateVector& x, double t_s) {
    return 1.0 - survival_at(model, x, t_s);
}

double hazard_at(const LogLogisticAft& model, const CovariateVector& x, double t_s) {
    check_time(t_s);
    const double bx = linear_predictor(model, x);
    const double inv_gamma = 1.0 / model.gamma;
    if (t_s == 0.0) {
        if (model.gamma > 1.0) {
            throw std::invalid_argument("hazard diverges at t = 0 for gamma > 1 (gamma = " +
                                        std::to_string(model.gamma) + ")");
        }
        return model.gamma == 1.0 ? std::exp(log_rate(model, bx)) : 0.0;
    }
    if (std::isinf(t_s)) return 0.0;
    const double z = log_rate(model, bx) + inv_gamma * std::log(t_s);
    return inv_gamma / t_s * logistic(z);
}

double density_at(const LogLogisticAft& model, const CovariateVector& x, double t_s) {
    return hazard_at(model, x, t_s) * survival_at(model, x, t_s);
}

double quantile(const LogLogisticAft& model, const CovariateVector& x, double p) {
    const double bx = linear_predictor(model, x);
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("quantile level must lie strictly in (0,1), got " +
                                    std::to_string(p));
    }
    const double log_odds = std::log(p / (1.0 - p));
    if (model.mode == AftMode::Paper) {
        return std::exp(model.gamma * (bx + log_odds));
    }
    return std::exp(bx + model.gamma * log_odds);
}

double median_duration(const LogLogisticAft& model, const CovariateVector& x) {
    return quantile(model, x, 0.5);
}

namespace {
void check_interior_gamma(double gamma) {
    if (!std::isfinite(gamma) || !(gamma > 0.0) || gamma >= 1.0) {
        throw std::invalid_argument(
            "interior hazard mode requires gamma in (0,1), got " + std::to_string(gamma));
    }
}
}  // namespace

double inflection_point(double gamma) {
    check_interior_gamma(gamma);
    return std::pow(1.0 / gamma - 1.0, gamma) / gamma;
}

double hazard_mode_time(double gamma) {
    check_interior_gamma(gamma);
    return std::pow(1.0 / gamma - 1.0, gamma);
}

}  // namespace overtake
