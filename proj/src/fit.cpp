#include "overtake/fit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>

#include "overtake/rng.hpp"

namespace overtake {

namespace {

constexpr std::size_t kNumCoefficients = 5;  // cons, ud, pd, dab, multiple
constexpr std::size_t kNumParameters = kNumCoefficients + 1;
constexpr double kLogGammaBound = 30.0;  // |log gamma| beyond this is a boundary failure

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_durations(const std::vector<DurationObservation>& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(data[i].duration_s > 0.0) || !std::isfinite(data[i].duration_s)) {
            throw std::invalid_argument("observation " + std::to_string(i) +
                                        " has non-positive duration " +
                                        std::to_string(data[i].duration_s));
        }
        data[i].covariates.validate();
    }
}

// log f(t | x) for the log-logistic AFT density. With z the log of the
// "position" term k * t^(1/gamma):
//   log f = z - log t + log(1/gamma) - 2*softplus(z)
double log_density_term(double z, double log_t, double log_gamma) {
    return z - log_t - log_gamma - 2.0 * softplus(z);
}

struct Workings {
    AftMode mode;
    double gamma;
    double inv_gamma;
    double log_gamma;
};

double z_term(const Workings& w, double bx, double log_t) {
    return w.mode == AftMode::Paper ? -bx + w.inv_gamma * log_t : w.inv_gamma * (log_t - bx);
}

double pairwise_sum(std::span<const double> terms) {
    if (terms.size() <= 16) {
        double s = 0.0;
        for (double v : terms) s += v;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.subspan(0, half)) + pairwise_sum(terms.subspan(half));
}

double bx_of(const std::vector<double>& beta, const CovariateVector& x) {
    const auto vals = x.values();
    double bx = beta[0];
    for (std::size_t i = 0; i < vals.size(); ++i) bx += beta[i + 1] * vals[i];
    return bx;
}

// Parameter vector layout: theta = (beta_0..beta_4, log gamma).
LogLogisticAft model_from_theta(const Eigen::VectorXd& theta, AftMode mode) {
    LogLogisticAft m;
    m.beta.assign(theta.data(), theta.data() + kNumCoefficients);
    m.gamma = std::exp(theta[kNumCoefficients]);
    m.mode = mode;
    m.names = LogLogisticAft::canonical_names();
    return m;
}

Eigen::VectorXd theta_of_model(const LogLogisticAft& m) {
    Eigen::VectorXd theta(kNumParameters);
    for (std::size_t i = 0; i < kNumCoefficients; ++i) theta[static_cast<Eigen::Index>(i)] = m.beta[i];
    theta[kNumCoefficients] = std::log(m.gamma);
    return theta;
}

double loglik_theta(const Eigen::VectorXd& theta, AftMode mode,
                    const std::vector<DurationObservation>& data) {
    return log_likelihood(model_from_theta(theta, mode), data);
}

Eigen::VectorXd analytic_gradient(const Eigen::VectorXd& theta, AftMode mode,
                                  const std::vector<DurationObservation>& data) {
    const double gamma = std::exp(theta[kNumCoefficients]);
    const Workings w{mode, gamma, 1.0 / gamma, std::log(gamma)};
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(kNumParameters);
    for (const auto& obs : data) {
        const auto vals = obs.covariates.values();
        double bx = theta[0];
        for (std::size_t i = 0; i < vals.size(); ++i) bx += theta[static_cast<Eigen::Index>(i + 1)] * vals[i];
        const double log_t = std::log(obs.duration_s);
        const double z = z_term(w, bx, log_t);
        const double dldz = 1.0 - 2.0 * logistic(z);
        // d z / d beta_j = -x_j (paper) or -x_j / gamma (standard).
        const double beta_scale = (mode == AftMode::Paper) ? 1.0 : w.inv_gamma;
        grad[0] += dldz * (-beta_scale);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            grad[static_cast<Eigen::Index>(i + 1)] += dldz * (-beta_scale * vals[i]);
        }
        // d z / d log gamma = -(1/gamma) log t (paper) or -z (standard);
        // the log(1/gamma) factor contributes -1 either way.
        const double dz_dlg = (mode == AftMode::Paper) ? -w.inv_gamma * log_t : -z;
        grad[kNumCoefficients] += dldz * dz_dlg - 1.0;
    }
    return grad;
}

Eigen::VectorXd numeric_gradient(const Eigen::VectorXd& theta, AftMode mode,
                                 const std::vector<DurationObservation>& data,
                                 double relative_step) {
    Eigen::VectorXd grad(kNumParameters);
    for (Eigen::Index j = 0; j < grad.size(); ++j) {
        const double h = relative_step * (1.0 + std::abs(theta[j]));
        Eigen::VectorXd up = theta, dn = theta;
        up[j] += h;
        dn[j] -= h;
        grad[j] = (loglik_theta(up, mode, data) - loglik_theta(dn, mode, data)) / (2.0 * h);
    }
    return grad;
}

// Symmetric-difference numeric Hessian of the log-likelihood.
Eigen::MatrixXd numeric_hessian(const Eigen::VectorXd& theta, AftMode mode,
                                const std::vector<DurationObservation>& data) {
    const double base_step = 6e-6;
    Eigen::MatrixXd hess(kNumParameters, kNumParameters);
    Eigen::VectorXd steps(kNumParameters);
    for (Eigen::Index j = 0; j < steps.size(); ++j) steps[j] = base_step * (1.0 + std::abs(theta[j]));
    for (Eigen::Index i = 0; i < hess.rows(); ++i) {
        for (Eigen::Index j = i; j < hess.cols(); ++j) {
            Eigen::VectorXd pp = theta, pm = theta, mp = theta, mm = theta;
            pp[i] += steps[i]; pp[j] += steps[j];
            pm[i] += steps[i]; pm[j] -= steps[j];
            mp[i] -= steps[i]; mp[j] += steps[j];
            mm[i] -= steps[i]; mm[j] -= steps[j];
            const double v = (loglik_theta(pp, mode, data) - loglik_theta(pm, mode, data) -
                              loglik_theta(mp, mode, data) + loglik_theta(mm, mode, data)) /
                             (4.0 * steps[i] * steps[j]);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

std::vector<double> se_from_information(const Eigen::MatrixXd& hessian, double gamma) {
    const Eigen::MatrixXd info = -hessian;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error(
            "observed information is not positive definite; the fit sits on a boundary "
            "or the data are ill-conditioned");
    }
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(kNumParameters, kNumParameters));
    std::vector<double> se(kNumParameters);
    for (std::size_t i = 0; i < kNumParameters; ++i) {
        const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (!(v > 0.0)) {
            throw std::runtime_error("non-positive variance on parameter " + std::to_string(i));
        }
        se[i] = std::sqrt(v);
    }
    // Delta method: SE(gamma) = gamma * SE(log gamma).
    se[kNumCoefficients] = gamma * se[kNumCoefficients];
    return se;
}

struct WarmStart {
    Eigen::VectorXd theta;
};

WarmStart least_squares_start(const std::vector<DurationObservation>& data, AftMode mode) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd design(n, kNumCoefficients);
    Eigen::VectorXd log_t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto vals = data[static_cast<std::size_t>(i)].covariates.values();
        design(i, 0) = 1.0;
        for (std::size_t j = 0; j < vals.size(); ++j) design(i, static_cast<Eigen::Index>(j + 1)) = vals[j];
        log_t[i] = std::log(data[static_cast<std::size_t>(i)].duration_s);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(kNumCoefficients)) {
        throw std::invalid_argument("design matrix is rank deficient (rank " +
                                    std::to_string(qr.rank()) + " of " +
                                    std::to_string(kNumCoefficients) +
                                    "): covariates are collinear");
    }
    const Eigen::VectorXd coef = qr.solve(log_t);
    const Eigen::VectorXd resid = log_t - design * coef;
    const double dof = static_cast<double>(n) - static_cast<double>(kNumCoefficients);
    const double resid_sd = std::sqrt(resid.squaredNorm() / std::max(dof, 1.0));
    if (resid_sd < 1e-10) {
        throw std::invalid_argument(
            "degenerate data: log durations have (near) zero residual spread, the scale "
            "estimate collapses to the gamma -> 0 boundary");
    }
    // Standard logistic errors have sd pi/sqrt(3); the regression residual sd
    // estimates gamma times that.
    double gamma0 = resid_sd * std::sqrt(3.0) / M_PI;
    gamma0 = std::clamp(gamma0, 1e-3, 10.0);

    WarmStart start;
    start.theta.resize(kNumParameters);
    for (std::size_t i = 0; i < kNumCoefficients; ++i) {
        const double c = coef[static_cast<Eigen::Index>(i)];
        start.theta[static_cast<Eigen::Index>(i)] = (mode == AftMode::Paper) ? c / gamma0 : c;
    }
    start.theta[kNumCoefficients] = std::log(gamma0);
    return start;
}

}  // namespace

double FitResult::wald_z(std::size_t coefficient) const {
    if (coefficient >= beta_se.size() || !(beta_se[coefficient] > 0.0)) {
        throw std::out_of_range("no standard error for coefficient " + std::to_string(coefficient));
    }
    return model.beta[coefficient] / beta_se[coefficient];
}

double log_likelihood(const LogLogisticAft& model, const std::vector<DurationObservation>& data) {
    model.validate();
    if (model.beta.size() != kNumCoefficients) {
        throw std::invalid_argument("log_likelihood expects " + std::to_string(kNumCoefficients) +
                                    " coefficients, model has " + std::to_string(model.beta.size()));
    }
    check_durations(data);
    if (data.empty()) return 0.0;
    const Workings w{model.mode, model.gamma, 1.0 / model.gamma, std::log(model.gamma)};
    std::vector<double> terms(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double bx = bx_of(model.beta, data[i].covariates);
        const double log_t = std::log(data[i].duration_s);
        terms[i] = log_density_term(z_term(w, bx, log_t), log_t, w.log_gamma);
    }
    return pairwise_sum(terms);
}

std::vector<double> log_likelihood_gradient(const LogLogisticAft& model,
                                            const std::vector<DurationObservation>& data) {
    model.validate();
    check_durations(data);
    const Eigen::VectorXd g = analytic_gradient(theta_of_model(model), model.mode, data);
    return {g.data(), g.data() + g.size()};
}

std::vector<double> log_likelihood_gradient_numeric(const LogLogisticAft& model,
                                                    const std::vector<DurationObservation>& data,
                                                    double relative_step) {
    model.validate();
    check_durations(data);
    const Eigen::VectorXd g =
        numeric_gradient(theta_of_model(model), model.mode, data, relative_step);
    return {g.data(), g.data() + g.size()};
}

FitResult fit_aft(const std::vector<DurationObservation>& data, const FitOptions& options) {
    if (data.size() < kNumParameters + 2) {
        throw std::invalid_argument("insufficient data: " + std::to_string(data.size()) +
                                    " observations for " + std::to_string(kNumParameters) +
                                    " parameters (need at least " +
                                    std::to_string(kNumParameters + 2) + ")");
    }
    check_durations(data);

    Eigen::VectorXd theta = least_squares_start(data, options.mode).theta;
    if (options.initial_beta) {
        if (options.initial_beta->size() != kNumCoefficients) {
            throw std::invalid_argument("initial_beta must have " +
                                        std::to_string(kNumCoefficients) + " entries");
        }
        for (std::size_t i = 0; i < kNumCoefficients; ++i) {
            theta[static_cast<Eigen::Index>(i)] = (*options.initial_beta)[i];
        }
    }
    if (options.initial_gamma) {
        if (!(*options.initial_gamma > 0.0)) {
            throw std::invalid_argument("initial_gamma must be > 0");
        }
        theta[kNumCoefficients] = std::log(*options.initial_gamma);
    }

    const auto grad_fn = [&](const Eigen::VectorXd& th) {
        return options.use_numeric_gradient ? numeric_gradient(th, options.mode, data, 1e-6)
                                            : analytic_gradient(th, options.mode, data);
    };

    double ll = loglik_theta(theta, options.mode, data);
    Eigen::VectorXd grad = grad_fn(theta);

    Eigen::VectorXd best_theta = theta;
    double best_ll = ll;

    Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(kNumParameters, kNumParameters);
    FitResult result;
    result.n_observations = data.size();

    int iter = 0;
    std::string stop_message;
    bool converged = false;
    for (; iter < options.max_iterations; ++iter) {
        if (grad.cwiseAbs().maxCoeff() < options.tolerance) {
            converged = true;
            break;
        }
        if (std::abs(theta[kNumCoefficients]) > kLogGammaBound) {
            stop_message = "scale parameter ran to a boundary (|log gamma| > " +
                           std::to_string(kLogGammaBound) + "); data may be degenerate";
            break;
        }

        // Ascent direction from the BFGS inverse-Hessian approximation.
        Eigen::VectorXd direction = inv_hess * grad;
        if (direction.dot(grad) <= 0.0) {
            inv_hess = Eigen::MatrixXd::Identity(kNumParameters, kNumParameters);
            direction = grad;
        }

        // Backtracking Armijo line search (maximization).
        const double slope = grad.dot(direction);
        double step = 1.0;
        double new_ll = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd new_theta;
        bool accepted = false;
        while (step > 1e-12) {
            new_theta = theta + step * direction;
            new_ll = loglik_theta(new_theta, options.mode, data);
            if (std::isfinite(new_ll) && new_ll >= ll + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            stop_message = "line search failed to make progress";
            break;
        }

        const Eigen::VectorXd new_grad = grad_fn(new_theta);
        const Eigen::VectorXd s = new_theta - theta;
        const Eigen::VectorXd y = new_grad - grad;  // gradient of ll, ascent form
        const double sy = s.dot(-y);                // curvature of -ll
        if (sy > 1e-12) {
            const Eigen::VectorXd hy = inv_hess * (-y);
            const double yhy = (-y).dot(hy);
            inv_hess += (sy + yhy) / (sy * sy) * (s * s.transpose()) -
                        (hy * s.transpose() + s * hy.transpose()) / sy;
        }

        theta = new_theta;
        ll = new_ll;
        grad = new_grad;
        if (ll > best_ll) {
            best_ll = ll;
            best_theta = theta;
        }
    }

    if (!converged && stop_message.empty()) {
        stop_message = "no convergence after " + std::to_string(options.max_iterations) +
                       " iterations (gradient max-norm " +
                       std::to_string(grad.cwiseAbs().maxCoeff()) + ")";
    }

    // Never return a point worse than one we have already seen (including the
    // caller-supplied initial values).
    if (ll < best_ll) {
        theta = best_theta;
        ll = best_ll;
    }

    result.model = model_from_theta(theta, options.mode);
    result.log_likelihood = ll;
    result.converged = converged;
    result.iterations = iter;
    result.message = converged ? "converged" : stop_message;

    if (converged) {
        const auto se = standard_errors(result.model, data);
        result.beta_se.assign(se.begin(), se.begin() + kNumCoefficients);
        result.gamma_se = se.back();
    }
    return result;
}

std::vector<double> standard_errors(const LogLogisticAft& model,
                                    const std::vector<DurationObservation>& data) {
    model.validate();
    check_durations(data);
    const Eigen::MatrixXd hess = numeric_hessian(theta_of_model(model), model.mode, data);
    return se_from_information(hess, model.gamma);
}

double covariate_effect_percent(const LogLogisticAft& model, const std::string& name) {
    model.validate();
    if (model.names.empty()) {
        throw std::invalid_argument("model carries no coefficient names");
    }
    for (std::size_t i = 0; i < model.names.size(); ++i) {
        if (model.names[i] == name) {
            return (std::exp(model.beta[i]) - 1.0) * 100.0;
        }
    }
    std::string valid;
    for (const auto& n : model.names) {
        if (!valid.empty()) valid += ", ";
        valid += n;
    }
    throw std::invalid_argument("unknown covariate \"" + name + "\" (fitted names: " + valid + ")");
}

std::vector<DurationObservation> simulate_durations(const LogLogisticAft& model,
                                                    const std::vector<CovariateVector>& covariate_rows,
                                                    std::uint64_t seed) {
    model.validate();
    Rng rng(seed);
    std::vector<DurationObservation> out;
    out.reserve(covariate_rows.size());
    for (const auto& x : covariate_rows) {
        x.validate();
        const double u = rng.uniform01();
        out.push_back({quantile(model, x, u), x});
    }
    return out;
}

}  // namespace overtake
