#include "glmf/expfam.hpp"

#include <cmath>
#include <stdexcept>

namespace glmf {

namespace {

double saturate(double theta) {
    return std::clamp(theta, -kExpSaturation, kExpSaturation);
}

// log(1 + e^t) without overflow.
double softplus(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double require_integer(double x, const char* what) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9)
        throw std::domain_error(std::string(what) + " must be integral, got " + std::to_string(x));
    return r;
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::normal: return "normal";
        case Family::binomial: return "binomial";
        case Family::poisson: return "poisson";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "normal" || name == "gaussian") return Family::normal;
    if (name == "binomial") return Family::binomial;
    if (name == "poisson") return Family::poisson;
    throw std::invalid_argument("unknown family: " + name);
}

DistributionSpec normal_spec(double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("normal dispersion must be > 0");
    return {Family::normal, variance, {}};
}

DistributionSpec binomial_spec(Matrix trials) {
    DistributionSpec s{Family::binomial, 1.0, std::move(trials)};
    if (s.trials.size() > 0 && (s.trials.array() < 1.0).any())
        throw std::invalid_argument("binomial trials must all be >= 1");
    return s;
}

DistributionSpec poisson_spec() { return {Family::poisson, 1.0, {}}; }

double link(Family f, double mu) {
    switch (f) {
        case Family::normal:
            return mu;
        case Family::binomial:
            if (!(mu > 0.0 && mu < 1.0))
                throw std::domain_error("logit link requires mu strictly inside (0,1)");
            return std::log(mu / (1.0 - mu));
        case Family::poisson:
            if (!(mu > 0.0)) throw std::domain_error("log link requires mu > 0");
            return std::log(mu);
    }
    throw std::logic_error("unreachable");
}

Matrix link(Family f, const Matrix& mu) {
    return mu.unaryExpr([f](double v) { return link(f, v); });
}

double inverse_link(Family f, double theta) {
    if (!std::isfinite(theta)) throw std::domain_error("inverse link requires finite theta");
    switch (f) {
        case Family::normal:
            return theta;
        case Family::binomial: {
            const double t = saturate(theta);
            return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                            : std::exp(t) / (1.0 + std::exp(t));
        }
        case Family::poisson:
            return std::exp(saturate(theta));
    }
    throw std::logic_error("unreachable");
}

Matrix inverse_link(Family f, const Matrix& theta) {
    return theta.unaryExpr([f](double v) { return inverse_link(f, v); });
}

double variance_fn(Family f, double mu, double dispersion) {
    switch (f) {
        case Family::normal: return dispersion;
        case Family::binomial: return mu * (1.0 - mu);
        case Family::poisson: return mu;
    }
    throw std::logic_error("unreachable");
}

Matrix variance_fn(Family f, const Matrix& mu, double dispersion) {
    if (f == Family::normal) return Matrix::Constant(mu.rows(), mu.cols(), dispersion);
    return mu.unaryExpr([f](double v) { return variance_fn(f, v); });
}

double mean_derivative(Family f, double mu) {
    switch (f) {
        case Family::normal: return 1.0;
        case Family::binomial: return mu * (1.0 - mu);
        case Family::poisson: return mu;
    }
    throw std::logic_error("unreachable");
}

double log_density(Family f, double x, double theta, double dispersion, double trials) {
    switch (f) {
        case Family::normal: {
            if (!(dispersion > 0.0)) throw std::domain_error("normal dispersion must be > 0");
            const double resid = x - theta;
            return -0.5 * (std::log(2.0 * M_PI * dispersion) + resid * resid / dispersion);
        }
        case Family::binomial: {
            const double n = require_integer(trials, "binomial trials");
            const double k = require_integer(x, "binomial count");
            if (n < 1.0 || k < 0.0 || k > n)
                throw std::domain_error("binomial count outside 0..N");
            const double log_coef =
                std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            return log_coef + k * theta - n * softplus(theta);
        }
        case Family::poisson: {
            const double k = require_integer(x, "poisson count");
            if (k < 0.0) throw std::domain_error("poisson count must be >= 0");
            return k * theta - std::exp(saturate(theta)) - std::lgamma(k + 1.0);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace glmf
