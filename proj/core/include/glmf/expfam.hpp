#pragma once

#include <string>

#include "glmf/matrix.hpp"

namespace glmf {

// Exponential-family kernels for the three canonical-link families:
// identity (normal), logit (binomial, per-trial proportion scale), log (poisson).

enum class Family { normal, binomial, poisson };

const char* family_name(Family f);
Family parse_family(const std::string& name);

// Exponential evaluations saturate at |theta| = 30; past that the logistic is
// within 1e-13 of its limit and exp stays representable.
inline constexpr double kExpSaturation = 30.0;

// Distribution attached to a matrix block or partition. dispersion is the
// Gaussian variance (fixed 1 for binomial/poisson); trials is the per-entry
// binomial N for the covered block, empty otherwise.
struct DistributionSpec {
    Family family = Family::normal;
    double dispersion = 1.0;
    Matrix trials;
};

DistributionSpec normal_spec(double variance);
DistributionSpec binomial_spec(Matrix trials = {});
DistributionSpec poisson_spec();

// Canonical link g(mu). Binomial means must lie strictly inside (0,1) and
// poisson means must be positive; violations throw std::domain_error.
double link(Family f, double mu);
Matrix link(Family f, const Matrix& mu);

// Mean function b'(theta); saturating, output is always in the mean domain.
double inverse_link(Family f, double theta);
Matrix inverse_link(Family f, const Matrix& theta);

// Variance function on the mean scale: dispersion / mu(1-mu) / mu.
double variance_fn(Family f, double mu, double dispersion = 1.0);
Matrix variance_fn(Family f, const Matrix& mu, double dispersion = 1.0);

// d mu / d theta at mu under the canonical link: 1 / mu(1-mu) / mu.
double mean_derivative(Family f, double mu);

// Exact log density/mass including the normalizing h(x) term. For binomial,
// x is a count on 0..trials and the binomial coefficient is included; for
// normal, dispersion is the variance.
double log_density(Family f, double x, double theta, double dispersion = 1.0,
                   double trials = 1.0);

}  // namespace glmf
