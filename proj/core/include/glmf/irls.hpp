#pragma once

#include <vector>

#include "glmf/linked_model.hpp"

namespace glmf::irls {

// Binomial means are clamped to [kMuClamp, 1 - kMuClamp] throughout the
// iteration to bound the working weights and the induced response.
inline constexpr double kMuClamp = 1e-6;

// Weighted GLM regression of every column of `response` on the fixed
// `design`, producing one coefficient row per response column. Partitions are
// contiguous ROW blocks of the response; a problem whose natural blocks run
// over columns is posed on the transpose (same solve, no separate path).
//
// Binomial partitions hold counts in `response` and per-entry trials in their
// spec; internally those cells work on the per-trial proportion scale with a
// base weight of N.
struct IrlsProblem {
    Matrix response;                    // a x b
    std::vector<Partition> partitions;  // row blocks tiling [0, a)
    Matrix design;                      // a x r, full column rank expected
    Matrix base_weights;                // a x b; empty selects the defaults
    double tolerance = 1e-6;
    int max_iter = 100;
};

struct IrlsSolution {
    Matrix coefficients;  // b x r; row i solves response column i
    Matrix mu_hat;        // a x b fitted means (proportion scale for binomial)
    int iterations = 0;
    bool converged = false;
    bool ridge_used = false;  // singular normal equations hit the ridge fallback
};

// Starting means: mu = x for Gaussian cells, the shrunk proportion
// (x + 0.5) / (N + 1) for binomial cells, x + 0.1 for poisson counts.
Matrix init_mu(const Matrix& response, const std::vector<Partition>& partitions);

// Working response S = theta + (x - mu) / (dmu/dtheta), with x on the
// per-trial proportion scale for binomial partitions.
Matrix induced_response(const Matrix& theta, const Matrix& mu, const Matrix& x,
                        const std::vector<Partition>& partitions);

// Working weights w~ = sqrt(w (dmu/dtheta)^2 / Var(mu)); with canonical links
// this is sqrt(w mu(1-mu)) for binomial and sqrt(w / sigma^2) for Gaussian.
Matrix irls_weights(const Matrix& mu, const Matrix& base_weights,
                    const std::vector<Partition>& partitions);

// Default base weights: trials for binomial partitions, 1 elsewhere.
Matrix default_base_weights(const Matrix& response, const std::vector<Partition>& partitions);

// Iterates steps 4-7 (reweight, induce, solve, refit) until the maximum
// relative change of mu drops below tolerance. All-Gaussian problems are a
// single exact weighted least-squares solve (the identity link makes the
// weights and induced response stationary), reported as one iteration.
IrlsSolution solve_rows(const IrlsProblem& problem);

}  // namespace glmf::irls
