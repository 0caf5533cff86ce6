#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "glmf/baselines.hpp"

namespace glmf {

struct ImputeConfig {
    double tolerance = 1e-4;  // absolute change of p over missing cells
    int max_iter = 100;
    double clip_lo = 0.001;
    double clip_hi = 0.999;
    bool warm_start = true;  // carry the previous factorization into the next fit
    FitConfig fit;           // rank is overridden by the impute() argument
};

struct ImputationResult {
    Matrix p_hat;  // every cell is a fitted value, clipped to [clip_lo, clip_hi]
    Method method = Method::mean;
    int rank = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // per-iteration max |change| over missing cells
    std::optional<Factorization> factorization;  // glmf/lmf diagnostics
};

// Starting probabilities and adjusted trials: observed cells keep x/N and N;
// missing cells get the mean of their row and column pooled averages and one
// trial. Rows or columns with no observed cells fall back to the remaining
// margin, then to the global pooled average.
std::pair<Matrix, Matrix> initialize_missing(const Matrix& X, const Matrix& N, const Mask& mask);

// Iterative imputation: fit the method on the current filled data, refill the
// missing cells with fitted probabilities, repeat to convergence. mean and
// log5 are one-pass. Inner fit failures return converged=false with the last
// valid estimates instead of throwing.
ImputationResult impute(const LinkedDataset& ds, Method method, int rank,
                        const ImputeConfig& cfg = {});

}  // namespace glmf
