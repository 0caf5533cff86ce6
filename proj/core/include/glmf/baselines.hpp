#pragma once

#include <string>
#include <vector>

#include "glmf/fit.hpp"
#include "glmf/linked_model.hpp"

namespace glmf {

// The six imputation methods compared by the toolkit. mean and log5 are
// non-iterative and carry no rank; the rest are rank-r dimension reductions.
enum class Method { mean, log5, pca, lpca, lmf, glmf };

const char* method_name(Method m);
Method parse_method(const std::string& name);
bool method_has_rank(Method m);
std::vector<Method> all_methods();

namespace baselines {

// Pooled league average (sum hits / sum at-bats over observed cells),
// broadcast to every cell.
Matrix mean_predict(const Matrix& X, const Matrix& N, const Mask& mask);

struct Log5Margins {
    Vector batter;   // per-row pooled averages, league fallback when empty
    Vector pitcher;  // per-column pooled averages
    double league = 0.0;
};

Log5Margins log5_margins(const Matrix& X, const Matrix& N, const Mask& mask);

// p_ij = pitcher_j * batter_i / league, clipped to [lo, hi].
Matrix log5_predict(const Vector& batter, const Vector& pitcher, double league,
                    double lo = 0.001, double hi = 0.999);
Matrix log5_predict(const Matrix& X, const Matrix& N, const Mask& mask,
                    double lo = 0.001, double hi = 0.999);

// Rank-r SVD reconstruction of the column-centered and scaled probability
// matrix, returned on the probability scale (unclipped; callers clip).
Matrix pca_impute_step(const Matrix& p_hat, int rank);

struct LpcaConfig {
    int rank = 1;
    double tolerance = 1e-5;
    int max_outer_iter = 200;
    Matrix init_V;  // warm start, n1 x rank
    double inner_tolerance = 1e-6;
    int inner_max_iter = 100;
};

struct LpcaFit {
    Matrix U, V;
    Matrix theta;  // U V^T on the logit scale
    Matrix p_hat;  // inverse logit of theta
    int iterations = 0;
    bool converged = false;
};

// Binomial exponential PCA: alternating IRLS maximization of the binomial
// likelihood of X given Theta = U V^T.
LpcaFit lpca_fit(const Matrix& X, const Matrix& N, const LpcaConfig& cfg);

// The all-Gaussian special case of the GLMF fit. The dataset must carry a
// Gaussian X block (e.g. the current probability estimates).
Factorization lmf_fit(const LinkedDataset& ds, const FitConfig& cfg);

}  // namespace baselines
}  // namespace glmf
