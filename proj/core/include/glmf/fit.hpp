#pragma once

#include <cstdint>

#include "glmf/irls.hpp"
#include "glmf/linked_model.hpp"

namespace glmf {

struct FitConfig {
    int rank = 1;
    double outer_tolerance = 1e-5;
    int max_outer_iter = 200;
    std::uint64_t seed = 0;  // used by random initialization only
    enum class Init { svd, random } init = Init::svd;

    // Warm start: when both are set they take precedence over `init`.
    Matrix init_V;   // n1 x rank
    Matrix init_Vz;  // n2 x rank

    double inner_tolerance = 1e-6;
    int inner_max_iter = 100;
};

// Initial stacked scores V~ = [V; V_z], the top-r right singular vectors of a
// working-scale surrogate of [X Z] (binomial block replaced by the empirical
// logits of the shrunk proportions). Random mode draws N(0, 0.01) entries.
Matrix initialize_scores(const LinkedDataset& ds, const FitConfig& cfg);

// Alternating GLMF fit: cycle IRLS updates of U_y, U, V, V_z from the
// augmented views, refreshing the Gaussian variance estimates after each
// cycle, until the three fitted mean matrices stop moving. Never throws on
// non-convergence; the flag and trace report it.
Factorization fit(const LinkedDataset& ds, const FitConfig& cfg);

// Joint log likelihood: observed X cells (count scale, with trials) plus all
// Y and Z cells at the factorization's current variance estimates.
double joint_log_likelihood(const LinkedDataset& ds, const Factorization& f);

}  // namespace glmf
