#pragma once

#include <string>
#include <vector>

#include "glmf/impute.hpp"
#include "glmf/simgen.hpp"

namespace glmf {

struct MethodScore {
    Method method = Method::mean;
    int rank = 0;
    double rmse = 0.0;
    double log_lik = 0.0;         // total binomial log likelihood over scored cells
    double log_lik_per_ab = 0.0;  // total divided by the at-bats in those cells
    double converged_fraction = 1.0;
    bool ok = true;
    std::string error;
};

// sqrt(mean squared difference) over the given cells.
double rmse(const Matrix& p_hat, const Matrix& p_ref, const CellList& cells);

// Sum over cells of log C(N,x) + x log p + (N-x) log(1-p). p_hat must lie
// strictly inside (0,1); clipping is the caller's job.
double binom_log_lik(const Matrix& p_hat, const Matrix& X, const Matrix& N,
                     const CellList& cells);
double binom_log_lik_per_ab(const Matrix& p_hat, const Matrix& X, const Matrix& N,
                            const CellList& cells);

// Deterministic near-equal partition of the observed cells (sizes differ by
// at most one, larger folds first).
std::vector<CellList> cv_split(const Mask& mask, int folds, std::uint64_t seed);

struct StudyConfig {
    sim::GridSpec grid;
    std::vector<Method> methods = all_methods();
    ImputeConfig impute;
    int jobs = 1;
};

struct CellResult {
    sim::GridCell cell;
    std::vector<MethodScore> scores;
};

// For every grid cell: generate, impute with each method at the cell's rank,
// and score the missing cells against the simulated truth. Method failures
// are recorded in the scores, never abort the sweep.
std::vector<CellResult> run_simulation_study(const StudyConfig& cfg);

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> ranks{1, 2, 3};
    double clip_lo = 0.001;
    double clip_hi = 0.999;
    ImputeConfig impute;
    int jobs = 1;
    bool collect_pairs = true;  // observed-vs-predicted pairs for plotting
};

struct CvFoldScore {
    int fold = 0;
    MethodScore score;
};

struct CvPair {
    Method method;
    int rank;
    int fold;
    double observed;
    double predicted;
};

struct CvReport {
    int folds = 0;
    std::vector<int> ranks;
    std::vector<CvFoldScore> fold_scores;
    std::vector<MethodScore> pooled;  // test cells pooled across folds
    std::vector<CvPair> pairs;
};

// Five-fold style cross-validation: hide each fold's observed cells, impute
// with every method x rank, score the held-out empirical averages x/N.
CvReport run_cv(const LinkedDataset& ds, const CvConfig& cfg,
                const std::vector<Method>& methods);

struct Matchup {
    Index row = 0;
    Index col = 0;
    double p = 0.0;
};

// k largest predictions, ties broken by (row, column).
std::vector<Matchup> favorable_matchups(const Matrix& p_hat, int k);

// Table/long-format CSV emission for the two harnesses.
void write_sim_tables(const std::vector<CellResult>& results, const std::string& dir);
void write_cv_tables(const CvReport& report, const std::string& dir);

}  // namespace glmf
