#pragma once

#include <string>
#include <vector>

#include "glmf/expfam.hpp"
#include "glmf/matrix.hpp"

namespace glmf {

// Bidimensionally linked data: X (m1 x n1) shares its columns with Y (m2 x n1)
// and its rows with Z (m1 x n2). X is typically binomial counts with trials N;
// Y and Z are complete (no missing entries). Only X carries a missingness mask.
struct LinkedDataset {
    Matrix X;     // m1 x n1; counts when spec_X is binomial
    Matrix N;     // m1 x n1 trials; ignored when spec_X is not binomial
    Matrix Y;     // m2 x n1
    Matrix Z;     // m1 x n2
    Mask mask_X;  // true = observed

    DistributionSpec spec_X{Family::binomial, 1.0, {}};
    DistributionSpec spec_Y{Family::normal, 1.0, {}};
    DistributionSpec spec_Z{Family::normal, 1.0, {}};

    std::vector<std::string> row_ids;  // optional labels (batters)
    std::vector<std::string> col_ids;  // optional labels (pitchers)

    Index m1() const { return X.rows(); }
    Index n1() const { return X.cols(); }
    Index m2() const { return Y.rows(); }
    Index n2() const { return Z.cols(); }

    static LinkedDataset make(Matrix X, Matrix N, Matrix Y, Matrix Z, Mask mask_X,
                              DistributionSpec spec_X = binomial_spec(),
                              double sigma2_Y = 1.0, double sigma2_Z = 1.0);

    // Enforces dimension consistency, count bounds, and completeness of Y/Z.
    void validate() const;
};

// A contiguous block of rows (or columns) sharing one distribution.
struct Partition {
    Index begin = 0;
    Index size = 0;
    DistributionSpec spec;
};

// Stacked matrix plus the per-block distributions of its partitions. Blocks
// run over rows ([X; Y]) or over columns ([X Z]) depending on the builder.
struct AugmentedView {
    Matrix response;
    std::vector<Partition> partitions;
    bool column_blocks = false;
};

// [X; Y], (m1+m2) x n1, row block boundary after m1.
AugmentedView augment_rows(const LinkedDataset& ds);

// [X Z], m1 x (n1+n2), column block boundary after n1.
AugmentedView augment_cols(const LinkedDataset& ds);

// Fitted joint factorization: Theta_X = U V^T, Theta_Y = U_y V^T,
// Theta_Z = U V_z^T.
struct Factorization {
    Matrix U;    // m1 x r
    Matrix V;    // n1 x r
    Matrix U_y;  // m2 x r
    Matrix V_z;  // n2 x r
    int rank = 0;
    double sigma2_Y = 1.0;
    double sigma2_Z = 1.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> mu_trace;  // per-cycle relative change of fitted means
};

struct Reconstruction {
    Matrix theta_X, theta_Y, theta_Z;
    Matrix P;     // inverse logit of theta_X, strictly inside (0,1)
    Matrix mu_Y;  // = theta_Y
    Matrix mu_Z;  // = theta_Z
};

Reconstruction reconstruct(const Factorization& f);

}  // namespace glmf
