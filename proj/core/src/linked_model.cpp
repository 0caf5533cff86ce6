#include "glmf/linked_model.hpp"

#include <cmath>
#include <stdexcept>

namespace glmf {

LinkedDataset LinkedDataset::make(Matrix X, Matrix N, Matrix Y, Matrix Z, Mask mask_X,
                                  DistributionSpec spec_X, double sigma2_Y, double sigma2_Z) {
    LinkedDataset ds;
    ds.X = std::move(X);
    ds.N = std::move(N);
    ds.Y = std::move(Y);
    ds.Z = std::move(Z);
    ds.mask_X = std::move(mask_X);
    ds.spec_X = std::move(spec_X);
    ds.spec_Y = normal_spec(sigma2_Y);
    ds.spec_Z = normal_spec(sigma2_Z);
    ds.validate();
    return ds;
}

void LinkedDataset::validate() const {
    const Index m1 = X.rows(), n1 = X.cols();
    if (m1 < 1 || n1 < 1) throw std::invalid_argument("X must be non-empty");
    if (N.rows() != m1 || N.cols() != n1)
        throw std::invalid_argument("N must match the shape of X");
    if (Y.cols() != n1)
        throw std::invalid_argument("Y must share its columns with X");
    if (Z.rows() != m1)
        throw std::invalid_argument("Z must share its rows with X");
    if (Y.rows() < 1 || Z.cols() < 1)
        throw std::invalid_argument("Y and Z must be non-empty");
    if (mask_X.rows() != m1 || mask_X.cols() != n1)
        throw std::invalid_argument("mask_X must match the shape of X");
    if (!X.allFinite() || !N.allFinite())
        throw std::invalid_argument("X and N must be finite");
    if (!Y.allFinite() || !Z.allFinite())
        throw std::invalid_argument("Y and Z must be complete (no missing entries)");
    if (spec_Y.family != Family::normal || spec_Z.family != Family::normal)
        throw std::invalid_argument("Y and Z blocks must be Gaussian");
    if (!(spec_Y.dispersion > 0.0) || !(spec_Z.dispersion > 0.0))
        throw std::invalid_argument("Gaussian dispersions must be > 0");
    if (spec_X.family == Family::binomial) {
        for (Index i = 0; i < m1; ++i)
            for (Index j = 0; j < n1; ++j)
                if (mask_X(i, j)) {
                    if (N(i, j) < 1.0)
                        throw std::invalid_argument("observed cells need trials >= 1");
                    if (X(i, j) < 0.0 || X(i, j) > N(i, j))
                        throw std::invalid_argument("observed counts must satisfy 0 <= X <= N");
                }
    }
    if (!row_ids.empty() && static_cast<Index>(row_ids.size()) != m1)
        throw std::invalid_argument("row_ids must have m1 entries");
    if (!col_ids.empty() && static_cast<Index>(col_ids.size()) != n1)
        throw std::invalid_argument("col_ids must have n1 entries");
}

namespace {

DistributionSpec block_spec_x(const LinkedDataset& ds, bool transpose_trials) {
    DistributionSpec s = ds.spec_X;
    if (s.family == Family::binomial) s.trials = transpose_trials ? ds.N.transpose() : ds.N;
    return s;
}

}  // namespace

AugmentedView augment_rows(const LinkedDataset& ds) {
    AugmentedView v;
    v.response.resize(ds.m1() + ds.m2(), ds.n1());
    v.response.topRows(ds.m1()) = ds.X;
    v.response.bottomRows(ds.m2()) = ds.Y;
    v.partitions = {{0, ds.m1(), block_spec_x(ds, false)}, {ds.m1(), ds.m2(), ds.spec_Y}};
    v.column_blocks = false;
    return v;
}

AugmentedView augment_cols(const LinkedDataset& ds) {
    AugmentedView v;
    v.response.resize(ds.m1(), ds.n1() + ds.n2());
    v.response.leftCols(ds.n1()) = ds.X;
    v.response.rightCols(ds.n2()) = ds.Z;
    v.partitions = {{0, ds.n1(), block_spec_x(ds, false)}, {ds.n1(), ds.n2(), ds.spec_Z}};
    v.column_blocks = true;
    return v;
}

Reconstruction reconstruct(const Factorization& f) {
    Reconstruction r;
    r.theta_X = f.U * f.V.transpose();
    r.theta_Y = f.U_y * f.V.transpose();
    r.theta_Z = f.U * f.V_z.transpose();
    r.P = inverse_link(Family::binomial, r.theta_X);
    r.mu_Y = r.theta_Y;
    r.mu_Z = r.theta_Z;
    return r;
}

}  // namespace glmf
