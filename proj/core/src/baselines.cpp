#include "glmf/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace glmf {

const char* method_name(Method m) {
    switch (m) {
        case Method::mean: return "mean";
        case Method::log5: return "log5";
        case Method::pca: return "pca";
        case Method::lpca: return "lpca";
        case Method::lmf: return "lmf";
        case Method::glmf: return "glmf";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (name == method_name(m)) return m;
    throw std::invalid_argument("unknown method: " + name);
}

bool method_has_rank(Method m) { return m != Method::mean && m != Method::log5; }

std::vector<Method> all_methods() {
    return {Method::glmf, Method::lmf, Method::lpca, Method::pca, Method::log5, Method::mean};
}

namespace baselines {

Matrix mean_predict(const Matrix& X, const Matrix& N, const Mask& mask) {
    double hits = 0.0, trials = 0.0;
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j)
            if (mask(i, j)) {
                hits += X(i, j);
                trials += N(i, j);
            }
    if (!(trials > 0.0))
        throw std::invalid_argument("mean_predict requires at least one observed cell");
    return Matrix::Constant(X.rows(), X.cols(), hits / trials);
}

Log5Margins log5_margins(const Matrix& X, const Matrix& N, const Mask& mask) {
    Log5Margins m;
    Vector row_hits = Vector::Zero(X.rows()), row_ab = Vector::Zero(X.rows());
    Vector col_hits = Vector::Zero(X.cols()), col_ab = Vector::Zero(X.cols());
    double hits = 0.0, ab = 0.0;
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j)
            if (mask(i, j)) {
                row_hits(i) += X(i, j);
                row_ab(i) += N(i, j);
                col_hits(j) += X(i, j);
                col_ab(j) += N(i, j);
                hits += X(i, j);
                ab += N(i, j);
            }
    if (!(ab > 0.0)) throw std::invalid_argument("log5 requires at least one observed cell");
    m.league = hits / ab;
    if (!(m.league > 0.0))
        throw std::invalid_argument("log5 requires a positive league average");
    m.batter.resize(X.rows());
    m.pitcher.resize(X.cols());
    // Margins with no observed at-bats fall back to the league average.
    for (Index i = 0; i < X.rows(); ++i)
        m.batter(i) = row_ab(i) > 0.0 ? row_hits(i) / row_ab(i) : m.league;
    for (Index j = 0; j < X.cols(); ++j)
        m.pitcher(j) = col_ab(j) > 0.0 ? col_hits(j) / col_ab(j) : m.league;
    return m;
}

Matrix log5_predict(const Vector& batter, const Vector& pitcher, double league,
                    double lo, double hi) {
    if (!(league > 0.0)) throw std::invalid_argument("league average must be > 0");
    Matrix p = batter * pitcher.transpose() / league;
    return clip(p, lo, hi);
}

Matrix log5_predict(const Matrix& X, const Matrix& N, const Mask& mask, double lo, double hi) {
    const Log5Margins m = log5_margins(X, N, mask);
    return log5_predict(m.batter, m.pitcher, m.league, lo, hi);
}

Matrix pca_impute_step(const Matrix& p_hat, int rank) {
    const Index m = p_hat.rows(), n = p_hat.cols();
    if (rank < 1 || rank > std::min(m, n))
        throw std::invalid_argument("pca rank must be in 1..min(rows, cols)");

    const Eigen::RowVectorXd means = p_hat.colwise().mean();
    Matrix centered = p_hat.rowwise() - means;
    Eigen::RowVectorXd scales(n);
    const double denom = std::max<double>(m - 1, 1);
    for (Index j = 0; j < n; ++j) {
        const double sd = std::sqrt(centered.col(j).squaredNorm() / denom);
        scales(j) = sd > 1e-12 ? sd : 1.0;  // constant column: leave unscaled
    }
    centered.array().rowwise() /= scales.array();

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix recon = svd.matrixU().leftCols(rank) *
                         svd.singularValues().head(rank).asDiagonal() *
                         svd.matrixV().leftCols(rank).transpose();

    Matrix out = recon;
    out.array().rowwise() *= scales.array();
    out.rowwise() += means;
    return out;
}

LpcaFit lpca_fit(const Matrix& X, const Matrix& N, const LpcaConfig& cfg) {
    const Index m = X.rows(), n = X.cols();
    if (cfg.rank < 1 || cfg.rank > std::min(m, n))
        throw std::invalid_argument("lpca rank must be in 1..min(rows, cols)");
    if (N.rows() != m || N.cols() != n) throw std::invalid_argument("N must match X");

    LpcaFit fit;
    Matrix V;
    if (cfg.init_V.size() > 0) {
        if (cfg.init_V.rows() != n || cfg.init_V.cols() != cfg.rank)
            throw std::invalid_argument("lpca warm-start V has the wrong shape");
        V = cfg.init_V;
    } else {
        const Matrix logits = ((X.array() + 0.5) / (N.array() + 1.0))
                                  .matrix()
                                  .unaryExpr([](double p) { return link(Family::binomial, p); });
        Eigen::BDCSVD<Matrix> svd(logits, Eigen::ComputeThinV);
        V = svd.matrixV().leftCols(cfg.rank);
    }

    const Matrix xt = X.transpose().eval();
    const Matrix nt = N.transpose().eval();
    Matrix U, p_prev;

    for (int outer = 1; outer <= cfg.max_outer_iter; ++outer) {
        fit.iterations = outer;
        irls::IrlsProblem up;
        up.response = xt;
        up.partitions = {{0, n, binomial_spec(nt)}};
        up.design = V;
        up.tolerance = cfg.inner_tolerance;
        up.max_iter = cfg.inner_max_iter;
        U = irls::solve_rows(up).coefficients;

        irls::IrlsProblem vp;
        vp.response = X;
        vp.partitions = {{0, m, binomial_spec(N)}};
        vp.design = U;
        vp.tolerance = cfg.inner_tolerance;
        vp.max_iter = cfg.inner_max_iter;
        V = irls::solve_rows(vp).coefficients;

        const Matrix p = inverse_link(Family::binomial, (U * V.transpose()).eval());
        if (outer >= 2) {
            const double rel = (p - p_prev).norm() / (p_prev.norm() + 1e-8);
            if (rel < cfg.tolerance) {
                fit.converged = true;
                p_prev = p;
                break;
            }
        }
        p_prev = p;
    }

    fit.U = std::move(U);
    fit.V = std::move(V);
    fit.theta = fit.U * fit.V.transpose();
    fit.p_hat = std::move(p_prev);
    return fit;
}

Factorization lmf_fit(const LinkedDataset& ds, const FitConfig& cfg) {
    if (ds.spec_X.family != Family::normal)
        throw std::invalid_argument("lmf_fit requires a Gaussian X block");
    return fit(ds, cfg);
}

}  // namespace baselines
}  // namespace glmf
