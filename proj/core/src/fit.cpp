#include "glmf/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "glmf/rng.hpp"

namespace glmf {

namespace {

void validate_config(const LinkedDataset& ds, const FitConfig& cfg) {
    if (cfg.rank < 1) throw std::invalid_argument("rank must be >= 1");
    if (cfg.rank > std::min(ds.m1(), ds.n1()) || cfg.rank > ds.m2() || cfg.rank > ds.n2())
        throw std::invalid_argument("rank must not exceed any block dimension");
    if (!(cfg.outer_tolerance > 0.0) || cfg.max_outer_iter < 1)
        throw std::invalid_argument("outer tolerance must be positive and max_outer_iter >= 1");
}

Matrix mean_scale(const Matrix& theta, Family f) {
    return f == Family::normal ? theta : inverse_link(f, theta);
}

double rel_change(const Matrix& now, const Matrix& before) {
    return (now - before).norm() / (before.norm() + 1e-8);
}

irls::IrlsSolution solve_block(Matrix response, std::vector<Partition> parts,
                               const Matrix& design, const FitConfig& cfg) {
    irls::IrlsProblem p;
    p.response = std::move(response);
    p.partitions = std::move(parts);
    p.design = design;
    p.tolerance = cfg.inner_tolerance;
    p.max_iter = cfg.inner_max_iter;
    return irls::solve_rows(p);
}

std::vector<Partition> transpose_partitions(const std::vector<Partition>& cols) {
    std::vector<Partition> rows;
    rows.reserve(cols.size());
    for (const auto& p : cols) {
        Partition t = p;
        if (t.spec.family == Family::binomial) t.spec.trials = p.spec.trials.transpose().eval();
        rows.push_back(std::move(t));
    }
    return rows;
}

}  // namespace

Matrix initialize_scores(const LinkedDataset& ds, const FitConfig& cfg) {
    validate_config(ds, cfg);
    const Index n1 = ds.n1(), n2 = ds.n2();
    if (cfg.init == FitConfig::Init::random) {
        Rng rng(cfg.seed);
        Matrix vt(n1 + n2, cfg.rank);
        for (Index i = 0; i < vt.rows(); ++i)
            for (Index j = 0; j < vt.cols(); ++j) vt(i, j) = rng.normal(0.0, 0.1);
        return vt;
    }
    // Working-scale surrogate of [X Z]: empirical logits for binomial counts,
    // Gaussian data as-is.
    Matrix surrogate(ds.m1(), n1 + n2);
    if (ds.spec_X.family == Family::binomial) {
        surrogate.leftCols(n1) =
            ((ds.X.array() + 0.5) / (ds.N.array() + 1.0)).matrix().unaryExpr(
                [](double p) { return link(Family::binomial, p); });
    } else {
        surrogate.leftCols(n1) = ds.X;
    }
    surrogate.rightCols(n2) = ds.Z;

    Eigen::BDCSVD<Matrix> svd(surrogate, Eigen::ComputeThinV);
    if (svd.matrixV().cols() < cfg.rank)
        throw std::invalid_argument("rank exceeds the available singular values");
    return svd.matrixV().leftCols(cfg.rank);
}

Factorization fit(const LinkedDataset& ds, const FitConfig& cfg) {
    validate_config(ds, cfg);
    const Index m1 = ds.m1(), n1 = ds.n1(), m2 = ds.m2(), n2 = ds.n2();
    const int r = cfg.rank;

    Matrix Vt;  // (n1+n2) x r stacked scores
    if (cfg.init_V.size() > 0 && cfg.init_Vz.size() > 0) {
        if (cfg.init_V.rows() != n1 || cfg.init_Vz.rows() != n2 || cfg.init_V.cols() != r ||
            cfg.init_Vz.cols() != r)
            throw std::invalid_argument("warm-start scores have the wrong shape");
        Vt.resize(n1 + n2, r);
        Vt.topRows(n1) = cfg.init_V;
        Vt.bottomRows(n2) = cfg.init_Vz;
    } else {
        Vt = initialize_scores(ds, cfg);
    }

    // Static stacked responses; only the Gaussian dispersions change per cycle.
    const AugmentedView row_view = augment_rows(ds);  // [X; Y]
    const AugmentedView col_view = augment_cols(ds);  // [X Z]
    const Matrix ztil_t = col_view.response.transpose().eval();
    const Matrix yt = ds.Y.transpose().eval();
    std::vector<Partition> row_parts = row_view.partitions;
    std::vector<Partition> colt_parts = transpose_partitions(col_view.partitions);

    Factorization fac;
    fac.rank = r;
    fac.sigma2_Y = ds.spec_Y.dispersion;
    fac.sigma2_Z = ds.spec_Z.dispersion;

    Matrix V = Vt.topRows(n1), Vz = Vt.bottomRows(n2), U, Uy, Ut;
    Matrix mu_x_prev, mu_y_prev, mu_z_prev;

    for (int outer = 1; outer <= cfg.max_outer_iter; ++outer) {
        fac.iterations = outer;

        // 1. U_y given (Y, V): all-Gaussian transposed solve.
        Uy = solve_block(yt, {{0, n1, normal_spec(fac.sigma2_Y)}}, V, cfg).coefficients;

        // 2. U given (Z~, V~): heterogeneous transposed solve.
        colt_parts[1].spec.dispersion = fac.sigma2_Z;
        U = solve_block(ztil_t, colt_parts, Vt, cfg).coefficients;

        // 3. U~ = [U; U_y].
        Ut.resize(m1 + m2, r);
        Ut.topRows(m1) = U;
        Ut.bottomRows(m2) = Uy;

        // 4. V given (Y~, U~).
        row_parts[1].spec.dispersion = fac.sigma2_Y;
        V = solve_block(row_view.response, row_parts, Ut, cfg).coefficients;

        // 5. V_z given (Z, U).
        Vz = solve_block(ds.Z, {{0, m1, normal_spec(fac.sigma2_Z)}}, U, cfg).coefficients;

        // 6. V~ = [V; V_z].
        Vt.topRows(n1) = V;
        Vt.bottomRows(n2) = Vz;

        // Maximum-likelihood residual variances for the Gaussian blocks.
        const Matrix theta_Y = Uy * V.transpose();
        const Matrix theta_Z = U * Vz.transpose();
        fac.sigma2_Y =
            std::max((ds.Y - theta_Y).squaredNorm() / static_cast<double>(m2 * n1), 1e-12);
        fac.sigma2_Z =
            std::max((ds.Z - theta_Z).squaredNorm() / static_cast<double>(m1 * n2), 1e-12);

        const Matrix mu_x = mean_scale(U * V.transpose(), ds.spec_X.family);
        if (outer >= 2) {
            const double rel = std::max({rel_change(mu_x, mu_x_prev),
                                         rel_change(theta_Y, mu_y_prev),
                                         rel_change(theta_Z, mu_z_prev)});
            fac.mu_trace.push_back(rel);
            if (rel < cfg.outer_tolerance) {
                fac.converged = true;
                mu_x_prev = mu_x;
                break;
            }
        }
        mu_x_prev = mu_x;
        mu_y_prev = theta_Y;
        mu_z_prev = theta_Z;
    }

    fac.U = std::move(U);
    fac.V = std::move(V);
    fac.U_y = std::move(Uy);
    fac.V_z = std::move(Vz);
    return fac;
}

double joint_log_likelihood(const LinkedDataset& ds, const Factorization& f) {
    const Matrix theta_X = f.U * f.V.transpose();
    const Matrix theta_Y = f.U_y * f.V.transpose();
    const Matrix theta_Z = f.U * f.V_z.transpose();

    double ll = 0.0;
    for (Index i = 0; i < ds.m1(); ++i)
        for (Index j = 0; j < ds.n1(); ++j)
            if (ds.mask_X(i, j))
                ll += log_density(ds.spec_X.family, ds.X(i, j), theta_X(i, j),
                                  ds.spec_X.dispersion, ds.N(i, j));
    for (Index i = 0; i < ds.m2(); ++i)
        for (Index j = 0; j < ds.n1(); ++j)
            ll += log_density(Family::normal, ds.Y(i, j), theta_Y(i, j), f.sigma2_Y);
    for (Index i = 0; i < ds.m1(); ++i)
        for (Index j = 0; j < ds.n2(); ++j)
            ll += log_density(Family::normal, ds.Z(i, j), theta_Z(i, j), f.sigma2_Z);
    return ll;
}

}  // namespace glmf
