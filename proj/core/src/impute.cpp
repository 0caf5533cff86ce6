#include "glmf/impute.hpp"

#include <cmath>
#include <stdexcept>

namespace glmf {

std::pair<Matrix, Matrix> initialize_missing(const Matrix& X, const Matrix& N, const Mask& mask) {
    const Index m = X.rows(), n = X.cols();
    Vector row_hits = Vector::Zero(m), row_ab = Vector::Zero(m);
    Vector col_hits = Vector::Zero(n), col_ab = Vector::Zero(n);
    double hits = 0.0, ab = 0.0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            if (mask(i, j)) {
                row_hits(i) += X(i, j);
                row_ab(i) += N(i, j);
                col_hits(j) += X(i, j);
                col_ab(j) += N(i, j);
                hits += X(i, j);
                ab += N(i, j);
            }
    if (!(ab > 0.0))
        throw std::invalid_argument("cannot initialize a fully missing matrix");
    const double global = hits / ab;

    Matrix p(m, n), n_adj(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            if (mask(i, j)) {
                p(i, j) = X(i, j) / N(i, j);
                n_adj(i, j) = N(i, j);
            } else {
                const bool has_row = row_ab(i) > 0.0, has_col = col_ab(j) > 0.0;
                double v;
                if (has_row && has_col)
                    v = 0.5 * (row_hits(i) / row_ab(i) + col_hits(j) / col_ab(j));
                else if (has_row)
                    v = row_hits(i) / row_ab(i);
                else if (has_col)
                    v = col_hits(j) / col_ab(j);
                else
                    v = global;
                p(i, j) = v;
                n_adj(i, j) = 1.0;
            }
        }
    return {std::move(p), std::move(n_adj)};
}

namespace {

double max_missing_change(const Matrix& a, const Matrix& b, const CellList& missing) {
    double d = 0.0;
    for (const Cell& c : missing) d = std::max(d, std::abs(a(c.row, c.col) - b(c.row, c.col)));
    return d;
}

LinkedDataset gaussian_x_dataset(const LinkedDataset& ds, const Matrix& p) {
    LinkedDataset g = ds;
    g.X = p;
    g.N = Matrix::Ones(p.rows(), p.cols());
    g.spec_X = normal_spec(1.0);
    return g;
}

}  // namespace

ImputationResult impute(const LinkedDataset& ds, Method method, int rank,
                        const ImputeConfig& cfg) {
    if (method_has_rank(method) && rank < 1)
        throw std::invalid_argument("rank must be >= 1 for dimension reduction methods");
    if (ds.spec_X.family != Family::binomial)
        throw std::invalid_argument("impute expects a binomial X block");

    ImputationResult res;
    res.method = method;
    res.rank = method_has_rank(method) ? rank : 0;

    // mean and log5 ignore the iterative loop: one pass defines every cell.
    if (method == Method::mean) {
        res.p_hat = clip(baselines::mean_predict(ds.X, ds.N, ds.mask_X), cfg.clip_lo, cfg.clip_hi);
        res.iterations = 1;
        res.converged = true;
        res.trace = {0.0};
        return res;
    }
    if (method == Method::log5) {
        res.p_hat =
            baselines::log5_predict(ds.X, ds.N, ds.mask_X, cfg.clip_lo, cfg.clip_hi);
        res.iterations = 1;
        res.converged = true;
        res.trace = {0.0};
        return res;
    }

    auto [p_cur, n_adj] = initialize_missing(ds.X, ds.N, ds.mask_X);
    const CellList missing = cells_where(ds.mask_X, false);

    FitConfig fit_cfg = cfg.fit;
    fit_cfg.rank = rank;
    baselines::LpcaConfig lpca_cfg;
    lpca_cfg.rank = rank;
    lpca_cfg.tolerance = fit_cfg.outer_tolerance;
    lpca_cfg.max_outer_iter = fit_cfg.max_outer_iter;
    lpca_cfg.inner_tolerance = fit_cfg.inner_tolerance;
    lpca_cfg.inner_max_iter = fit_cfg.inner_max_iter;

    Matrix p_fit;
    bool have_fit = false;
    std::optional<Factorization> fac;
    Matrix lpca_v;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        res.iterations = it;
        try {
            switch (method) {
                case Method::glmf: {
                    LinkedDataset d = ds;
                    d.N = n_adj;
                    d.X = ds.X;
                    for (const Cell& c : missing) d.X(c.row, c.col) = p_cur(c.row, c.col);
                    if (cfg.warm_start && fac) {
                        fit_cfg.init_V = fac->V;
                        fit_cfg.init_Vz = fac->V_z;
                    }
                    fac = fit(d, fit_cfg);
                    p_fit = inverse_link(Family::binomial, (fac->U * fac->V.transpose()).eval());
                    break;
                }
                case Method::lmf: {
                    const LinkedDataset d = gaussian_x_dataset(ds, p_cur);
                    if (cfg.warm_start && fac) {
                        fit_cfg.init_V = fac->V;
                        fit_cfg.init_Vz = fac->V_z;
                    }
                    fac = baselines::lmf_fit(d, fit_cfg);
                    // Identity link: Theta_X already lives on the probability scale.
                    p_fit = fac->U * fac->V.transpose();
                    break;
                }
                case Method::lpca: {
                    Matrix x_fill = ds.X;
                    for (const Cell& c : missing) x_fill(c.row, c.col) = p_cur(c.row, c.col);
                    if (cfg.warm_start && lpca_v.size() > 0) lpca_cfg.init_V = lpca_v;
                    const auto lf = baselines::lpca_fit(x_fill, n_adj, lpca_cfg);
                    lpca_v = lf.V;
                    p_fit = lf.p_hat;
                    break;
                }
                case Method::pca:
                    p_fit = baselines::pca_impute_step(p_cur, rank);
                    break;
                default:
                    throw std::logic_error("unreachable");
            }
        } catch (const std::exception&) {
            // Keep the last valid estimates; the flag reports the failure.
            res.converged = false;
            res.p_hat = clip(have_fit ? p_fit : p_cur, cfg.clip_lo, cfg.clip_hi);
            res.factorization = fac;
            return res;
        }
        have_fit = true;

        const double delta = max_missing_change(p_fit, p_cur, missing);
        res.trace.push_back(delta);
        for (const Cell& c : missing) p_cur(c.row, c.col) = p_fit(c.row, c.col);
        if (delta < cfg.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.p_hat = clip(p_fit, cfg.clip_lo, cfg.clip_hi);
    res.factorization = std::move(fac);
    return res;
}

}  // namespace glmf
