#include "glmf/irls.hpp"

#include <cmath>
#include <stdexcept>

namespace glmf::irls {

namespace {

void check_partitions(const std::vector<Partition>& parts, Index rows, Index cols) {
    if (parts.empty()) throw std::invalid_argument("at least one partition required");
    Index at = 0;
    for (const auto& p : parts) {
        if (p.begin != at || p.size < 1)
            throw std::invalid_argument("partitions must tile the response exactly");
        if (p.spec.family == Family::binomial) {
            if (p.spec.trials.rows() != p.size || p.spec.trials.cols() != cols)
                throw std::invalid_argument("binomial partition needs a matching trials block");
            if ((p.spec.trials.array() < 1.0).any())
                throw std::invalid_argument("binomial trials must all be >= 1");
        }
        at += p.size;
    }
    if (at != rows) throw std::invalid_argument("partitions must cover all response rows");
}

double clamp_mu(double v) { return std::clamp(v, kMuClamp, 1.0 - kMuClamp); }

// Counts scaled to per-trial proportions on binomial blocks.
Matrix work_response(const Matrix& response, const std::vector<Partition>& parts) {
    Matrix x = response;
    for (const auto& p : parts)
        if (p.spec.family == Family::binomial)
            x.middleRows(p.begin, p.size) =
                x.middleRows(p.begin, p.size).cwiseQuotient(p.spec.trials);
    return x;
}

Matrix apply_link(const Matrix& mu, const std::vector<Partition>& parts) {
    Matrix theta(mu.rows(), mu.cols());
    for (const auto& p : parts)
        theta.middleRows(p.begin, p.size) = link(p.spec.family, mu.middleRows(p.begin, p.size));
    return theta;
}

Matrix apply_inverse_link(const Matrix& theta, const std::vector<Partition>& parts) {
    Matrix mu(theta.rows(), theta.cols());
    for (const auto& p : parts) {
        mu.middleRows(p.begin, p.size) =
            inverse_link(p.spec.family, theta.middleRows(p.begin, p.size));
        if (p.spec.family == Family::binomial)
            mu.middleRows(p.begin, p.size) =
                mu.middleRows(p.begin, p.size).unaryExpr([](double v) { return clamp_mu(v); });
    }
    return mu;
}

// Per-column weighted least squares D' W2 D c = D' W2 s, batched: the Gram
// matrices for every column come out of one product of the r(r+1)/2 design
// cross-products with the weight matrix.
Matrix weighted_solve(const Matrix& design, const Matrix& S, const Matrix& W2,
                      bool* ridge_used) {
    const Index a = design.rows();
    const Index r = design.cols();
    const Index b = S.cols();
    const Index npair = r * (r + 1) / 2;

    Matrix cross(npair, a);
    {
        Index k = 0;
        for (Index p = 0; p < r; ++p)
            for (Index q = p; q < r; ++q, ++k)
                cross.row(k) = (design.col(p).array() * design.col(q).array()).transpose();
    }
    const Matrix grams = cross * W2;                             // npair x b
    const Matrix rhs = design.transpose() * W2.cwiseProduct(S);  // r x b

    Matrix coef(b, r);
    Matrix A(r, r);
    for (Index j = 0; j < b; ++j) {
        Index k = 0;
        for (Index p = 0; p < r; ++p)
            for (Index q = p; q < r; ++q, ++k) {
                A(p, q) = grams(k, j);
                A(q, p) = grams(k, j);
            }
        Eigen::FullPivLU<Matrix> lu(A);
        if (lu.isInvertible()) {
            coef.row(j) = lu.solve(rhs.col(j)).transpose();
        } else {
            if (ridge_used) *ridge_used = true;
            double lambda = 1e-8 * A.trace() / static_cast<double>(r);
            if (!(lambda > 0.0)) lambda = 1e-12;
            Matrix Ar = A;
            Ar.diagonal().array() += lambda;
            coef.row(j) = Ar.ldlt().solve(rhs.col(j)).transpose();
        }
    }
    return coef;
}

}  // namespace

Matrix init_mu(const Matrix& response, const std::vector<Partition>& parts) {
    check_partitions(parts, response.rows(), response.cols());
    Matrix mu(response.rows(), response.cols());
    for (const auto& p : parts) {
        auto block = response.middleRows(p.begin, p.size);
        switch (p.spec.family) {
            case Family::normal:
                mu.middleRows(p.begin, p.size) = block;
                break;
            case Family::binomial:
                mu.middleRows(p.begin, p.size) =
                    ((block.array() + 0.5) / (p.spec.trials.array() + 1.0))
                        .unaryExpr([](double v) { return clamp_mu(v); })
                        .matrix();
                break;
            case Family::poisson:
                mu.middleRows(p.begin, p.size) = (block.array().max(0.0) + 0.1).matrix();
                break;
        }
    }
    return mu;
}

Matrix induced_response(const Matrix& theta, const Matrix& mu, const Matrix& x,
                        const std::vector<Partition>& parts) {
    Matrix S(theta.rows(), theta.cols());
    for (const auto& p : parts) {
        const Family f = p.spec.family;
        auto t = theta.middleRows(p.begin, p.size).array();
        auto m = mu.middleRows(p.begin, p.size).array();
        auto xx = x.middleRows(p.begin, p.size).array();
        auto d = m.unaryExpr([f](double v) { return mean_derivative(f, v); });
        S.middleRows(p.begin, p.size) = (t + (xx - m) / d).matrix();
    }
    return S;
}

Matrix irls_weights(const Matrix& mu, const Matrix& base_weights,
                    const std::vector<Partition>& parts) {
    Matrix w(mu.rows(), mu.cols());
    for (const auto& p : parts) {
        const Family f = p.spec.family;
        const double disp = p.spec.dispersion;
        auto m = mu.middleRows(p.begin, p.size).array();
        auto bw = base_weights.middleRows(p.begin, p.size).array();
        auto d = m.unaryExpr([f](double v) { return mean_derivative(f, v); });
        auto var = m.unaryExpr([f, disp](double v) { return variance_fn(f, v, disp); });
        w.middleRows(p.begin, p.size) = (bw * d.square() / var).sqrt().matrix();
    }
    return w;
}

Matrix default_base_weights(const Matrix& response, const std::vector<Partition>& parts) {
    Matrix w = Matrix::Ones(response.rows(), response.cols());
    for (const auto& p : parts)
        if (p.spec.family == Family::binomial) w.middleRows(p.begin, p.size) = p.spec.trials;
    return w;
}

IrlsSolution solve_rows(const IrlsProblem& prob) {
    const Index a = prob.response.rows();
    const Index b = prob.response.cols();
    check_partitions(prob.partitions, a, b);
    if (prob.design.rows() != a)
        throw std::invalid_argument("design rows must match response rows");
    if (prob.design.cols() < 1 || prob.design.cols() > a)
        throw std::invalid_argument("design must have between 1 and a columns");
    if (!(prob.tolerance > 0.0) || prob.max_iter < 1)
        throw std::invalid_argument("tolerance must be positive and max_iter >= 1");

    Matrix W = prob.base_weights.size() > 0
                   ? prob.base_weights
                   : default_base_weights(prob.response, prob.partitions);
    if (W.rows() != a || W.cols() != b)
        throw std::invalid_argument("base_weights must match the response shape");
    if ((W.array() < 0.0).any()) throw std::invalid_argument("base_weights must be >= 0");

    const Matrix x = work_response(prob.response, prob.partitions);
    bool all_normal = true;
    for (const auto& p : prob.partitions) all_normal &= p.spec.family == Family::normal;

    IrlsSolution sol;
    Matrix mu = init_mu(prob.response, prob.partitions);
    Matrix theta = apply_link(mu, prob.partitions);

    for (int it = 1; it <= prob.max_iter; ++it) {
        const Matrix wt = irls_weights(mu, W, prob.partitions);
        if (!wt.allFinite()) throw std::runtime_error("IRLS weights became non-finite");
        const Matrix W2 = wt.cwiseProduct(wt);
        const Matrix S = induced_response(theta, mu, x, prob.partitions);

        sol.coefficients = weighted_solve(prob.design, S, W2, &sol.ridge_used);
        const Matrix theta_fit = prob.design * sol.coefficients.transpose();
        const Matrix mu_new = apply_inverse_link(theta_fit, prob.partitions);
        sol.iterations = it;

        if (all_normal) {
            // Identity link: S = x and the weights never move, so the first
            // weighted solve is already the fixed point.
            mu = mu_new;
            sol.converged = true;
            break;
        }
        const double delta =
            ((mu_new - mu).cwiseAbs().array() / (mu.cwiseAbs().array() + 1e-8)).maxCoeff();
        mu = mu_new;
        theta = apply_link(mu, prob.partitions);
        if (delta < prob.tolerance) {
            sol.converged = true;
            break;
        }
    }
    sol.mu_hat = mu;
    return sol;
}

}  // namespace glmf::irls
