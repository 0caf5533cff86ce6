#include "glmf/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include "glmf/rng.hpp"

namespace glmf::sim {

namespace {

Matrix draw_components(Rng& rng, Index rows, int rank, double sd) {
    Matrix m(rows, rank);
    for (Index i = 0; i < rows; ++i)
        for (int j = 0; j < rank; ++j) m(i, j) = rng.normal(0.0, sd);
    return m;
}

}  // namespace

std::pair<LinkedDataset, SimulatedTruth> generate(const SimulationConfig& cfg) {
    if (!(cfg.sigma > 0.0) || cfg.nmax < 1 || cfg.rank < 1)
        throw std::invalid_argument("sigma, nmax, and rank must be positive");
    if (cfg.missing_fraction < 0.0 || cfg.missing_fraction >= 1.0)
        throw std::invalid_argument("missing_fraction must be in [0, 1)");
    if (!(cfg.error_variance > 0.0))
        throw std::invalid_argument("error_variance must be > 0");

    Rng rng(cfg.seed);
    SimulatedTruth t;
    t.U = draw_components(rng, cfg.m1, cfg.rank, cfg.sigma);
    t.V = draw_components(rng, cfg.n1, cfg.rank, cfg.sigma);
    t.U_y = draw_components(rng, cfg.m2, cfg.rank, cfg.sigma);
    t.V_z = draw_components(rng, cfg.n2, cfg.rank, cfg.sigma);

    t.theta_X = t.U * t.V.transpose();
    t.theta_Y = t.U_y * t.V.transpose();
    t.theta_Z = t.U * t.V_z.transpose();
    t.p_true = inverse_link(Family::binomial, t.theta_X);

    t.N.resize(cfg.m1, cfg.n1);
    Matrix X(cfg.m1, cfg.n1);
    for (Index i = 0; i < cfg.m1; ++i)
        for (Index j = 0; j < cfg.n1; ++j) {
            t.N(i, j) = static_cast<double>(rng.uniform_int(1, cfg.nmax));
            X(i, j) = static_cast<double>(
                rng.binomial(static_cast<long>(t.N(i, j)), t.p_true(i, j)));
        }

    const double err_sd = std::sqrt(cfg.error_variance);
    Matrix Y(cfg.m2, cfg.n1), Z(cfg.m1, cfg.n2);
    for (Index i = 0; i < cfg.m2; ++i)
        for (Index j = 0; j < cfg.n1; ++j) Y(i, j) = t.theta_Y(i, j) + rng.normal(0.0, err_sd);
    for (Index i = 0; i < cfg.m1; ++i)
        for (Index j = 0; j < cfg.n2; ++j) Z(i, j) = t.theta_Z(i, j) + rng.normal(0.0, err_sd);

    t.mask = Mask::Constant(cfg.m1, cfg.n1, true);
    const auto n_missing = static_cast<std::size_t>(
        std::llround(cfg.missing_fraction * static_cast<double>(cfg.m1 * cfg.n1)));
    const auto perm = rng.permutation(static_cast<std::size_t>(cfg.m1 * cfg.n1));
    for (std::size_t k = 0; k < n_missing; ++k) {
        const Index flat = static_cast<Index>(perm[k]);
        t.mask(flat / cfg.n1, flat % cfg.n1) = false;
    }

    LinkedDataset ds = LinkedDataset::make(std::move(X), t.N, std::move(Y), std::move(Z), t.mask);
    return {std::move(ds), std::move(t)};
}

std::vector<GridCell> grid(const GridSpec& spec) {
    if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    std::vector<GridCell> cells;
    cells.reserve(spec.sigmas.size() * spec.nmaxes.size() * spec.ranks.size() *
                  static_cast<std::size_t>(spec.replicates));
    for (std::size_t si = 0; si < spec.sigmas.size(); ++si)
        for (std::size_t ni = 0; ni < spec.nmaxes.size(); ++ni)
            for (std::size_t ri = 0; ri < spec.ranks.size(); ++ri)
                for (int rep = 0; rep < spec.replicates; ++rep) {
                    GridCell c;
                    c.sigma = spec.sigmas[si];
                    c.nmax = spec.nmaxes[ni];
                    c.rank = spec.ranks[ri];
                    c.replicate = rep;
                    c.seed = derive_seed(spec.base.seed,
                                         {si, ni, static_cast<std::uint64_t>(spec.ranks[ri]),
                                          static_cast<std::uint64_t>(rep)});
                    cells.push_back(c);
                }
    return cells;
}

SimulationConfig cell_config(const GridSpec& spec, const GridCell& cell) {
    SimulationConfig cfg = spec.base;
    cfg.sigma = cell.sigma;
    cfg.nmax = cell.nmax;
    cfg.rank = cell.rank;
    cfg.seed = cell.seed;
    return cfg;
}

}  // namespace glmf::sim
