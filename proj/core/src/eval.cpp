#include "glmf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "glmf/csvio.hpp"
#include "glmf/parallel.hpp"
#include "glmf/rng.hpp"

namespace glmf {

double rmse(const Matrix& p_hat, const Matrix& p_ref, const CellList& cells) {
    if (cells.empty()) throw std::invalid_argument("rmse needs a non-empty cell set");
    double ss = 0.0;
    for (const Cell& c : cells) {
        const double d = p_hat(c.row, c.col) - p_ref(c.row, c.col);
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(cells.size()));
}

double binom_log_lik(const Matrix& p_hat, const Matrix& X, const Matrix& N,
                     const CellList& cells) {
    double ll = 0.0;
    for (const Cell& c : cells) {
        const double p = p_hat(c.row, c.col);
        if (!(p > 0.0 && p < 1.0))
            throw std::domain_error("binom_log_lik requires p strictly inside (0,1)");
        ll += log_density(Family::binomial, X(c.row, c.col),
                          link(Family::binomial, p), 1.0, N(c.row, c.col));
    }
    return ll;
}

double binom_log_lik_per_ab(const Matrix& p_hat, const Matrix& X, const Matrix& N,
                            const CellList& cells) {
    double ab = 0.0;
    for (const Cell& c : cells) ab += N(c.row, c.col);
    if (!(ab > 0.0)) throw std::invalid_argument("no at-bats in the scored cells");
    return binom_log_lik(p_hat, X, N, cells) / ab;
}

std::vector<CellList> cv_split(const Mask& mask, int folds, std::uint64_t seed) {
    const CellList observed = cells_where(mask, true);
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (static_cast<std::size_t>(folds) > observed.size())
        throw std::invalid_argument("more folds than observed cells");

    Rng rng(seed);
    const auto perm = rng.permutation(observed.size());
    const std::size_t base = observed.size() / static_cast<std::size_t>(folds);
    const std::size_t rem = observed.size() % static_cast<std::size_t>(folds);

    std::vector<CellList> out(static_cast<std::size_t>(folds));
    std::size_t at = 0;
    for (std::size_t f = 0; f < out.size(); ++f) {
        const std::size_t size = base + (f < rem ? 1 : 0);
        out[f].reserve(size);
        for (std::size_t k = 0; k < size; ++k) out[f].push_back(observed[perm[at++]]);
    }
    return out;
}

namespace {

MethodScore score_imputation(const ImputationResult& res, const Matrix& p_ref,
                             const Matrix& X, const Matrix& N, const CellList& cells) {
    MethodScore s;
    s.method = res.method;
    s.rank = res.rank;
    s.rmse = rmse(res.p_hat, p_ref, cells);
    s.log_lik = binom_log_lik(res.p_hat, X, N, cells);
    s.log_lik_per_ab = binom_log_lik_per_ab(res.p_hat, X, N, cells);
    s.converged_fraction = res.converged ? 1.0 : 0.0;
    return s;
}

}  // namespace

std::vector<CellResult> run_simulation_study(const StudyConfig& cfg) {
    const auto cells = sim::grid(cfg.grid);
    std::vector<CellResult> results(cells.size());

    parallel_for(cells.size(), cfg.jobs, [&](std::size_t k) {
        const sim::GridCell& cell = cells[k];
        auto [ds, truth] = sim::generate(sim::cell_config(cfg.grid, cell));
        const CellList missing = cells_where(truth.mask, false);

        CellResult out;
        out.cell = cell;
        for (Method method : cfg.methods) {
            MethodScore s;
            try {
                const ImputationResult res = impute(ds, method, cell.rank, cfg.impute);
                s = score_imputation(res, truth.p_true, ds.X, ds.N, missing);
            } catch (const std::exception& e) {
                s.method = method;
                s.rank = method_has_rank(method) ? cell.rank : 0;
                s.ok = false;
                s.error = e.what();
            }
            out.scores.push_back(std::move(s));
        }
        results[k] = std::move(out);
    });
    return results;
}

CvReport run_cv(const LinkedDataset& ds, const CvConfig& cfg,
                const std::vector<Method>& methods) {
    if (ds.spec_X.family != Family::binomial)
        throw std::invalid_argument("run_cv expects a binomial X block");
    const auto folds = cv_split(ds.mask_X, cfg.folds, cfg.seed);

    struct Task {
        int fold;
        Method method;
        int rank;
    };
    std::vector<Task> tasks;
    for (int f = 0; f < cfg.folds; ++f)
        for (Method m : methods) {
            if (method_has_rank(m)) {
                for (int r : cfg.ranks) tasks.push_back({f, m, r});
            } else {
                tasks.push_back({f, m, 0});
            }
        }

    struct TaskResult {
        MethodScore score;
        std::vector<double> predictions;  // aligned with the fold's cells
        bool ok = false;
    };
    std::vector<TaskResult> task_results(tasks.size());

    ImputeConfig icfg = cfg.impute;
    icfg.clip_lo = cfg.clip_lo;
    icfg.clip_hi = cfg.clip_hi;

    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
        const Task& t = tasks[k];
        TaskResult out;
        try {
            LinkedDataset hidden = ds;
            for (const Cell& c : folds[t.fold]) hidden.mask_X(c.row, c.col) = false;
            const ImputationResult res =
                impute(hidden, t.method, std::max(t.rank, 1), icfg);

            Matrix p_ref = Matrix::Zero(ds.m1(), ds.n1());
            for (const Cell& c : folds[t.fold])
                p_ref(c.row, c.col) = ds.X(c.row, c.col) / ds.N(c.row, c.col);

            out.score = score_imputation(res, p_ref, ds.X, ds.N, folds[t.fold]);
            out.predictions.reserve(folds[t.fold].size());
            for (const Cell& c : folds[t.fold])
                out.predictions.push_back(res.p_hat(c.row, c.col));
            out.ok = true;
        } catch (const std::exception& e) {
            out.score.method = t.method;
            out.score.rank = t.rank;
            out.score.ok = false;
            out.score.error = e.what();
        }
        task_results[k] = std::move(out);
    });

    CvReport report;
    report.folds = cfg.folds;
    report.ranks = cfg.ranks;
    for (std::size_t k = 0; k < tasks.size(); ++k)
        report.fold_scores.push_back({tasks[k].fold, task_results[k].score});

    // Pool the held-out cells across folds per (method, rank).
    std::vector<std::pair<Method, int>> combos;
    for (Method m : methods) {
        if (method_has_rank(m))
            for (int r : cfg.ranks) combos.emplace_back(m, r);
        else
            combos.emplace_back(m, 0);
    }
    for (const auto& [method, rank] : combos) {
        double ss = 0.0, ll = 0.0, ab = 0.0, converged = 0.0;
        std::size_t n_cells = 0;
        int n_folds_ok = 0, n_folds = 0;
        std::string first_error;
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            if (tasks[k].method != method || tasks[k].rank != rank) continue;
            ++n_folds;
            const TaskResult& tr = task_results[k];
            if (!tr.ok) {
                if (first_error.empty()) first_error = tr.score.error;
                continue;
            }
            ++n_folds_ok;
            converged += tr.score.converged_fraction;
            const CellList& cells = folds[tasks[k].fold];
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const double obs = ds.X(cells[c].row, cells[c].col) /
                                   ds.N(cells[c].row, cells[c].col);
                const double d = tr.predictions[c] - obs;
                ss += d * d;
                const double p = tr.predictions[c];
                ll += log_density(Family::binomial, ds.X(cells[c].row, cells[c].col),
                                  link(Family::binomial, p), 1.0,
                                  ds.N(cells[c].row, cells[c].col));
                ab += ds.N(cells[c].row, cells[c].col);
                ++n_cells;
                if (cfg.collect_pairs)
                    report.pairs.push_back({method, rank, tasks[k].fold, obs, p});
            }
        }
        MethodScore pooled;
        pooled.method = method;
        pooled.rank = rank;
        if (n_folds_ok == 0) {
            pooled.ok = false;
            pooled.error = first_error.empty() ? "all folds failed" : first_error;
        } else {
            pooled.rmse = std::sqrt(ss / static_cast<double>(n_cells));
            pooled.log_lik = ll;
            pooled.log_lik_per_ab = ll / ab;
            pooled.converged_fraction = converged / n_folds_ok;
            pooled.ok = n_folds_ok == n_folds;
            if (!pooled.ok)
                pooled.error = std::to_string(n_folds - n_folds_ok) + " fold(s) failed: " +
                               first_error;
        }
        report.pooled.push_back(std::move(pooled));
    }
    return report;
}

std::vector<Matchup> favorable_matchups(const Matrix& p_hat, int k) {
    std::vector<Matchup> all;
    all.reserve(static_cast<std::size_t>(p_hat.size()));
    for (Index i = 0; i < p_hat.rows(); ++i)
        for (Index j = 0; j < p_hat.cols(); ++j) all.push_back({i, j, p_hat(i, j)});
    std::sort(all.begin(), all.end(), [](const Matchup& a, const Matchup& b) {
        if (a.p != b.p) return a.p > b.p;
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    if (k < static_cast<int>(all.size()))
        all.resize(static_cast<std::size_t>(std::max(k, 0)));
    return all;
}

namespace {

std::string fmt(double v) { return csv::format_double(v, 10); }

// Mean over converged replicates; '*' marks dropped replicates, "NA" means
// nothing converged.
std::string aggregate_cell(const std::vector<const MethodScore*>& reps, bool use_rmse) {
    double sum = 0.0;
    int used = 0, total = 0;
    for (const MethodScore* s : reps) {
        ++total;
        if (!s->ok || s->converged_fraction < 1.0) continue;
        sum += use_rmse ? s->rmse : s->log_lik;
        ++used;
    }
    if (used == 0) return "NA";
    std::string out = fmt(sum / used);
    if (used < total) out += "*";
    return out;
}

}  // namespace

void write_sim_tables(const std::vector<CellResult>& results, const std::string& dir) {
    const std::vector<Method> order = all_methods();

    // Per-cell long format.
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : results)
            for (const auto& s : r.scores) {
                rows.push_back({fmt(r.cell.sigma), std::to_string(r.cell.nmax),
                                std::to_string(r.cell.rank), std::to_string(r.cell.replicate),
                                std::to_string(r.cell.seed), method_name(s.method),
                                s.ok ? fmt(s.rmse) : "NA", s.ok ? fmt(s.log_lik) : "NA",
                                s.ok ? fmt(s.log_lik_per_ab) : "NA",
                                s.ok ? fmt(s.converged_fraction) : "0",
                                s.ok ? "1" : "0", s.error});
            }
        csv::write_table(dir + "/cells.csv",
                         {"sigma", "nmax", "rank", "replicate", "seed", "method", "rmse",
                          "log_lik", "log_lik_per_ab", "converged", "ok", "error"},
                         rows);
    }

    // One RMSE and one log-likelihood table per nmax, rows (rank, sigma).
    std::set<int> nmaxes;
    std::set<std::pair<int, double>> keys;  // (rank, sigma)
    for (const auto& r : results) {
        nmaxes.insert(r.cell.nmax);
        keys.insert({r.cell.rank, r.cell.sigma});
    }
    for (int nmax : nmaxes) {
        for (bool use_rmse : {true, false}) {
            std::vector<std::string> header{"r", "sigma"};
            for (Method m : order) header.push_back(method_name(m));
            std::vector<std::vector<std::string>> rows;
            for (const auto& [rank, sigma] : keys) {
                std::vector<std::string> row{std::to_string(rank), fmt(sigma)};
                for (Method m : order) {
                    std::vector<const MethodScore*> reps;
                    for (const auto& r : results) {
                        if (r.cell.nmax != nmax || r.cell.rank != rank ||
                            r.cell.sigma != sigma)
                            continue;
                        for (const auto& s : r.scores)
                            if (s.method == m) reps.push_back(&s);
                    }
                    row.push_back(reps.empty() ? "NA" : aggregate_cell(reps, use_rmse));
                }
                rows.push_back(std::move(row));
            }
            const std::string path = dir + (use_rmse ? "/table_rmse_nmax" : "/table_loglik_nmax") +
                                     std::to_string(nmax) + ".csv";
            csv::write_table(path, header, rows);
        }
    }

    // Long format for the one-parameter marginal curves: each metric averaged
    // over the other two parameters and replicates.
    {
        std::vector<std::vector<std::string>> rows;
        auto emit = [&](const std::string& param, double value, Method m,
                        const std::vector<const MethodScore*>& reps) {
            double rm = 0.0, ll = 0.0;
            int used = 0;
            for (const MethodScore* s : reps) {
                if (!s->ok || s->converged_fraction < 1.0) continue;
                rm += s->rmse;
                ll += s->log_lik;
                ++used;
            }
            if (used == 0) return;
            rows.push_back({param, fmt(value), method_name(m), fmt(rm / used), fmt(ll / used)});
        };
        std::set<double> sigmas;
        std::set<int> ranks;
        for (const auto& r : results) {
            sigmas.insert(r.cell.sigma);
            ranks.insert(r.cell.rank);
        }
        auto collect = [&](auto pred, Method m) {
            std::vector<const MethodScore*> reps;
            for (const auto& r : results)
                if (pred(r.cell))
                    for (const auto& s : r.scores)
                        if (s.method == m) reps.push_back(&s);
            return reps;
        };
        for (int nmax : nmaxes)
            for (Method m : order)
                emit("nmax", nmax, m,
                     collect([&](const sim::GridCell& c) { return c.nmax == nmax; }, m));
        for (double sigma : sigmas)
            for (Method m : order)
                emit("sigma", sigma, m,
                     collect([&](const sim::GridCell& c) { return c.sigma == sigma; }, m));
        for (int rank : ranks)
            for (Method m : order)
                emit("rank", rank, m,
                     collect([&](const sim::GridCell& c) { return c.rank == rank; }, m));
        csv::write_table(dir + "/fig3_long.csv",
                         {"parameter", "value", "method", "mean_rmse", "mean_log_lik"}, rows);
    }
}

void write_cv_tables(const CvReport& report, const std::string& dir) {
    const std::vector<Method> order = all_methods();

    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& fs : report.fold_scores)
            rows.push_back({std::to_string(fs.fold), method_name(fs.score.method),
                            std::to_string(fs.score.rank),
                            fs.score.ok ? fmt(fs.score.rmse) : "NA",
                            fs.score.ok ? fmt(fs.score.log_lik) : "NA",
                            fs.score.ok ? fmt(fs.score.log_lik_per_ab) : "NA",
                            fmt(fs.score.converged_fraction), fs.score.ok ? "1" : "0",
                            fs.score.error});
        csv::write_table(dir + "/cv_folds.csv",
                         {"fold", "method", "rank", "rmse", "log_lik", "log_lik_per_ab",
                          "converged_fraction", "ok", "error"},
                         rows);
    }

    // Aggregate table: one row per (metric, rank); mean and log5 appear only
    // in the first rank row, dashes elsewhere.
    {
        auto find = [&](Method m, int rank) -> const MethodScore* {
            for (const auto& s : report.pooled)
                if (s.method == m && s.rank == rank) return &s;
            return nullptr;
        };
        std::vector<std::string> header{"metric", "rank"};
        for (Method m : order) header.push_back(method_name(m));
        std::vector<std::vector<std::string>> rows;
        for (const std::string metric : {"rmse", "log_lik", "log_lik_per_ab"}) {
            for (std::size_t ri = 0; ri < report.ranks.size(); ++ri) {
                std::vector<std::string> row{metric, std::to_string(report.ranks[ri])};
                for (Method m : order) {
                    const MethodScore* s =
                        method_has_rank(m) ? find(m, report.ranks[ri])
                                           : (ri == 0 ? find(m, 0) : nullptr);
                    if (!s) {
                        row.push_back("-");
                    } else if (!s->ok && s->converged_fraction == 0.0 && s->rmse == 0.0 &&
                               s->log_lik == 0.0) {
                        row.push_back("NA");
                    } else {
                        const double v = metric == "rmse"
                                             ? s->rmse
                                             : (metric == "log_lik" ? s->log_lik
                                                                    : s->log_lik_per_ab);
                        row.push_back(fmt(v) + (s->ok ? "" : "*"));
                    }
                }
                rows.push_back(std::move(row));
            }
        }
        csv::write_table(dir + "/cv_table.csv", header, rows);
    }

    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : report.pairs)
            rows.push_back({method_name(p.method), std::to_string(p.rank),
                            std::to_string(p.fold), fmt(p.observed), fmt(p.predicted)});
        csv::write_table(dir + "/fig4_pairs.csv",
                         {"method", "rank", "fold", "observed", "predicted"}, rows);
    }
}

}  // namespace glmf
