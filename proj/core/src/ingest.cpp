#include "glmf/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "glmf/csvio.hpp"
#include "glmf/rng.hpp"

namespace glmf::ingest {

const std::vector<std::string> kBattingStats = {
    "games",          "at_bats",      "runs",        "hits",
    "doubles",        "triples",      "homeruns",    "runs_batted_in",
    "stolen_bases",   "caught_stealing", "walks",    "strikeouts",
    "total_bases",    "grounded_into_double_play",   "hit_by_pitch",
    "sacrifice_hits", "sacrifice_flies", "intentional_walks"};

const std::vector<std::string> kPitchingStats = {
    "wins",        "losses",       "games",        "games_started",
    "games_finished", "complete_games", "shutouts", "saves",
    "innings_pitched", "hits",     "runs",         "earned_runs",
    "homeruns",    "walks",        "intentional_walks", "strikeouts",
    "hit_by_pitch", "balks",       "wild_pitches"};

namespace {

std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                      const std::string& file) {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    throw std::runtime_error(file + " is missing the required column '" + name + "'");
}

double to_number(const std::string& field, const std::string& file) {
    try {
        return std::stod(field);
    } catch (const std::exception&) {
        throw std::runtime_error("bad number '" + field + "' in " + file);
    }
}

std::size_t stat_index(const std::vector<std::string>& names, const std::string& name) {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return j;
    throw std::logic_error("unknown stat " + name);
}

}  // namespace

RawTables load_raw(const std::string& dir) {
    RawTables raw;
    {
        const std::string file = dir + "/batting.csv";
        const auto rows = csv::read_rows(file);
        if (rows.empty()) throw std::runtime_error(file + " is empty");
        const auto& header = rows.front();
        const std::size_t id_col = column_of(header, "batter_id", file);
        const std::size_t pa_col = column_of(header, "plate_appearances", file);
        std::vector<std::size_t> stat_cols;
        for (const auto& s : kBattingStats) stat_cols.push_back(column_of(header, s, file));
        const Index n = static_cast<Index>(rows.size()) - 1;
        raw.batter_exposure.resize(n);
        raw.batter_stats.resize(n, static_cast<Index>(kBattingStats.size()));
        for (Index i = 0; i < n; ++i) {
            const auto& r = rows[static_cast<std::size_t>(i) + 1];
            raw.batter_ids.push_back(r.at(id_col));
            raw.batter_exposure(i) = to_number(r.at(pa_col), file);
            for (std::size_t j = 0; j < stat_cols.size(); ++j)
                raw.batter_stats(i, static_cast<Index>(j)) = to_number(r.at(stat_cols[j]), file);
        }
    }
    {
        const std::string file = dir + "/pitching.csv";
        const auto rows = csv::read_rows(file);
        if (rows.empty()) throw std::runtime_error(file + " is empty");
        const auto& header = rows.front();
        const std::size_t id_col = column_of(header, "pitcher_id", file);
        const std::size_t bf_col = column_of(header, "batters_faced", file);
        std::vector<std::size_t> stat_cols;
        for (const auto& s : kPitchingStats) stat_cols.push_back(column_of(header, s, file));
        const Index n = static_cast<Index>(rows.size()) - 1;
        raw.pitcher_exposure.resize(n);
        raw.pitcher_stats.resize(n, static_cast<Index>(kPitchingStats.size()));
        for (Index i = 0; i < n; ++i) {
            const auto& r = rows[static_cast<std::size_t>(i) + 1];
            raw.pitcher_ids.push_back(r.at(id_col));
            raw.pitcher_exposure(i) = to_number(r.at(bf_col), file);
            for (std::size_t j = 0; j < stat_cols.size(); ++j)
                raw.pitcher_stats(i, static_cast<Index>(j)) = to_number(r.at(stat_cols[j]), file);
        }
    }
    {
        const std::string file = dir + "/matchups.csv";
        const auto rows = csv::read_rows(file);
        if (rows.empty()) throw std::runtime_error(file + " is empty");
        const auto& header = rows.front();
        const std::size_t b_col = column_of(header, "batter_id", file);
        const std::size_t p_col = column_of(header, "pitcher_id", file);
        const std::size_t ab_col = column_of(header, "at_bats", file);
        const std::size_t h_col = column_of(header, "hits", file);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            MatchupRecord rec;
            rec.batter = rows[i].at(b_col);
            rec.pitcher = rows[i].at(p_col);
            rec.at_bats = to_number(rows[i].at(ab_col), file);
            rec.hits = to_number(rows[i].at(h_col), file);
            if (rec.hits > rec.at_bats)
                throw std::runtime_error("matchup with hits > at_bats in " + file);
            if (rec.at_bats < 0.0 || rec.hits < 0.0)
                throw std::runtime_error("negative matchup counts in " + file);
            raw.matchups.push_back(std::move(rec));
        }
    }
    return raw;
}

double innings_value(double raw) {
    const double whole = std::floor(raw + 1e-9);
    const long tenth = std::lround((raw - whole) * 10.0);
    if (tenth < 0 || tenth > 2)
        throw std::runtime_error("innings pitched must end in .0, .1 or .2, got " +
                                 std::to_string(raw));
    return whole + static_cast<double>(tenth) / 3.0;
}

RawTables filter_rosters(const RawTables& raw) {
    const std::size_t ab_idx = stat_index(kBattingStats, "at_bats");
    const std::size_t ip_idx = stat_index(kPitchingStats, "innings_pitched");

    std::vector<Index> keep_b, keep_p;
    for (Index i = 0; i < raw.batter_stats.rows(); ++i)
        if (raw.batter_stats(i, static_cast<Index>(ab_idx)) >= 50.0 &&
            raw.batter_exposure(i) > 0.0)
            keep_b.push_back(i);
    for (Index i = 0; i < raw.pitcher_stats.rows(); ++i)
        if (innings_value(raw.pitcher_stats(i, static_cast<Index>(ip_idx))) > 20.0 &&
            raw.pitcher_exposure(i) > 0.0)
            keep_p.push_back(i);
    if (keep_b.empty() || keep_p.empty())
        throw std::runtime_error("roster filters removed every player");

    RawTables out;
    out.batter_exposure.resize(static_cast<Index>(keep_b.size()));
    out.batter_stats.resize(static_cast<Index>(keep_b.size()), raw.batter_stats.cols());
    for (std::size_t k = 0; k < keep_b.size(); ++k) {
        out.batter_ids.push_back(raw.batter_ids[static_cast<std::size_t>(keep_b[k])]);
        out.batter_exposure(static_cast<Index>(k)) = raw.batter_exposure(keep_b[k]);
        out.batter_stats.row(static_cast<Index>(k)) = raw.batter_stats.row(keep_b[k]);
    }
    out.pitcher_exposure.resize(static_cast<Index>(keep_p.size()));
    out.pitcher_stats.resize(static_cast<Index>(keep_p.size()), raw.pitcher_stats.cols());
    for (std::size_t k = 0; k < keep_p.size(); ++k) {
        out.pitcher_ids.push_back(raw.pitcher_ids[static_cast<std::size_t>(keep_p[k])]);
        out.pitcher_exposure(static_cast<Index>(k)) = raw.pitcher_exposure(keep_p[k]);
        out.pitcher_stats.row(static_cast<Index>(k)) = raw.pitcher_stats.row(keep_p[k]);
    }

    std::map<std::string, bool> b_kept, p_kept;
    for (const auto& id : out.batter_ids) b_kept[id] = true;
    for (const auto& id : out.pitcher_ids) p_kept[id] = true;
    for (const auto& rec : raw.matchups)
        if (b_kept.count(rec.batter) && p_kept.count(rec.pitcher)) out.matchups.push_back(rec);
    return out;
}

namespace {

// Standardize columns to mean 0, unit sample variance; constant columns are
// dropped with a warning. Returns the kept column indices.
std::vector<Index> standardize_columns(Matrix& m, const std::vector<std::string>& names,
                                       const char* what) {
    std::vector<Index> kept;
    const double denom = std::max<double>(static_cast<double>(m.rows()) - 1.0, 1.0);
    Matrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) {
        const double mean = m.col(j).mean();
        Vector centered = m.col(j).array() - mean;
        const double var = centered.squaredNorm() / denom;
        if (var <= 1e-24) {
            std::cerr << "warning: dropping constant " << what << " statistic '"
                      << names[static_cast<std::size_t>(j)] << "'\n";
            continue;
        }
        out.col(static_cast<Index>(kept.size())) = centered / std::sqrt(var);
        kept.push_back(j);
    }
    m = out.leftCols(static_cast<Index>(kept.size()));
    return kept;
}

}  // namespace

ScaledCovariates scale_covariates(const RawTables& rosters) {
    ScaledCovariates sc;
    const std::size_t ip_idx = stat_index(kPitchingStats, "innings_pitched");

    Matrix b = rosters.batter_stats;
    for (Index i = 0; i < b.rows(); ++i) {
        if (!(rosters.batter_exposure(i) > 0.0))
            throw std::runtime_error("batter with zero plate appearances: " +
                                     rosters.batter_ids[static_cast<std::size_t>(i)]);
        b.row(i) /= rosters.batter_exposure(i);
    }
    Matrix p = rosters.pitcher_stats;
    for (Index i = 0; i < p.rows(); ++i) p(i, static_cast<Index>(ip_idx)) =
        innings_value(p(i, static_cast<Index>(ip_idx)));
    for (Index i = 0; i < p.rows(); ++i) {
        if (!(rosters.pitcher_exposure(i) > 0.0))
            throw std::runtime_error("pitcher with zero batters faced: " +
                                     rosters.pitcher_ids[static_cast<std::size_t>(i)]);
        p.row(i) /= rosters.pitcher_exposure(i);
    }

    const auto kept_b = standardize_columns(b, kBattingStats, "batting");
    const auto kept_p = standardize_columns(p, kPitchingStats, "pitching");
    for (Index j : kept_b) sc.z_stat_names.push_back(kBattingStats[static_cast<std::size_t>(j)]);
    for (Index j : kept_p) sc.y_stat_names.push_back(kPitchingStats[static_cast<std::size_t>(j)]);

    sc.Z = b;                       // batters x batting stats (m1 x n2)
    sc.Y = p.transpose();           // pitching stats x pitchers (m2 x n1)
    return sc;
}

LinkedDataset assemble(const RawTables& filtered, const ScaledCovariates& scaled) {
    const Index m1 = static_cast<Index>(filtered.batter_ids.size());
    const Index n1 = static_cast<Index>(filtered.pitcher_ids.size());
    std::map<std::string, Index> b_index, p_index;
    for (Index i = 0; i < m1; ++i) b_index[filtered.batter_ids[static_cast<std::size_t>(i)]] = i;
    for (Index j = 0; j < n1; ++j) p_index[filtered.pitcher_ids[static_cast<std::size_t>(j)]] = j;

    Matrix X = Matrix::Zero(m1, n1), N = Matrix::Zero(m1, n1);
    for (const auto& rec : filtered.matchups) {
        const auto bi = b_index.find(rec.batter);
        const auto pj = p_index.find(rec.pitcher);
        if (bi == b_index.end() || pj == p_index.end())
            throw std::runtime_error("matchup references a player missing from the rosters: " +
                                     rec.batter + " vs " + rec.pitcher);
        X(bi->second, pj->second) += rec.hits;  // duplicates are summed
        N(bi->second, pj->second) += rec.at_bats;
    }
    for (Index i = 0; i < m1; ++i)
        for (Index j = 0; j < n1; ++j)
            if (X(i, j) > N(i, j))
                throw std::runtime_error("summed matchups ended with hits > at_bats");
    const Mask mask = N.array() >= 1.0;

    if (scaled.Y.cols() != n1 || scaled.Z.rows() != m1)
        throw std::runtime_error("covariate blocks do not match the rosters");

    LinkedDataset ds = LinkedDataset::make(std::move(X), std::move(N), scaled.Y, scaled.Z, mask);
    ds.row_ids = filtered.batter_ids;
    ds.col_ids = filtered.pitcher_ids;
    return ds;
}

LinkedDataset load_league(const std::string& dir) {
    const RawTables filtered = filter_rosters(load_raw(dir));
    return assemble(filtered, scale_covariates(filtered));
}

void save_dataset(const LinkedDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    csv::write_matrix(dir + "/x.csv", ds.X);
    csv::write_matrix(dir + "/n.csv", ds.N);
    csv::write_matrix(dir + "/y.csv", ds.Y);
    csv::write_matrix(dir + "/z.csv", ds.Z);
    csv::write_mask(dir + "/mask.csv", ds.mask_X);
    nlohmann::json meta;
    meta["x_family"] = family_name(ds.spec_X.family);
    meta["x_dispersion"] = ds.spec_X.dispersion;
    meta["y_dispersion"] = ds.spec_Y.dispersion;
    meta["z_dispersion"] = ds.spec_Z.dispersion;
    meta["row_ids"] = ds.row_ids;
    meta["col_ids"] = ds.col_ids;
    std::ofstream out(dir + "/meta.json");
    if (!out) throw std::runtime_error("cannot write " + dir + "/meta.json");
    out << meta.dump(2) << '\n';
}

LinkedDataset load_dataset(const std::string& dir) {
    std::ifstream in(dir + "/meta.json");
    if (!in) throw std::runtime_error("cannot read " + dir + "/meta.json");
    nlohmann::json meta;
    in >> meta;

    LinkedDataset ds;
    ds.X = csv::read_matrix(dir + "/x.csv");
    ds.N = csv::read_matrix(dir + "/n.csv");
    ds.Y = csv::read_matrix(dir + "/y.csv");
    ds.Z = csv::read_matrix(dir + "/z.csv");
    ds.mask_X = csv::read_mask(dir + "/mask.csv");
    const Family fx = parse_family(meta.at("x_family").get<std::string>());
    ds.spec_X = fx == Family::binomial
                    ? binomial_spec()
                    : normal_spec(meta.at("x_dispersion").get<double>());
    ds.spec_X.dispersion = meta.at("x_dispersion").get<double>();
    ds.spec_Y = normal_spec(meta.at("y_dispersion").get<double>());
    ds.spec_Z = normal_spec(meta.at("z_dispersion").get<double>());
    ds.row_ids = meta.value("row_ids", std::vector<std::string>{});
    ds.col_ids = meta.value("col_ids", std::vector<std::string>{});
    ds.validate();
    return ds;
}

bool is_dataset_dir(const std::string& dir) {
    return std::filesystem::exists(dir + "/meta.json") &&
           std::filesystem::exists(dir + "/x.csv");
}

LinkedDataset load_any(const std::string& dir) {
    if (is_dataset_dir(dir)) return load_dataset(dir);
    if (std::filesystem::exists(dir + "/matchups.csv")) return load_league(dir);
    throw std::runtime_error("no dataset found in " + dir +
                             " (expected meta.json/x.csv or batting/pitching/matchups.csv)");
}

namespace {

struct StatModel {
    double base_rate;
    Vector loading;  // ties the stat to the player's latent factors
};

double stat_rate(const StatModel& s, const Vector& latent) {
    const double theta = link(Family::binomial, s.base_rate) + s.loading.dot(latent);
    return std::clamp(inverse_link(Family::binomial, theta), 0.001, 0.98);
}

std::string innings_string(double thirds_total) {
    const long thirds = std::lround(thirds_total);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ld.%ld", thirds / 3, thirds % 3);
    return buf;
}

}  // namespace

void synth_league(const SynthLeagueConfig& cfg, const std::string& out_dir) {
    if (cfg.batters < 2 || cfg.pitchers < 2 || cfg.rank < 1)
        throw std::invalid_argument("synth league needs >= 2 players per side and rank >= 1");
    std::filesystem::create_directories(out_dir);
    Rng rng(cfg.seed);

    const int m = cfg.batters, n = cfg.pitchers, r = cfg.rank;
    Matrix bu(m, r), pv(n, r);
    for (Index i = 0; i < m; ++i)
        for (int k = 0; k < r; ++k) bu(i, k) = rng.normal();
    for (Index j = 0; j < n; ++j)
        for (int k = 0; k < r; ++k) pv(j, k) = rng.normal();

    const double theta0 = link(Family::binomial, cfg.base_average);
    Matrix p_true(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            p_true(i, j) = inverse_link(
                Family::binomial, theta0 + cfg.theta_scale * bu.row(i).dot(pv.row(j)));

    // Per-stat models; every rate is tied to the same latent factors that
    // drive the matchup probabilities.
    const std::vector<std::pair<std::string, double>> batting_base = {
        {"games", 0.25},       {"at_bats", 0.9},   {"runs", 0.12},  {"hits", 0.23},
        {"doubles", 0.045},    {"triples", 0.005}, {"homeruns", 0.03},
        {"runs_batted_in", 0.12}, {"stolen_bases", 0.01}, {"caught_stealing", 0.005},
        {"walks", 0.08},       {"strikeouts", 0.2}, {"total_bases", 0.38},
        {"grounded_into_double_play", 0.02}, {"hit_by_pitch", 0.01},
        {"sacrifice_hits", 0.005}, {"sacrifice_flies", 0.007}, {"intentional_walks", 0.005}};
    const std::vector<std::pair<std::string, double>> pitching_base = {
        {"wins", 0.012},  {"losses", 0.012}, {"games", 0.08},  {"games_started", 0.03},
        {"games_finished", 0.03}, {"complete_games", 0.002}, {"shutouts", 0.002},
        {"saves", 0.01},  {"hits", 0.23},    {"runs", 0.11},   {"earned_runs", 0.1},
        {"homeruns", 0.03}, {"walks", 0.08}, {"intentional_walks", 0.003},
        {"strikeouts", 0.22}, {"hit_by_pitch", 0.008}, {"balks", 0.002},
        {"wild_pitches", 0.008}};

    std::map<std::string, StatModel> b_models, p_models;
    for (const auto& [name, base] : batting_base) {
        Vector w(r);
        for (int k = 0; k < r; ++k) w(k) = rng.normal(0.0, 0.5);
        b_models[name] = {base, w};
    }
    for (const auto& [name, base] : pitching_base) {
        Vector w(r);
        for (int k = 0; k < r; ++k) w(k) = rng.normal(0.0, 0.5);
        p_models[name] = {base, w};
    }

    char idbuf[32];
    // batting.csv: kept batters first, then extras that fail the 50 AB filter.
    {
        std::ofstream out(out_dir + "/batting.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/batting.csv");
        out << "batter_id,plate_appearances";
        for (const auto& s : kBattingStats) out << ',' << s;
        out << '\n';
        auto write_batter = [&](const std::string& id, long pa, const Vector& latent) {
            out << id << ',' << pa;
            for (const auto& s : kBattingStats) {
                long count;
                if (s == "at_bats") {
                    count = rng.binomial(pa, 0.9);
                } else {
                    count = rng.binomial(pa, stat_rate(b_models.at(s), latent));
                }
                out << ',' << count;
            }
            out << '\n';
        };
        for (int i = 0; i < m; ++i) {
            std::snprintf(idbuf, sizeof(idbuf), "B%04d", i + 1);
            write_batter(idbuf, rng.uniform_int(400, 700), bu.row(i).transpose());
        }
        for (int e = 0; e < cfg.extra_batters; ++e) {
            std::snprintf(idbuf, sizeof(idbuf), "XB%03d", e + 1);
            Vector latent = Vector::Zero(r);
            // at_bats <= plate appearances <= 40 < 50, always filtered
            write_batter(idbuf, rng.uniform_int(10, 40), latent);
        }
    }
    // pitching.csv: kept pitchers first, then extras under 20 innings.
    {
        std::ofstream out(out_dir + "/pitching.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/pitching.csv");
        out << "pitcher_id,batters_faced";
        for (const auto& s : kPitchingStats) out << ',' << s;
        out << '\n';
        auto write_pitcher = [&](const std::string& id, long bf, const Vector& latent) {
            out << id << ',' << bf;
            for (const auto& s : kPitchingStats) {
                if (s == "innings_pitched") {
                    out << ',' << innings_string(std::round(bf / 4.4 * 3.0));
                } else {
                    out << ',' << rng.binomial(bf, stat_rate(p_models.at(s), latent));
                }
            }
            out << '\n';
        };
        for (int j = 0; j < n; ++j) {
            std::snprintf(idbuf, sizeof(idbuf), "P%04d", j + 1);
            write_pitcher(idbuf, rng.uniform_int(250, 700), pv.row(j).transpose());
        }
        for (int e = 0; e < cfg.extra_pitchers; ++e) {
            std::snprintf(idbuf, sizeof(idbuf), "XP%03d", e + 1);
            Vector latent = Vector::Zero(r);
            // 80 batters faced is at most 18.2 innings, always filtered
            write_pitcher(idbuf, rng.uniform_int(40, 80), latent);
        }
    }
    // matchups.csv: exact observed fraction of the kept grid plus a couple of
    // records for filtered players.
    {
        std::ofstream out(out_dir + "/matchups.csv");
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/matchups.csv");
        out << "batter_id,pitcher_id,at_bats,hits\n";
        const std::size_t total = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
        const std::size_t observed = static_cast<std::size_t>(
            std::llround(cfg.observed_fraction * static_cast<double>(total)));
        const auto perm = rng.permutation(total);
        std::vector<std::size_t> chosen(perm.begin(),
                                        perm.begin() + static_cast<long>(observed));
        std::sort(chosen.begin(), chosen.end());  // row-major file order
        for (std::size_t flat : chosen) {
            const int i = static_cast<int>(flat / static_cast<std::size_t>(n));
            const int j = static_cast<int>(flat % static_cast<std::size_t>(n));
            const long ab = 1 + rng.binomial(10, 0.17);
            const long hits = rng.binomial(ab, p_true(i, j));
            char bid[32], pid[32];
            std::snprintf(bid, sizeof(bid), "B%04d", i + 1);
            std::snprintf(pid, sizeof(pid), "P%04d", j + 1);
            out << bid << ',' << pid << ',' << ab << ',' << hits << '\n';
        }
        for (int e = 0; e < std::min(cfg.extra_batters, 2); ++e) {
            std::snprintf(idbuf, sizeof(idbuf), "XB%03d", e + 1);
            out << idbuf << ",P0001,2,1\n";
        }
    }
    csv::write_matrix(out_dir + "/true_p.csv", p_true);
}

}  // namespace glmf::ingest
