#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glmf/linked_model.hpp"

namespace glmf::ingest {

// Input schema (one header row, comma separated, ids as strings):
//   batting.csv:  batter_id, plate_appearances, <18 batting stat columns>
//   pitching.csv: pitcher_id, batters_faced, <19 pitching stat columns>
//   matchups.csv: batter_id, pitcher_id, at_bats, hits
// innings_pitched uses the baseball thirds convention (.1 = 1/3, .2 = 2/3).

extern const std::vector<std::string> kBattingStats;
extern const std::vector<std::string> kPitchingStats;

struct MatchupRecord {
    std::string batter;
    std::string pitcher;
    double at_bats = 0.0;
    double hits = 0.0;
};

struct RawTables {
    std::vector<std::string> batter_ids;
    Vector batter_exposure;  // plate appearances
    Matrix batter_stats;     // batters x kBattingStats
    std::vector<std::string> pitcher_ids;
    Vector pitcher_exposure;  // batters faced
    Matrix pitcher_stats;     // pitchers x kPitchingStats
    std::vector<MatchupRecord> matchups;
};

RawTables load_raw(const std::string& dir);

// Converts a thirds-notation innings value (e.g. 20.1 = 20 1/3) to a real.
double innings_value(double raw);

// Keeps pitchers with innings pitched strictly above 20 and batters with at
// least 50 at-bats; players with no exposure cannot be scaled and are dropped
// too. Matchup records for dropped players are removed.
RawTables filter_rosters(const RawTables& raw);

struct ScaledCovariates {
    Matrix Y;  // pitching stats x pitchers (m2 x n1)
    Matrix Z;  // batters x batting stats (m1 x n2)
    std::vector<std::string> y_stat_names;
    std::vector<std::string> z_stat_names;
};

// Divides every statistic by the player's exposure, converts innings to real
// values, standardizes each statistic to mean 0 and unit sample variance, and
// drops constant statistics with a warning.
ScaledCovariates scale_covariates(const RawTables& rosters);

// X and N with batters as rows and pitchers as columns; duplicate matchup
// records are summed; the mask marks cells with at least one at-bat.
LinkedDataset assemble(const RawTables& filtered, const ScaledCovariates& scaled);

LinkedDataset load_league(const std::string& dir);  // load_raw + filter + scale + assemble

// Serialized dataset directory: x.csv, n.csv, y.csv, z.csv, mask.csv,
// meta.json. Round-trips a LinkedDataset exactly.
void save_dataset(const LinkedDataset& ds, const std::string& dir);
LinkedDataset load_dataset(const std::string& dir);

// True when `dir` holds a serialized dataset rather than the raw league CSVs.
bool is_dataset_dir(const std::string& dir);
LinkedDataset load_any(const std::string& dir);

struct SynthLeagueConfig {
    int batters = 508;
    int pitchers = 516;
    int rank = 3;
    double theta_scale = 0.14;      // latent effect size on the logit scale
    double base_average = 0.25;     // league-wide batting average
    double observed_fraction = 0.24;
    int extra_batters = 6;    // below the at-bat threshold, filtered on ingest
    int extra_pitchers = 6;   // below the innings threshold
    std::uint64_t seed = 0;
};

// Writes batting.csv / pitching.csv / matchups.csv in the input schema plus
// true_p.csv with the generating probabilities of the kept players. The stats
// carry the same latent factors as the matchup probabilities, so the full
// pipeline is testable without real data.
void synth_league(const SynthLeagueConfig& cfg, const std::string& out_dir);

}  // namespace glmf::ingest
