#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdleaf/arena/match.hpp"
#include "tdleaf/arena/training.hpp"
#include "tdleaf/cli/config.hpp"

namespace tdleaf::cli {

/// A run directory or output file could not be written or read.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TrainingSummary {
    eval::Snapshot final_weights;
    std::vector<arena::GameRow> rows;
    std::filesystem::path dir;
};

struct ReplaySummary {
    bool pass = false;
    int updates = 0;
    int snapshots_checked = 0;
    std::vector<std::string> problems;
};

struct FixtureCheck {
    bool pass = false;
    std::string line;
};

/// train-online / train-selfplay: plays the run and writes config.json,
/// ratings.csv, traces.log, weights_final.snapshot and
/// weights_game_NNNNNN.snapshot files into out_dir.
TrainingSummary run_training(const RunConfig& cfg);

arena::HeadToHead run_head_to_head(const RunConfig& cfg);

/// Recomputes a finished run's weights from its traces.log and compares
/// them with every snapshot in the run directory.
ReplaySummary run_replay(const RunConfig& cfg);

std::vector<FixtureCheck> verify_figures(const RunConfig& cfg);

/// The tree fixtures checked when a verify-figures config lists none.
std::vector<TreeFixture> default_tree_fixtures();

/// Executes cfg.mode and reports on out. Returns 0 on success and 1 when a
/// replay or fixture check fails; I/O problems throw IoError.
int run(const RunConfig& cfg, std::ostream& out, bool quiet);

}  // namespace tdleaf::cli
