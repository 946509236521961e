#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdleaf/learn/learner.hpp"

namespace tdleaf::cli {

using nlohmann::json;

/// A config problem. line is 1-based, or 0 when the offending value did
/// not come from the file (an override or a missing key).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

  private:
    int line_;
};

/// Parsed JSON plus the source line of every value, keyed by JSON pointer.
class JsonDocument {
  public:
    static JsonDocument parse(const std::string& text, std::string source);
    static JsonDocument load(const std::filesystem::path& path);

    json& root() { return root_; }
    const json& root() const { return root_; }
    const std::string& source() const { return source_; }
    /// Line of the value at pointer, or 0 if unknown.
    int line_of(const std::string& pointer) const;
    /// Replaces a top-level value; it no longer has a source line.
    void override_value(const std::string& key, json value);

  private:
    json root_;
    std::string source_;
    std::map<std::string, int> lines_;
};

struct AgentSpec {
    std::string id;
    std::string kind = "random";  // random | fixed | search
    int depth = 1;
    std::map<std::string, double> weights;
    std::filesystem::path weights_file;
    bool random_ties = false;
    std::uint64_t seed = 0;
    std::optional<double> rating;
    std::string pointer;  // where the spec sits in the config, for messages
};

struct TreeFixture {
    std::string name;
    std::string tree;
    int depth = 0;
    double value = 0.0;
    std::vector<std::string> leaves;  // acceptable PV leaf labels
};

struct RunConfig {
    std::string game;
    std::string mode;
    std::string description;
    std::uint64_t seed = 0;
    int games = 0;
    int search_depth = 1;
    std::filesystem::path out_dir;
    std::string features = "full";
    std::map<std::string, double> initial_weights;
    std::map<std::string, double> anchors;
    learn::LearnerConfig learner;
    std::string matching = "uniform";
    std::vector<AgentSpec> opponents;
    bool random_ties = true;
    int opening_random_plies = 0;
    int snapshot_every = 0;
    bool record_both_seats = false;
    double k_factor = 32.0;
    std::string learner_id = "learner";
    double learner_rating = 1500.0;
    unsigned threads = 1;
    AgentSpec agent_a;
    AgentSpec agent_b;
    std::filesystem::path run_dir;
    std::vector<TreeFixture> trees;

    /// The JSON this config was read from, overrides included.
    json source;
    std::string source_name;
};

/// Command-line overrides, applied to the JSON before validation.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

/// Validates doc into a RunConfig. Unknown keys, wrong types, bad values
/// and missing referenced files raise ConfigError.
RunConfig parse_config(const JsonDocument& doc);

/// Reads, overrides and validates a config file.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Feature names of a game's feature set; throws std::invalid_argument
/// for an unknown game or set.
std::vector<std::string> feature_names(const std::string& game, const std::string& set);

/// The modes and games a config may name.
const std::vector<std::string>& known_modes();
const std::vector<std::string>& known_games();

}  // namespace tdleaf::cli
