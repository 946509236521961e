#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdleaf/eval/linear.hpp"
#include "tdleaf/game/types.hpp"

namespace tdleaf::learn {

class TraceError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Which positive temporal differences are zeroed.
enum class Clipping {
    None,
    /// Positive d_t is zeroed unless the agent predicted the opponent's reply.
    ClipUnlessPredicted,
    /// As above, but a positive d_t is also kept when the opponent was not
    /// rated below the agent.
    ClipUnlessPredictedOrStronger,
};

std::string_view to_string(Clipping c);
Clipping parse_clipping(std::string_view text);

/// Learning rate per update: constant, or value / (1 + t / horizon) never
/// dropping below floor, where t is the game index.
struct AlphaSchedule {
    enum class Kind { Constant, InverseDecay };

    Kind kind = Kind::Constant;
    double value = 1.0;
    double horizon = 1.0;
    double floor = 0.0;

    double at(int game_index) const;
};

/// lambda is used for games with index < until_game; the first matching
/// stage wins and LearnerConfig::lambda applies after the last one.
struct LambdaStage {
    int until_game = 0;
    double lambda = 1.0;
};

struct LearnerConfig {
    double lambda = 0.7;
    AlphaSchedule alpha;
    eval::SquashConfig squash;
    Clipping clipping = Clipping::ClipUnlessPredicted;
    int update_every_n_games = 1;
    std::vector<LambdaStage> lambda_schedule;

    double lambda_at(int game_index) const;
    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// One of the learning agent's own searches during a game. Values and
/// features are kept in White's frame.
struct StepRecord {
    int ply = 0;                     // root position's ply within the game
    std::uint64_t root_hash = 0;
    std::vector<std::string> pv;     // move tokens from root to leaf
    double raw_value = 0.0;          // J(x_t^l, w), or the reward at a decided leaf
    double value = 0.0;              // v_t^l = squash(raw_value), or the reward at a decided leaf
    eval::FeatureVector leaf_features;
    bool leaf_terminal = false;      // leaf is a finished game; gradient is zero
    bool opponent_move_predicted = false;
    bool opponent_rating_lower = false;
};

/// The learning agent's view of one game: x_1..x_{N-1} plus r(x_N).
struct GameTrace {
    std::vector<StepRecord> steps;
    std::optional<game::Outcome> outcome;
    game::Color agent = game::Color::White;
    int game_index = 0;

    void set_outcome(game::Outcome r);
};

struct TemporalDifference {
    int t = 0;
    double d = 0.0;
};

/// Flags that drive clipping for one step.
struct StepFlags {
    bool opponent_move_predicted = false;
    bool opponent_rating_lower = false;
};

/// d_t = v_{t+1} - v_t in the agent's frame, with v_N = r(x_N), then
/// clipped per cfg.clipping.
std::vector<TemporalDifference> temporal_differences(const GameTrace& trace, const LearnerConfig& cfg);

/// Same rule on bare values (agent frame). values[t] are the predictions,
/// reward is r(x_N); flags may be empty (all false).
std::vector<double> clipped_differences(std::span<const double> values, double reward,
                                        std::span<const StepFlags> flags, Clipping clipping);

/// S_t = sum_{j >= t} lambda^{j-t} d_j via S_t = d_t + lambda * S_{t+1}.
std::vector<double> discounted_difference_sums(std::span<const double> d, double lambda);

/// TD(lambda) on root positions. roots are phi(x_t) in the agent's frame;
/// predictions are recomputed from w. Returns the weight change.
std::vector<double> td_update(std::span<const eval::FeatureVector> roots, std::span<const StepFlags> flags,
                              double reward, const LearnerConfig& cfg, const eval::WeightVector& w,
                              int game_index = 0);

/// TDLeaf(lambda) weight change for one game: gradients taken at the
/// principal-variation leaves, values as recorded during play.
std::vector<double> tdleaf_delta(const GameTrace& trace, const LearnerConfig& cfg, const eval::WeightVector& w);

/// w + tdleaf_delta(trace, cfg, w).
eval::WeightVector tdleaf_update(const GameTrace& trace, const LearnerConfig& cfg, eval::WeightVector w);

/// One batched update: every trace's change is computed at the same w and
/// the sum is applied once.
eval::WeightVector apply_batch(std::span<const GameTrace> traces, const LearnerConfig& cfg, eval::WeightVector w);

}  // namespace tdleaf::learn
