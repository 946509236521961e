#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tdleaf/arena/elo.hpp"
#include "tdleaf/arena/match.hpp"
#include "tdleaf/arena/trace_log.hpp"
#include "tdleaf/learn/learner.hpp"

namespace tdleaf::arena {

enum class Matching { Uniform, NearestRating };

std::string_view to_string(Matching m);
Matching parse_matching(std::string_view text);

/// The opponent population for on-line training.
template <Game G>
struct PoolConfig {
    std::vector<Agent<G>> opponents;
    /// Starting rating per opponent; empty means RatingTable::kInitialRating for all.
    std::vector<double> ratings;
    Matching matching = Matching::Uniform;
};

struct TrainingOptions {
    learn::LearnerConfig learner;
    int games = 0;
    std::uint64_t seed = 0;
    int search_depth = 1;
    bool random_ties = true;
    int opening_random_plies = 0;
    double k_factor = 32.0;
    /// Write a weight snapshot every this many games; 0 disables.
    int snapshot_every = 0;
    /// Self-play only: record both seats instead of White's.
    bool record_both_seats = false;
    std::string learner_id = "learner";
    double learner_rating = RatingTable::kInitialRating;
};

/// One ratings.csv row.
struct GameRow {
    int game_index = 0;
    std::string opponent_id;
    Color color = Color::White;
    double outcome = 0.0;  // learner's frame
    double agent_rating = 0.0;
    double opponent_rating = 0.0;
    int moves = 0;
    std::uint64_t nodes = 0;
    std::uint64_t weight_hash = 0;  // FNV-1a of the weight snapshot after this game
};

void write_ratings_csv(std::ostream& out, const std::vector<GameRow>& rows);

struct RunArtifact {
    eval::Snapshot final_weights;
    std::vector<GameRow> rows;
    /// (games played, weights) every snapshot_every games.
    std::vector<std::pair<int, eval::WeightVector>> snapshots;
    std::string trace_log;
    RatingTable ratings;
    /// Joined move tokens per game.
    std::vector<std::string> move_lists;
};

namespace detail {

/// Shared bookkeeping of a training run: batching, snapshots, the log.
class RunState {
  public:
    RunState(const TrainingOptions& opts, std::string_view game, std::vector<std::string> names, eval::WeightVector w)
        : opts_(opts), names_(std::move(names)), weights_(std::move(w)), ratings_(opts.k_factor) {
        game_ = std::string(game);
        log_ << trace_log_header(game);
    }

    const eval::WeightVector& weights() const { return weights_; }
    RatingTable& ratings() { return ratings_; }

    void log_trace(const learn::GameTrace& t, const std::string& agent_id, const std::string& white,
                   const std::string& black, const std::vector<std::string>& moves) {
        write_trace_block(log_, t, agent_id, white, black, moves);
        batch_.push_back(t);
    }

    /// Applies the batch if it is full (or `force`), then snapshots.
    void end_game(int game_index, bool force) {
        const int every = opts_.learner.update_every_n_games;
        if (!batch_.empty() && (force || static_cast<int>(batch_.size()) >= every)) {
            weights_ = learn::apply_batch(batch_, opts_.learner, std::move(weights_));
            batch_.clear();
            write_update_line(log_, game_index);
        }
        const int played = game_index + 1;
        if (opts_.snapshot_every > 0 && played % opts_.snapshot_every == 0) snapshots_.emplace_back(played, weights_);
    }

    std::uint64_t weight_hash() const { return game::fnv1a(eval::snapshot_text({game_, names_, weights_})); }

    RunArtifact finish(std::vector<GameRow> rows, std::vector<std::string> moves) {
        RunArtifact out{{game_, names_, weights_}, std::move(rows), std::move(snapshots_), log_.str(),
                        std::move(ratings_), std::move(moves)};
        return out;
    }

  private:
    const TrainingOptions& opts_;
    std::string game_;
    std::vector<std::string> names_;
    eval::WeightVector weights_;
    RatingTable ratings_;
    std::vector<learn::GameTrace> batch_;
    std::vector<std::pair<int, eval::WeightVector>> snapshots_;
    std::ostringstream log_;
};

template <Game G>
std::size_t pick_opponent(const PoolConfig<G>& pool, const RatingTable& ratings, double own, std::mt19937_64& rng) {
    const std::size_t n = pool.opponents.size();
    if (pool.matching == Matching::Uniform) return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> nearest;
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = std::abs(ratings.rating(pool.opponents[i].id) - own);
        if (gap < best) {
            best = gap;
            nearest = {i};
        } else if (gap == best) {
            nearest.push_back(i);
        }
    }
    return nearest[std::uniform_int_distribution<std::size_t>(0, nearest.size() - 1)(rng)];
}

}  // namespace detail

/// On-line training against a fixed opponent pool. Each game: pick an
/// opponent, play (the learner alternates colors), update ratings, update
/// weights when the batch is full.
template <Game G>
RunArtifact train_online(const PoolConfig<G>& pool, const TrainingOptions& opts, eval::WeightVector initial,
                         std::shared_ptr<const eval::Features<G>> features) {
    opts.learner.validate();
    if (pool.opponents.empty()) throw std::invalid_argument("opponent pool is empty");
    if (!pool.ratings.empty() && pool.ratings.size() != pool.opponents.size())
        throw std::invalid_argument("pool ratings must match the opponents");

    detail::RunState run(opts, G::kName, features->names(), std::move(initial));
    run.ratings().add(opts.learner_id, opts.learner_rating);
    for (std::size_t i = 0; i < pool.opponents.size(); ++i) {
        if (pool.opponents[i].id == opts.learner_id) throw std::invalid_argument("pool agent reuses the learner id");
        run.ratings().add(pool.opponents[i].id, pool.ratings.empty() ? RatingTable::kInitialRating : pool.ratings[i]);
    }
    auto match_rng = make_rng(opts.seed, -1, 0);

    std::vector<GameRow> rows;
    std::vector<std::string> move_lists;
    for (int g = 0; g < opts.games; ++g) {
        const double own_rating = run.ratings().rating(opts.learner_id);
        const auto& opp = pool.opponents[detail::pick_opponent(pool, run.ratings(), own_rating, match_rng)];
        const double opp_rating = run.ratings().rating(opp.id);
        const Color color = g % 2 == 0 ? Color::White : Color::Black;
        const auto learner =
            Agent<G>::search(opts.learner_id, opts.search_depth, run.weights(), features, opts.random_ties);

        PlayOptions<G> po;
        po.seed = opts.seed;
        po.game_index = g;
        po.opening_random_plies = opts.opening_random_plies;
        po.record_white = color == Color::White;
        po.record_black = color == Color::Black;
        po.squash = opts.learner.squash;
        po.opponent_rating_lower = opp_rating < own_rating;
        const auto rec = color == Color::White ? play_game(learner, opp, po) : play_game(opp, learner, po);

        run.ratings().record(rec.white, rec.black, rec.outcome);
        const auto tokens = move_tokens<G>(rec.moves);
        for (const auto& t : rec.traces) run.log_trace(t, opts.learner_id, rec.white, rec.black, tokens);
        run.end_game(g, g + 1 == opts.games);

        rows.push_back({g, opp.id, color, rec.outcome.for_side(color), run.ratings().rating(opts.learner_id),
                        run.ratings().rating(opp.id), static_cast<int>(rec.moves.size()),
                        rec.nodes[color == Color::White ? 0 : 1], run.weight_hash()});
        move_lists.push_back(join_tokens(tokens));
    }
    return run.finish(std::move(rows), std::move(move_lists));
}

/// Self-play training: the learner takes both seats with the same weights.
/// Traces come from the White seat unless record_both_seats is set.
template <Game G>
RunArtifact train_selfplay(const TrainingOptions& opts, eval::WeightVector initial,
                           std::shared_ptr<const eval::Features<G>> features) {
    opts.learner.validate();
    detail::RunState run(opts, G::kName, features->names(), std::move(initial));
    run.ratings().add(opts.learner_id, opts.learner_rating);

    std::vector<GameRow> rows;
    std::vector<std::string> move_lists;
    for (int g = 0; g < opts.games; ++g) {
        const auto learner =
            Agent<G>::search(opts.learner_id, opts.search_depth, run.weights(), features, opts.random_ties);
        PlayOptions<G> po;
        po.seed = opts.seed;
        po.game_index = g;
        po.opening_random_plies = opts.opening_random_plies;
        po.record_white = true;
        po.record_black = opts.record_both_seats;
        po.squash = opts.learner.squash;
        const auto rec = play_game(learner, learner, po);

        const auto tokens = move_tokens<G>(rec.moves);
        for (const auto& t : rec.traces) run.log_trace(t, opts.learner_id, rec.white, rec.black, tokens);
        run.end_game(g, g + 1 == opts.games);

        const double r = run.ratings().rating(opts.learner_id);
        rows.push_back({g, "self", Color::White, rec.outcome.for_side(Color::White), r, r,
                        static_cast<int>(rec.moves.size()), rec.nodes[0] + rec.nodes[1], run.weight_hash()});
        move_lists.push_back(join_tokens(tokens));
    }
    return run.finish(std::move(rows), std::move(move_lists));
}

struct ReplayResult {
    eval::WeightVector final_weights;
    /// (game index, weights) after every update, in order.
    std::vector<std::pair<int, eval::WeightVector>> updates;
    /// Logged values that disagree with the recomputation.
    std::vector<std::string> mismatches;

    /// Weights once `games_played` games are finished.
    eval::WeightVector after_games(int games_played, const eval::WeightVector& initial) const {
        const eval::WeightVector* w = &initial;
        for (const auto& [g, u] : updates)
            if (g < games_played) w = &u;
        return *w;
    }
};

/// Recomputes a run's weight trajectory from its trace log alone: roots
/// are rebuilt by replaying the move lists, leaves by replaying the PVs,
/// and every update is redone from the recomputed values.
template <Game G>
ReplayResult replay_traces(const std::vector<TraceLogEntry>& log, const learn::LearnerConfig& cfg,
                           eval::WeightVector w, const eval::Features<G>& features) {
    ReplayResult out;
    std::vector<learn::GameTrace> batch;
    auto note = [&](int game_index, const std::string& what) {
        out.mismatches.push_back("game " + std::to_string(game_index) + ": " + what);
    };
    for (const auto& e : log) {
        if (e.kind == TraceLogEntry::Kind::Update) {
            w = learn::apply_batch(batch, cfg, std::move(w));
            batch.clear();
            out.updates.emplace_back(e.game_index, w);
            continue;
        }

        std::vector<G> positions{G::initial()};
        for (const auto& tok : e.moves) positions.push_back(positions.back().apply(G::parse_action(tok)));

        learn::GameTrace trace;
        trace.agent = e.color;
        trace.game_index = e.game_index;
        for (const auto& logged : e.trace.steps) {
            if (logged.ply < 0 || logged.ply >= static_cast<int>(positions.size()))
                throw TraceLogError("trace log: step ply out of range");
            const G& root = positions[static_cast<std::size_t>(logged.ply)];
            if (root.hash() != logged.root_hash) note(e.game_index, "root hash differs at ply " + std::to_string(logged.ply));
            G leaf = root;
            for (const auto& tok : logged.pv) leaf = leaf.apply(G::parse_action(tok));

            learn::StepRecord s = logged;
            if (leaf.is_terminal()) {
                s.leaf_terminal = true;
                s.leaf_features.values.assign(features.size(), 0.0);
                s.raw_value = s.value = leaf.outcome().white_reward;
            } else {
                const auto phi = features(leaf);
                s.leaf_features = leaf.side_to_move() == Color::White ? phi : phi.negated();
                s.raw_value = eval::raw_eval(s.leaf_features, w);
                s.value = eval::squash(s.raw_value, cfg.squash);
            }
            if (s.raw_value != logged.raw_value || s.value != logged.value)
                note(e.game_index, "value differs at ply " + std::to_string(logged.ply));
            trace.steps.push_back(std::move(s));
        }
        trace.set_outcome(*e.trace.outcome);
        if (positions.back().is_terminal() && positions.back().outcome() != *e.trace.outcome)
            note(e.game_index, "logged outcome differs from the replayed game");
        batch.push_back(std::move(trace));
    }
    if (!batch.empty()) throw TraceLogError("trace log: traces after the last update");
    out.final_weights = std::move(w);
    return out;
}

}  // namespace tdleaf::arena
