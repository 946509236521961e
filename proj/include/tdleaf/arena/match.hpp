#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tdleaf/eval/features.hpp"
#include "tdleaf/game/types.hpp"
#include "tdleaf/learn/learner.hpp"
#include "tdleaf/search/search.hpp"

namespace tdleaf::arena {

using game::Color;
using game::Game;

enum class AgentKind {
    Search,    // learning agent: depth-d alpha-beta on its current weights
    Fixed,     // same move rule, weights frozen for the run
    Random,    // uniform over legal moves
    Scripted,  // plays script[ply]; test fixture
};

template <Game G>
struct Agent {
    std::string id;
    AgentKind kind = AgentKind::Random;
    int depth = 0;
    eval::WeightVector weights;
    std::shared_ptr<const eval::Features<G>> features;
    bool random_ties = false;
    std::uint64_t seed = 0;  // mixed into this agent's per-game random stream
    std::vector<typename G::Action> script;

    static Agent search(std::string id, int depth, eval::WeightVector w,
                        std::shared_ptr<const eval::Features<G>> f, bool random_ties, std::uint64_t seed = 0) {
        return Agent{std::move(id), AgentKind::Search, depth, std::move(w), std::move(f), random_ties, seed, {}};
    }
    static Agent fixed(std::string id, int depth, eval::WeightVector w,
                       std::shared_ptr<const eval::Features<G>> f, bool random_ties, std::uint64_t seed = 0) {
        return Agent{std::move(id), AgentKind::Fixed, depth, std::move(w), std::move(f), random_ties, seed, {}};
    }
    static Agent random(std::string id, std::uint64_t seed = 0) {
        return Agent{std::move(id), AgentKind::Random, 0, {}, nullptr, false, seed, {}};
    }
    static Agent scripted(std::string id, std::vector<typename G::Action> script) {
        return Agent{std::move(id), AgentKind::Scripted, 0, {}, nullptr, false, 0, std::move(script)};
    }

    bool searches() const { return kind == AgentKind::Search || kind == AgentKind::Fixed; }
};

template <Game G>
struct Decision {
    typename G::Action action;
    std::optional<search::SearchResult<G>> search;
};

/// Move choice. Searching agents play the first move of the principal
/// variation, i.e. the move that is worst for the opponent after a
/// depth-d minimax look-ahead.
template <Game G>
Decision<G> choose(const Agent<G>& agent, const G& s, std::mt19937_64& rng) {
    switch (agent.kind) {
        case AgentKind::Random: {
            const auto moves = s.legal_actions();
            std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
            return {moves[pick(rng)], std::nullopt};
        }
        case AgentKind::Scripted: {
            const auto ply = static_cast<std::size_t>(s.ply());
            if (ply < agent.script.size()) return {agent.script[ply], std::nullopt};
            return {s.legal_actions().front(), std::nullopt};
        }
        case AgentKind::Search:
        case AgentKind::Fixed: break;
    }
    const auto tie = agent.random_ties ? search::TieBreak::uniform_random(rng()) : search::TieBreak::first_found();
    const eval::LinearEvaluator<G> evaluator(*agent.features, agent.weights);
    auto result = search::alphabeta(s, agent.depth, evaluator, tie);
    if (result.pv.empty()) throw std::logic_error("agent '" + agent.id + "' has no move to play");
    auto action = result.pv.front();
    return {action, std::move(result)};
}

/// The learner's record of one search from `root`, `ply` plies into the game.
template <Game G>
learn::StepRecord make_step(int ply, const G& root, const search::SearchResult<G>& r, const eval::Features<G>& f,
                            const eval::SquashConfig& squash) {
    learn::StepRecord step;
    step.ply = ply;
    step.root_hash = root.hash();
    for (const auto& a : r.pv) step.pv.push_back(G::action_to_string(a));
    if (r.leaf.is_terminal()) {
        step.leaf_terminal = true;
        step.raw_value = step.value = r.leaf.outcome().white_reward;
        step.leaf_features.values.assign(f.size(), 0.0);
        return step;
    }
    const auto phi = f(r.leaf);
    step.leaf_features = r.leaf.side_to_move() == Color::White ? phi : phi.negated();
    step.raw_value = game::sign_of(root.side_to_move()) * r.value;
    step.value = eval::squash(step.raw_value, squash);
    return step;
}

template <Game G>
struct PlayOptions {
    std::uint64_t seed = 0;
    int game_index = 0;
    std::optional<G> start;
    /// The first plies of the game are uniformly random.
    int opening_random_plies = 0;
    /// Seats whose searches are recorded into traces.
    bool record_white = false;
    bool record_black = false;
    eval::SquashConfig squash;
    /// Copied into every recorded step.
    bool opponent_rating_lower = false;
};

template <Game G>
struct MatchRecord {
    std::string white;
    std::string black;
    game::Outcome outcome;
    /// One trace per recorded seat, White's first.
    std::vector<learn::GameTrace> traces;
    int game_index = 0;
    G start;
    std::vector<typename G::Action> moves;
    std::array<std::uint64_t, 2> nodes{};  // leaves searched, per seat
    /// Set when an agent returned an illegal move; that agent lost.
    std::optional<std::string> fault;
};

/// Independent random stream for (seed, game, stream, salt).
inline std::mt19937_64 make_rng(std::uint64_t seed, int game_index, int stream, std::uint64_t salt = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(game_index), static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
}

template <Game G>
MatchRecord<G> play_game(const Agent<G>& white, const Agent<G>& black, const PlayOptions<G>& opts) {
    G s = opts.start.value_or(G::initial());
    MatchRecord<G> rec{white.id, black.id, game::Outcome::draw(), {}, opts.game_index, s, {}, {}, std::nullopt};

    const std::array<const Agent<G>*, 2> seats{&white, &black};
    const std::array<bool, 2> recorded{opts.record_white, opts.record_black};
    std::array<std::mt19937_64, 2> rngs{make_rng(opts.seed, opts.game_index, 1, white.seed),
                                        make_rng(opts.seed, opts.game_index, 2, black.seed)};
    auto opening_rng = make_rng(opts.seed, opts.game_index, 3);

    std::array<learn::GameTrace, 2> traces;
    traces[0].agent = Color::White;
    traces[1].agent = Color::Black;
    for (auto& t : traces) t.game_index = opts.game_index;

    // Second PV move of each seat's last recorded search, awaiting the reply.
    struct Pending {
        bool active = false;
        std::optional<typename G::Action> expected;
    };
    std::array<Pending, 2> pending;

    int ply = 0;
    while (!s.is_terminal()) {
        const int seat = s.side_to_move() == Color::White ? 0 : 1;
        const Agent<G>& agent = *seats[seat];
        typename G::Action action;
        std::optional<search::SearchResult<G>> result;
        if (ply < opts.opening_random_plies) {
            const auto moves = s.legal_actions();
            action = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(opening_rng)];
        } else {
            auto d = choose(agent, s, rngs[seat]);
            action = d.action;
            result = std::move(d.search);
        }
        if (result) rec.nodes[seat] += result->nodes;

        G next = s;
        try {
            next = s.apply(action);
        } catch (const game::IllegalMoveError& e) {
            rec.fault = agent.id + ": " + e.what();
            rec.outcome = seat == 0 ? game::Outcome::black_wins() : game::Outcome::white_wins();
            break;
        }

        if (recorded[seat] && result && agent.searches()) {
            auto step = make_step(ply, s, *result, *agent.features, opts.squash);
            step.opponent_rating_lower = opts.opponent_rating_lower;
            traces[seat].steps.push_back(std::move(step));
            pending[seat].active = true;
            pending[seat].expected = result->pv.size() >= 2 ? std::optional(result->pv[1]) : std::nullopt;
        }
        auto& theirs = pending[1 - seat];
        if (theirs.active) {
            traces[1 - seat].steps.back().opponent_move_predicted = theirs.expected && *theirs.expected == action;
            theirs.active = false;
        }

        rec.moves.push_back(action);
        s = std::move(next);
        ++ply;
    }
    if (!rec.fault) rec.outcome = s.outcome();

    for (int seat = 0; seat < 2; ++seat) {
        if (!recorded[seat]) continue;
        // The game ended on this seat's own move: nothing left to predict.
        if (pending[seat].active) traces[seat].steps.back().opponent_move_predicted = true;
        if (traces[seat].steps.empty()) continue;
        traces[seat].set_outcome(rec.outcome);
        rec.traces.push_back(std::move(traces[seat]));
    }
    return rec;
}

struct HeadToHead {
    double score = 0.0;  // (wins + draws / 2) / games, for agent a
    int wins = 0;
    int draws = 0;
    int losses = 0;
    int faults = 0;
};

template <Game G>
struct HeadToHeadOptions {
    std::uint64_t seed = 0;
    int opening_random_plies = 0;
    /// Start positions, cycled; empty means the initial position.
    std::vector<G> starts;
    unsigned threads = 1;
};

/// Agent a takes the side to move in the start position in even-numbered
/// games and the other side in odd-numbered ones. Games are independent,
/// so they may be spread over worker threads without changing the result.
template <Game G>
HeadToHead head_to_head(const Agent<G>& a, const Agent<G>& b, int games, const HeadToHeadOptions<G>& opts = {}) {
    if (games <= 0) return {};
    std::vector<double> a_reward(static_cast<std::size_t>(games));
    std::vector<char> faulted(static_cast<std::size_t>(games), 0);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < games; i = next++) {
            PlayOptions<G> po;
            po.seed = opts.seed;
            po.game_index = i;
            po.opening_random_plies = opts.opening_random_plies;
            G start = opts.starts.empty() ? G::initial() : opts.starts[static_cast<std::size_t>(i) % opts.starts.size()];
            const Color a_color = i % 2 == 0 ? start.side_to_move() : game::opposite(start.side_to_move());
            po.start = std::move(start);
            const auto rec = a_color == Color::White ? play_game(a, b, po) : play_game(b, a, po);
            a_reward[static_cast<std::size_t>(i)] = rec.outcome.for_side(a_color);
            faulted[static_cast<std::size_t>(i)] = rec.fault.has_value();
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(games)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }

    HeadToHead out;
    for (std::size_t i = 0; i < a_reward.size(); ++i) {
        const double r = a_reward[i];
        if (r > 0) ++out.wins;
        else if (r < 0) ++out.losses;
        else ++out.draws;
        out.faults += faulted[i];
    }
    out.score = (out.wins + 0.5 * out.draws) / games;
    return out;
}

}  // namespace tdleaf::arena
