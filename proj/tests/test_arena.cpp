#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "tdleaf/arena/elo.hpp"
#include "tdleaf/arena/match.hpp"
#include "tdleaf/arena/trace_log.hpp"
#include "tdleaf/arena/training.hpp"
#include "tdleaf/game/connect4.hpp"
#include "tdleaf/game/minichess.hpp"
#include "tdleaf/game/tictactoe.hpp"

using namespace tdleaf;
using arena::Agent;
using game::Color;
using game::Connect4;
using game::Outcome;
using game::TicTacToe;

namespace {

std::shared_ptr<const eval::Features<Connect4>> c4_features() {
    static const auto f = std::make_shared<const eval::Features<Connect4>>();
    return f;
}

// three, two, one, center, inner, immediate, odd, even, stacked, edge
eval::WeightVector c4_hand_weights() {
    return eval::WeightVector({1.0, 0.3, 0.05, 0.3, 0.1, 2.0, 0.6, 0.3, 1.0, -0.1}, {{0, 1.0}});
}

eval::WeightVector c4_zero_weights() {
    std::vector<double> w(10, 0.0);
    w[0] = 1.0;
    return eval::WeightVector(w, {{0, 1.0}});
}

learn::LearnerConfig c4_learner() {
    learn::LearnerConfig cfg;
    cfg.lambda = 0.7;
    cfg.alpha.value = 0.5;
    cfg.squash = eval::SquashConfig::calibrated(1.0);
    return cfg;
}

arena::PoolConfig<Connect4> c4_pool() {
    arena::PoolConfig<Connect4> pool;
    pool.opponents.push_back(Agent<Connect4>::random("random", 1));
    for (int d = 1; d <= 2; ++d)
        pool.opponents.push_back(
            Agent<Connect4>::fixed("fixed-d" + std::to_string(d), d, c4_hand_weights(), c4_features(), true, 10 + d));
    return pool;
}

}  // namespace

TEST(Elo, Examples) {
    arena::RatingTable t;
    t.add("a");
    t.add("b");
    t.record("a", "b", Outcome::draw());
    EXPECT_EQ(t.rating("a"), 1500.0);
    t.record("a", "b", Outcome::white_wins());
    EXPECT_EQ(t.rating("a"), 1516.0);
    EXPECT_EQ(t.rating("b"), 1484.0);

    arena::RatingTable u;
    u.add("low", 1100.0);
    u.add("high", 1500.0);
    u = arena::elo_update(u, "high", "low", Outcome::black_wins());
    EXPECT_NEAR(u.rating("low") - 1100.0, 32.0 * (1.0 - 1.0 / 11.0), 1e-12);
    EXPECT_NEAR(u.rating("high") - 1500.0, -32.0 * (1.0 - 1.0 / 11.0), 1e-12);
    EXPECT_THROW(u.record("low", "nobody", Outcome::draw()), arena::UnknownAgentError);
    EXPECT_THROW((void)u.rating("nobody"), arena::UnknownAgentError);
}

TEST(Elo, ZeroSumUnderRandomGames) {
    std::mt19937_64 rng(61);
    arena::RatingTable t(24.0);
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    for (const auto& id : ids) t.add(id, std::uniform_real_distribution<double>(1000, 2000)(rng));
    for (int i = 0; i < 5000; ++i) {
        const auto& w = ids[rng() % 4];
        const auto& b = ids[rng() % 4];
        double before = 0, after = 0;
        for (const auto& [id, r] : t.all()) before += r;
        t.record(w, b, Outcome{static_cast<double>(std::uniform_int_distribution<int>(-1, 1)(rng))});
        for (const auto& [id, r] : t.all()) after += r;
        EXPECT_NEAR(after, before, 1e-9);
        for (const auto& [id, r] : t.all()) EXPECT_TRUE(std::isfinite(r));
    }
    EXPECT_EQ(arena::expected_score(1500, 1500), 0.5);
}

TEST(PlayGame, RandomAgentsAreReproducible) {
    const auto a = Agent<TicTacToe>::random("a", 1), b = Agent<TicTacToe>::random("b", 2);
    std::set<std::string> games;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        arena::PlayOptions<TicTacToe> po;
        po.seed = seed;
        const auto r1 = arena::play_game(a, b, po), r2 = arena::play_game(a, b, po);
        EXPECT_EQ(r1.moves, r2.moves);
        EXPECT_EQ(r1.outcome, r2.outcome);
        EXPECT_EQ(game::replay<TicTacToe>(r1.moves).outcome(), r1.outcome);
        games.insert(arena::join_tokens(arena::move_tokens<TicTacToe>(r1.moves)));
    }
    EXPECT_GT(games.size(), 15u);
}

TEST(PlayGame, PerfectTicTacToeIsDrawn) {
    const auto f = std::make_shared<const eval::Features<TicTacToe>>();
    const eval::WeightVector zero(std::vector<double>(10, 0.0));
    const auto a = Agent<TicTacToe>::search("a", 9, zero, f, true, 1);
    const auto b = Agent<TicTacToe>::search("b", 9, zero, f, true, 2);
    const auto h = arena::head_to_head(a, b, 6, arena::HeadToHeadOptions<TicTacToe>{5, 0, {}, 1});
    EXPECT_EQ(h.draws, 6);
}

TEST(PlayGame, Connect4DepthTwoBeatsRandom) {
    const auto searcher = Agent<Connect4>::search("d2", 2, c4_hand_weights(), c4_features(), true, 3);
    const auto random = Agent<Connect4>::random("random", 4);
    const auto h = arena::head_to_head(searcher, random, 200, arena::HeadToHeadOptions<Connect4>{7, 0, {}, 2});
    EXPECT_GT(static_cast<double>(h.wins) / 200.0, 0.9);
}

TEST(PlayGame, RecordsTracesAndPredictions) {
    const auto a = Agent<Connect4>::search("a", 2, c4_hand_weights(), c4_features(), false);
    const auto b = Agent<Connect4>::search("b", 2, c4_hand_weights(), c4_features(), false);
    arena::PlayOptions<Connect4> po;
    po.record_white = true;
    po.squash = eval::SquashConfig::calibrated(1.0);
    const auto rec = arena::play_game(a, b, po);
    ASSERT_EQ(rec.traces.size(), 1u);
    const auto& t = rec.traces[0];
    EXPECT_EQ(t.outcome, rec.outcome);
    EXPECT_EQ(t.agent, Color::White);
    EXPECT_EQ(t.steps.size(), (rec.moves.size() + 1) / 2);
    // Identical deterministic agents: every reply matches the searcher's
    // expectation exactly when the reply equals pv[1].
    std::vector<Connect4> positions{Connect4::initial()};
    for (int m : rec.moves) positions.push_back(positions.back().apply(m));
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        EXPECT_EQ(s.ply, static_cast<int>(2 * i));
        EXPECT_EQ(s.root_hash, positions[2 * i].hash());
        if (s.leaf_terminal) {
            EXPECT_EQ(std::abs(s.value), 1.0);
        } else {
            EXPECT_GT(s.value, -1.0);
            EXPECT_LT(s.value, 1.0);
        }
        const std::size_t reply = 2 * i + 1;
        if (reply < rec.moves.size()) {
            EXPECT_EQ(s.opponent_move_predicted, s.pv.size() > 1 && s.pv[1] == Connect4::action_to_string(rec.moves[reply]));
        } else {
            EXPECT_TRUE(s.opponent_move_predicted);
        }
    }
}

TEST(PlayGame, IllegalMoveIsAFaultAndALoss) {
    const auto cheat = Agent<TicTacToe>::scripted("cheat", std::vector<int>(9, 4));
    const auto honest = Agent<TicTacToe>::random("honest", 1);
    arena::PlayOptions<TicTacToe> po;
    const auto rec = arena::play_game(cheat, honest, po);
    ASSERT_TRUE(rec.fault.has_value());
    EXPECT_NE(rec.fault->find("cheat"), std::string::npos);
    EXPECT_EQ(rec.outcome, Outcome::black_wins());
    const auto h = arena::head_to_head(honest, cheat, 2);
    EXPECT_EQ(h.faults, 2);
    EXPECT_EQ(h.score, 1.0);
}

TEST(HeadToHead, WinningInOneSuite) {
    std::mt19937_64 rng(62);
    std::vector<Connect4> suite;
    while (suite.size() < 50) {
        Connect4 s;
        for (int n = std::uniform_int_distribution<int>(6, 30)(rng); n > 0; --n) {
            const auto moves = s.legal_actions();
            const auto next = s.apply(moves[rng() % moves.size()]);
            if (next.is_terminal()) break;
            s = next;
        }
        const auto moves = s.legal_actions();
        const bool wins_now = std::any_of(moves.begin(), moves.end(), [&](int m) {
            const auto t = s.apply(m);
            return t.is_terminal() && t.outcome().for_side(s.side_to_move()) > 0;
        });
        if (wins_now) suite.push_back(s);
    }
    const auto searcher = Agent<Connect4>::search("d1", 1, c4_zero_weights(), c4_features(), true, 5);
    const auto random = Agent<Connect4>::random("random", 6);
    for (const auto& s : suite) {
        const auto h = arena::head_to_head(searcher, random, 1, arena::HeadToHeadOptions<Connect4>{9, 0, {s}, 1});
        EXPECT_EQ(h.score, 1.0) << s.to_string();
    }
}

TEST(HeadToHead, IdenticalAgentsSplitEvenly) {
    const auto a = Agent<Connect4>::fixed("a", 2, c4_hand_weights(), c4_features(), false);
    const auto b = Agent<Connect4>::fixed("b", 2, c4_hand_weights(), c4_features(), false);
    const auto h = arena::head_to_head(a, b, 10);
    EXPECT_EQ(h.score, 0.5);
}

TEST(HeadToHead, ThreadCountDoesNotChangeResults) {
    const auto a = Agent<Connect4>::fixed("a", 2, c4_hand_weights(), c4_features(), true, 1);
    const auto b = Agent<Connect4>::random("b", 2);
    const auto one = arena::head_to_head(a, b, 40, arena::HeadToHeadOptions<Connect4>{3, 2, {}, 1});
    const auto four = arena::head_to_head(a, b, 40, arena::HeadToHeadOptions<Connect4>{3, 2, {}, 4});
    EXPECT_EQ(one.wins, four.wins);
    EXPECT_EQ(one.draws, four.draws);
    EXPECT_EQ(one.score, four.score);
}

TEST(Training, ZeroGamesLeavesWeightsAlone) {
    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.games = 0;
    const auto run = arena::train_online(c4_pool(), opts, c4_zero_weights(), c4_features());
    EXPECT_EQ(run.final_weights.weights, c4_zero_weights());
    EXPECT_TRUE(run.rows.empty());
    const auto self = arena::train_selfplay(opts, c4_zero_weights(), c4_features());
    EXPECT_EQ(self.final_weights.weights, c4_zero_weights());
}

TEST(Training, OnlineRunIsDeterministicAndReplayable) {
    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.games = 12;
    opts.seed = 99;
    opts.search_depth = 2;
    opts.snapshot_every = 4;
    auto pool = c4_pool();
    pool.matching = arena::Matching::NearestRating;
    const auto r1 = arena::train_online(pool, opts, c4_zero_weights(), c4_features());
    const auto r2 = arena::train_online(pool, opts, c4_zero_weights(), c4_features());
    std::ostringstream csv1, csv2;
    arena::write_ratings_csv(csv1, r1.rows);
    arena::write_ratings_csv(csv2, r2.rows);
    EXPECT_EQ(csv1.str(), csv2.str());
    EXPECT_EQ(r1.trace_log, r2.trace_log);
    EXPECT_EQ(eval::snapshot_text(r1.final_weights), eval::snapshot_text(r2.final_weights));
    EXPECT_NE(r1.final_weights.weights, c4_zero_weights());
    EXPECT_EQ(r1.final_weights.weights[0], 1.0);
    ASSERT_EQ(r1.snapshots.size(), 3u);
    for (std::size_t i = 0; i < r1.rows.size(); ++i) EXPECT_EQ(r1.rows[i].color, i % 2 ? Color::Black : Color::White);

    std::istringstream log(r1.trace_log);
    const auto entries = arena::read_trace_log(log);
    const auto replay = arena::replay_traces<Connect4>(entries, opts.learner, c4_zero_weights(), *c4_features());
    EXPECT_TRUE(replay.mismatches.empty()) << replay.mismatches.front();
    EXPECT_EQ(replay.final_weights, r1.final_weights.weights);
    for (const auto& [played, w] : r1.snapshots) EXPECT_EQ(replay.after_games(played, c4_zero_weights()), w);

    opts.seed = 100;
    const auto r3 = arena::train_online(pool, opts, c4_zero_weights(), c4_features());
    std::ostringstream csv3;
    arena::write_ratings_csv(csv3, r3.rows);
    EXPECT_NE(csv3.str(), csv1.str());
}

TEST(Training, BatchedUpdatesReplay) {
    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.learner.update_every_n_games = 4;
    opts.games = 10;
    opts.seed = 5;
    opts.search_depth = 1;
    const auto run = arena::train_online(c4_pool(), opts, c4_zero_weights(), c4_features());
    std::istringstream log(run.trace_log);
    const auto entries = arena::read_trace_log(log);
    int updates = 0;
    for (const auto& e : entries) updates += e.kind == arena::TraceLogEntry::Kind::Update;
    EXPECT_EQ(updates, 3);  // after games 3, 7 and the final game 9
    const auto replay = arena::replay_traces<Connect4>(entries, opts.learner, c4_zero_weights(), *c4_features());
    EXPECT_TRUE(replay.mismatches.empty());
    EXPECT_EQ(replay.final_weights, run.final_weights.weights);
}

TEST(Training, TamperedLogIsDetected) {
    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.games = 2;
    opts.search_depth = 1;
    const auto run = arena::train_online(c4_pool(), opts, c4_zero_weights(), c4_features());
    std::string text = run.trace_log;
    const auto pos = text.find("\nstep 0 ");
    ASSERT_NE(pos, std::string::npos);
    const auto line_end = text.find('\n', pos + 1);
    std::istringstream line(text.substr(pos + 1, line_end - pos - 1));
    std::vector<std::string> f;
    for (std::string tok; line >> tok;) f.push_back(tok);
    f[4] = "0.123";
    std::string rebuilt;
    for (const auto& tok : f) rebuilt += (rebuilt.empty() ? "" : " ") + tok;
    text.replace(pos + 1, line_end - pos - 1, rebuilt);
    std::istringstream log(text);
    const auto replay =
        arena::replay_traces<Connect4>(arena::read_trace_log(log), opts.learner, c4_zero_weights(), *c4_features());
    EXPECT_FALSE(replay.mismatches.empty());

    std::istringstream broken("# tdleaf-trace v1 game=connect4\ngame 0 agent=x color=white white=x black=y moves=3\n");
    EXPECT_THROW((void)arena::read_trace_log(broken), arena::TraceLogError);
    std::istringstream junk("nonsense\n");
    EXPECT_THROW((void)arena::read_trace_log(junk), arena::TraceLogError);
}

TEST(Training, SelfPlayWithoutExplorationRepeatsItself) {
    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.learner.update_every_n_games = 100;
    opts.games = 100;
    opts.search_depth = 2;
    opts.random_ties = false;
    const auto frozen = arena::train_selfplay(opts, c4_hand_weights(), c4_features());
    EXPECT_EQ(std::set<std::string>(frozen.move_lists.begin(), frozen.move_lists.end()).size(), 1u);

    opts.learner.update_every_n_games = 1;
    const auto plain = arena::train_selfplay(opts, c4_hand_weights(), c4_features());
    opts.random_ties = true;
    const auto explore = arena::train_selfplay(opts, c4_hand_weights(), c4_features());
    const auto distinct_plain = std::set<std::string>(plain.move_lists.begin(), plain.move_lists.end()).size();
    const auto distinct_explore = std::set<std::string>(explore.move_lists.begin(), explore.move_lists.end()).size();
    EXPECT_GT(distinct_explore, distinct_plain);
    for (const auto& row : explore.rows) EXPECT_EQ(row.agent_rating, 1500.0);

    std::istringstream log(explore.trace_log);
    const auto replay = arena::replay_traces<Connect4>(arena::read_trace_log(log), opts.learner, c4_hand_weights(),
                                                       *c4_features());
    EXPECT_TRUE(replay.mismatches.empty());
    EXPECT_EQ(replay.final_weights, explore.final_weights.weights);
}

TEST(Training, MateriallyEqualOrderingChangesAfterOneUpdate) {
    // Positions at equal ply whose anchored feature is zero: with the other
    // weights zero they all evaluate the same.
    const auto f = c4_features();
    std::mt19937_64 rng(63);
    std::vector<Connect4> suite;
    while (suite.size() < 30) {
        Connect4 s;
        bool ok = true;
        for (int n = 0; n < 8 && ok; ++n) {
            const auto moves = s.legal_actions();
            s = s.apply(moves[rng() % moves.size()]);
            ok = !s.is_terminal();
        }
        if (ok && (*f)(s)[0] == 0.0) suite.push_back(s);
    }
    auto evaluations = [&](const eval::WeightVector& w) {
        std::vector<double> out;
        for (const auto& s : suite) out.push_back(eval::raw_eval((*f)(s), w));
        return out;
    };
    const auto before = evaluations(c4_zero_weights());
    EXPECT_EQ(std::set<double>(before.begin(), before.end()).size(), 1u);

    arena::TrainingOptions opts;
    opts.learner = c4_learner();
    opts.learner.clipping = learn::Clipping::None;
    opts.games = 1;
    opts.search_depth = 2;
    const auto run = arena::train_online(c4_pool(), opts, c4_zero_weights(), f);
    const auto after = evaluations(run.final_weights.weights);
    EXPECT_GT(std::set<double>(after.begin(), after.end()).size(), 1u);
}
