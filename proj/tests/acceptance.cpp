// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Experiments are read from configs/ and
// write their runs under the build tree.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tdleaf/arena/match.hpp"
#include "tdleaf/cli/config.hpp"
#include "tdleaf/cli/runner.hpp"
#include "tdleaf/eval/features.hpp"
#include "tdleaf/game/connect4.hpp"
#include "tdleaf/game/minichess.hpp"
#include "tdleaf/game/synthetic_tree.hpp"
#include "tdleaf/game/tictactoe.hpp"
#include "tdleaf/learn/learner.hpp"
#include "tdleaf/search/search.hpp"
#include "search_oracle.hpp"

using namespace tdleaf;
namespace fs = std::filesystem;
using game::Color;
using game::Connect4;
using game::Minichess;
using game::SyntheticTree;
using game::TicTacToe;

namespace {

const fs::path kSourceDir = TDLEAF_SOURCE_DIR;
const fs::path kRunsDir = TDLEAF_ACCEPTANCE_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- PV-leaf identity bookkeeping ------------------------------------------

struct IdentityCount {
    long searches = 0;
    long mismatches = 0;
};

IdentityCount identity;

// The raw evaluation of the PV leaf, taken for the root player, must equal
// the value the search returned.
template <typename G, typename Eval>
void check_identity(const G& root, const search::SearchResult<G>& r, const Eval& raw) {
    double leaf;
    if (r.leaf.is_terminal()) {
        leaf = search::terminal_score(r.leaf, static_cast<int>(r.pv.size()));
    } else {
        leaf = raw(r.leaf);
    }
    if (r.leaf.side_to_move() != root.side_to_move()) leaf = -leaf;
    ++identity.searches;
    if (leaf != r.value) ++identity.mismatches;
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> w(k);
    for (auto& x : w) x = g(rng);
    return w;
}

// --- 1. search correctness -------------------------------------------------

Verdict search_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    int tree_bad = 0, c4_bad = 0;
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1000; ++i) {
        const auto tree = game::Tree::parse(oracle::random_tree(rng, 4));
        const SyntheticTree root(tree);
        const int depth = oracle::tree_depth(*tree);
        const double expected = oracle::tree_minimax(*tree, 0, 0, depth);
        const auto mm = search::minimax(root, depth, game::synthetic_eval);
        const auto ab = search::alphabeta(root, depth, game::synthetic_eval);
        const auto rt = search::alphabeta(root, depth, game::synthetic_eval,
                                          search::TieBreak::uniform_random(static_cast<std::uint64_t>(i)));
        if (mm.value != expected || ab.value != expected || rt.value != expected) ++tree_bad;
        for (const auto* r : {&mm, &ab, &rt}) check_identity(root, *r, game::synthetic_eval);
    }

    const eval::Features<Connect4> features;
    for (int i = 0; i < 500; ++i) {
        const auto root = oracle::random_position<Connect4>(rng);
        const eval::WeightVector w(random_weights(rng, features.size()));
        const eval::LinearEvaluator<Connect4> ev(features, w);
        const int depth = 1 + i % 4;
        const double sign = root.side_to_move() == Color::White ? 1.0 : -1.0;
        const double expected = sign * oracle::c4_minimax(root, depth, 0, ev);
        const auto mm = search::minimax(root, depth, ev);
        const auto ab = search::alphabeta(root, depth, ev);
        if (mm.value != expected || ab.value != expected) ++c4_bad;
        check_identity(root, mm, ev);
        check_identity(root, ab, ev);
    }
    const double secs = seconds_since(t0);
    return {tree_bad == 0 && c4_bad == 0 && secs < 60.0,
            "1000 trees (" + std::to_string(tree_bad) + " mismatches), 500 Connect-4 positions at depths 1-4 (" +
                std::to_string(c4_bad) + " mismatches), " + fmt(secs, 3) + " s"};
}

// --- 2. worked tree fixtures -----------------------------------------------

cli::RunConfig load(const std::string& name, const std::function<void(cli::json&)>& edit = {}) {
    auto doc = cli::JsonDocument::load(kSourceDir / "configs" / name);
    const auto out = kRunsDir / fs::path(name).stem();
    doc.override_value("out_dir", out.string());
    if (edit) edit(doc.root());
    return cli::parse_config(doc);
}

std::string run_dir(const std::string& name) { return (kRunsDir / fs::path(name).stem()).string(); }

Verdict tree_fixtures() {
    const auto checks = cli::verify_figures(load("verify_figures.json"));
    bool pass = checks.size() == 2;
    std::string detail;
    for (const auto& c : checks) {
        pass = pass && c.pass;
        if (!detail.empty()) detail += "; ";
        detail += c.line;
    }
    return {pass, detail};
}

// --- 3. PV-leaf identity ---------------------------------------------------

Verdict leaf_identity() {
    std::mt19937_64 rng(103);
    const eval::Features<Minichess> mf("full");
    for (int i = 0; i < 2000; ++i) {
        const auto root = oracle::random_position<Minichess>(rng);
        const eval::WeightVector w(random_weights(rng, mf.size()));
        const eval::LinearEvaluator<Minichess> ev(mf, w);
        const int depth = 1 + i % 3;
        check_identity(root, search::alphabeta(root, depth, ev), ev);
        check_identity(root, search::alphabeta(root, depth, ev, search::TieBreak::uniform_random(i)), ev);
    }
    const eval::Features<TicTacToe> tf;
    for (int i = 0; i < 1000; ++i) {
        const auto root = oracle::random_position<TicTacToe>(rng, 6);
        const eval::WeightVector w(random_weights(rng, tf.size()));
        const eval::LinearEvaluator<TicTacToe> ev(tf, w);
        const int depth = 1 + i % 9;
        check_identity(root, search::minimax(root, depth, ev), ev);
        check_identity(root, search::alphabeta(root, depth, ev, search::TieBreak::uniform_random(i)), ev);
    }
    const eval::Features<Connect4> cf;
    for (int i = 0; i < 1000; ++i) {
        const auto root = oracle::random_position<Connect4>(rng);
        const eval::WeightVector w(random_weights(rng, cf.size()));
        const eval::LinearEvaluator<Connect4> ev(cf, w);
        check_identity(root, search::alphabeta(root, 1 + i % 4, ev, search::TieBreak::uniform_random(i)), ev);
    }
    return {identity.searches >= 10000 && identity.mismatches == 0,
            std::to_string(identity.searches) + " searches, " + std::to_string(identity.mismatches) + " mismatches"};
}

// --- 4. gradient check -----------------------------------------------------

Verdict gradient_check() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> beta(0.05, 1.5);
    const double h = 1e-5;
    double worst_rel = 0.0, worst_abs = 0.0;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        const eval::FeatureVector phi{random_weights(rng, 8)};
        const auto w0 = random_weights(rng, 8, 0.3);
        const eval::SquashConfig cfg{beta(rng), true};
        const auto g = eval::grad_squashed(phi, eval::WeightVector(w0), cfg);
        for (std::size_t j = 0; j < w0.size(); ++j) {
            auto up = w0, down = w0;
            up[j] += h;
            down[j] -= h;
            const double fd = (eval::squash(eval::raw_eval(phi, eval::WeightVector(up)), cfg) -
                               eval::squash(eval::raw_eval(phi, eval::WeightVector(down)), cfg)) /
                              (2 * h);
            const double err = std::abs(g[j] - fd);
            if (std::abs(fd) < 1e-3) {
                worst_abs = std::max(worst_abs, err);
                if (err >= 1e-9) ++bad;
            } else {
                worst_rel = std::max(worst_rel, err / std::abs(fd));
                if (err / std::abs(fd) >= 1e-6) ++bad;
            }
        }
    }
    return {bad == 0, "100 instances, max relative error " + fmt(worst_rel, 3) + ", max absolute error near zero " +
                          fmt(worst_abs, 3)};
}

// --- 5. reductions ---------------------------------------------------------

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// A Connect-4 game where the agent searches to depth 0 on its turns and
// both sides move at random.
struct DepthZeroGame {
    learn::GameTrace trace;
    std::vector<eval::FeatureVector> roots;
    std::vector<learn::StepFlags> flags;
};

DepthZeroGame depth_zero_game(std::mt19937_64& rng, const eval::Features<Connect4>& f, const eval::WeightVector& w,
                              const eval::SquashConfig& squash, Color agent) {
    DepthZeroGame out;
    out.trace.agent = agent;
    const eval::LinearEvaluator<Connect4> ev(f, w);
    Connect4 s;
    while (!s.is_terminal()) {
        if (s.side_to_move() == agent) {
            auto st = arena::make_step(s.ply(), s, search::alphabeta(s, 0, ev), f, squash);
            st.opponent_move_predicted = std::bernoulli_distribution(0.5)(rng);
            out.flags.push_back({st.opponent_move_predicted, false});
            out.trace.steps.push_back(st);
            out.roots.push_back(f(s));
        }
        const auto moves = s.legal_actions();
        s = s.apply(moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)]);
    }
    out.trace.set_outcome(s.outcome());
    return out;
}

// A trace of n PV leaves with random features; recorded values match w.
struct RandomTrace {
    learn::GameTrace trace;
    std::vector<eval::FeatureVector> agent_phi;  // agent frame
    double reward = 0.0;
};

RandomTrace random_trace(std::mt19937_64& rng, const eval::WeightVector& w, const eval::SquashConfig& squash,
                         std::size_t n) {
    RandomTrace out;
    out.trace.agent = rng() % 2 ? Color::Black : Color::White;
    const double sign = game::sign_of(out.trace.agent);
    for (std::size_t t = 0; t < n; ++t) {
        learn::StepRecord st;
        st.leaf_features.values = random_weights(rng, w.size());
        st.raw_value = eval::raw_eval(st.leaf_features, w);
        st.value = eval::squash(st.raw_value, squash);
        out.agent_phi.push_back(sign > 0 ? st.leaf_features : st.leaf_features.negated());
        out.trace.steps.push_back(st);
    }
    const int r = std::uniform_int_distribution<int>(-1, 1)(rng);
    out.trace.set_outcome(game::Outcome{static_cast<double>(r)});
    out.reward = out.trace.outcome->for_side(out.trace.agent);
    return out;
}

Verdict reductions() {
    std::mt19937_64 rng(105);
    const eval::Features<Connect4> f;
    int bitwise_bad = 0;
    for (int i = 0; i < 300; ++i) {
        const auto wv = random_weights(rng, f.size(), 0.3);
        const eval::WeightVector w(wv, {{0, wv[0]}});
        learn::LearnerConfig cfg;
        cfg.lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        cfg.alpha.value = 0.1;
        cfg.squash = eval::SquashConfig::calibrated(2.0);
        cfg.clipping = static_cast<learn::Clipping>(i % 3);
        const auto agent = i % 2 ? Color::Black : Color::White;
        const auto g = depth_zero_game(rng, f, w, cfg.squash, agent);
        const auto leaf = learn::tdleaf_delta(g.trace, cfg, w);
        const auto td = learn::td_update(g.roots, g.flags, g.trace.outcome->for_side(agent), cfg, w);
        if (!same_bits(leaf, td)) ++bitwise_bad;
    }

    // Closed forms in the agent frame: with lambda = 1 the update is
    // alpha * sum_t grad v_t (r - v_t); with lambda = 0 it is
    // alpha * sum_t grad v_t (v_{t+1} - v_t) with v_N = r.
    double err1 = 0.0, err0 = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 6, n = 2 + static_cast<std::size_t>(i % 40);
        const eval::WeightVector w(random_weights(rng, k, 0.2));
        const eval::SquashConfig squash{std::uniform_real_distribution<double>(0.1, 1.0)(rng), true};
        const auto rt = random_trace(rng, w, squash, n);
        std::vector<double> v(n);
        for (std::size_t t = 0; t < n; ++t) v[t] = std::tanh(squash.beta * eval::raw_eval(rt.agent_phi[t], w));
        for (double lambda : {1.0, 0.0}) {
            learn::LearnerConfig cfg;
            cfg.lambda = lambda;
            cfg.alpha.value = 0.5;
            cfg.squash = squash;
            cfg.clipping = learn::Clipping::None;
            const auto delta = learn::tdleaf_delta(rt.trace, cfg, w);
            for (std::size_t j = 0; j < k; ++j) {
                double expected = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    const double target = lambda == 1.0 ? rt.reward : (t + 1 < n ? v[t + 1] : rt.reward);
                    expected += 0.5 * squash.beta * (1 - v[t] * v[t]) * rt.agent_phi[t][j] * (target - v[t]);
                }
                double& worst = lambda == 1.0 ? err1 : err0;
                worst = std::max(worst, std::abs(delta[j] - expected));
            }
        }
    }
    return {bitwise_bad == 0 && err1 < 1e-10 && err0 < 1e-12,
            "(a) depth-0 TDLeaf vs TD on 300 games: " + std::to_string(bitwise_bad) +
                " differ bitwise; (b) lambda=1 max error " + fmt(err1, 3) + "; (c) lambda=0 max error " + fmt(err0, 3)};
}

// --- 6. worked update ------------------------------------------------------

Verdict worked_update() {
    learn::GameTrace t;
    for (auto phi : {std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}}) {
        learn::StepRecord s;
        s.leaf_features.values = phi;
        t.steps.push_back(s);
    }
    t.set_outcome(game::Outcome::white_wins());
    learn::LearnerConfig cfg;
    cfg.lambda = 0.7;
    cfg.alpha.value = 1.0;
    cfg.squash = eval::SquashConfig::identity();
    cfg.clipping = learn::Clipping::None;
    const auto d = learn::tdleaf_delta(t, cfg, eval::WeightVector({0.0, 0.0}));
    return {d == std::vector<double>{0.7, 1.0}, "delta w = (" + fmt(d[0], 17) + ", " + fmt(d[1], 17) + ")"};
}

// --- 7-9. learning experiments ---------------------------------------------

double head_to_head(const std::string& name, const std::map<std::string, std::string>& weight_files) {
    const auto cfg = load(name, [&](cli::json& root) {
        for (const auto& [seat, file] : weight_files) root["agents"][seat]["weights_file"] = file;
    });
    const auto r = cli::run_head_to_head(cfg);
    std::cout << "  " << name << ": score " << fmt(r.score) << " (" << r.wins << " wins, " << r.draws << " draws, "
              << r.losses << " losses)\n";
    return r.score;
}

std::string final_snapshot(const std::string& config) {
    return (fs::path(run_dir(config)) / "weights_final.snapshot").string();
}

Verdict online_learning() {
    const auto t0 = std::chrono::steady_clock::now();
    const double before = head_to_head("c4_eval_before.json", {});
    cli::run_training(load("c4_online.json"));
    const double after = head_to_head("c4_eval_after.json", {{"a", final_snapshot("c4_online.json")}});
    const double secs = seconds_since(t0);
    return {before <= 0.45 && after >= 0.55 && secs < 900.0,
            "score vs hand-set baseline " + fmt(before) + " before (need <= 0.45), " + fmt(after) +
                " after 1000 games (need >= 0.55), " + fmt(secs, 3) + " s"};
}

Verdict selfplay_deficiency() {
    cli::run_training(load("c4_selfplay.json"));
    const double s = head_to_head("c4_selfplay_vs_online.json", {{"a", final_snapshot("c4_selfplay.json")},
                                                                 {"b", final_snapshot("c4_online.json")}});
    return {s < 0.5, "self-play agent scores " + fmt(s) + " against the on-line agent (need < 0.5)"};
}

Verdict material_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = cli::run_training(load("minichess_material_selfplay.json"));
    const auto& names = summary.final_weights.names;
    const auto& w = summary.final_weights.weights;
    auto v = [&](const char* n) { return w[eval::feature_index(names, n)]; };
    const double p = v("pawn"), n = v("knight"), b = v("bishop"), r = v("rook"), q = v("queen");
    const bool pass = p < n && p < b && n < r && b < r && r < q && seconds_since(t0) < 1800.0;
    return {pass, "after " + std::to_string(summary.rows.size()) + " games: pawn " + fmt(p) + ", knight " + fmt(n) +
                      ", bishop " + fmt(b) + ", rook " + fmt(r) + ", queen " + fmt(q) +
                      " (need pawn < knight, pawn < bishop, knight and bishop < rook < queen)"};
}

// --- 10. determinism -------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Compares ratings.csv and every snapshot of two run directories byte for
// byte; returns the number of files compared, or -1 on a difference.
int compare_runs(const fs::path& a, const fs::path& b) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a)) names_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names_b.insert(e.path().filename().string());
    if (names_a != names_b) return -1;
    int compared = 0;
    for (const auto& n : names_a) {
        if (n != "ratings.csv" && fs::path(n).extension() != ".snapshot") continue;
        if (slurp(a / n) != slurp(b / n)) return -1;
        ++compared;
    }
    return compared;
}

cli::ReplaySummary replay(const std::string& dir) {
    const cli::json j = {{"mode", "replay"}, {"run_dir", dir}};
    return cli::run_replay(cli::parse_config(cli::JsonDocument::parse(j.dump(), "<replay>")));
}

Verdict determinism() {
    std::string detail;
    bool pass = true;
    for (const std::string config : {"c4_determinism.json", "c4_online.json"}) {
        if (config == "c4_determinism.json") cli::run_training(load(config));
        const auto again = kRunsDir / (fs::path(config).stem().string() + "_repeat");
        cli::run_training(load(config, [&](cli::json& root) { root["out_dir"] = again.string(); }));
        const int files = compare_runs(run_dir(config), again);
        const auto rep = replay(run_dir(config));
        pass = pass && files > 0 && rep.pass;
        detail += (detail.empty() ? "" : "; ") + fs::path(config).stem().string() + ": " +
                  (files > 0 ? std::to_string(files) + " files identical on rerun" : "rerun differs") + ", replay " +
                  (rep.pass ? "reproduced " + std::to_string(rep.snapshots_checked) + " snapshots" : "FAILED");
    }
    return {pass, detail};
}

}  // namespace

int main() {
    fs::remove_all(kRunsDir);
    fs::create_directories(kRunsDir);
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"search correctness", search_correctness},
        {"worked tree fixtures", tree_fixtures},
        {"PV-leaf identity", leaf_identity},
        {"gradient check", gradient_check},
        {"reduction properties", reductions},
        {"worked update", worked_update},
        {"on-line learning", online_learning},
        {"self-play deficiency", selfplay_deficiency},
        {"material ordering", material_ordering},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        if (!v.pass) ++failed;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
                  << "): " << v.detail << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
