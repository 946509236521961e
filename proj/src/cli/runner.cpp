#include "tdleaf/cli/runner.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tdleaf/game/connect4.hpp"
#include "tdleaf/game/minichess.hpp"
#include "tdleaf/game/synthetic_tree.hpp"
#include "tdleaf/game/tictactoe.hpp"

namespace tdleaf::cli {

namespace fs = std::filesystem;
using arena::Agent;

namespace {

template <typename F>
decltype(auto) with_game(const std::string& game, F&& f) {
    if (game == "tictactoe") return f.template operator()<game::TicTacToe>();
    if (game == "connect4") return f.template operator()<game::Connect4>();
    if (game == "minichess") return f.template operator()<game::Minichess>();
    throw std::invalid_argument("game '" + game + "' cannot be played");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

std::string snapshot_name(int games_played) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "weights_game_%06d.snapshot", games_played);
    return buf;
}

eval::WeightVector weights_from_map(const std::vector<std::string>& names, const std::map<std::string, double>& values,
                                    const std::map<std::string, double>& anchors) {
    std::vector<double> w(names.size(), 0.0);
    std::vector<eval::Anchor> pinned;
    for (const auto& [name, v] : values) w[eval::feature_index(names, name)] = v;
    for (const auto& [name, v] : anchors) pinned.push_back({eval::feature_index(names, name), v});
    return eval::WeightVector(std::move(w), std::move(pinned));
}

eval::Snapshot load_snapshot(const fs::path& path) {
    std::istringstream in(read_file(path));
    try {
        return eval::read_snapshot(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string(), 0, e.what());
    }
}

template <game::Game G>
Agent<G> make_agent(const AgentSpec& spec, const std::shared_ptr<const eval::Features<G>>& features) {
    if (spec.kind == "random") return Agent<G>::random(spec.id, spec.seed);
    eval::WeightVector w;
    if (!spec.weights_file.empty()) {
        auto snap = load_snapshot(spec.weights_file);
        if (snap.game != G::kName || snap.names != features->names())
            throw ConfigError(spec.weights_file.string(), 0,
                              "weights do not match game " + std::string(G::kName) + " and its feature set");
        w = std::move(snap.weights);
    } else {
        w = weights_from_map(features->names(), spec.weights, {});
    }
    if (spec.kind == "fixed") return Agent<G>::fixed(spec.id, spec.depth, std::move(w), features, spec.random_ties, spec.seed);
    return Agent<G>::search(spec.id, spec.depth, std::move(w), features, spec.random_ties, spec.seed);
}

arena::TrainingOptions training_options(const RunConfig& c) {
    arena::TrainingOptions o;
    o.learner = c.learner;
    o.games = c.games;
    o.seed = c.seed;
    o.search_depth = c.search_depth;
    o.random_ties = c.random_ties;
    o.opening_random_plies = c.opening_random_plies;
    o.k_factor = c.k_factor;
    o.snapshot_every = c.snapshot_every;
    o.record_both_seats = c.record_both_seats;
    o.learner_id = c.learner_id;
    o.learner_rating = c.learner_rating;
    return o;
}

template <game::Game G>
eval::WeightVector initial_weights(const RunConfig& c, const eval::Features<G>& f) {
    return weights_from_map(f.names(), c.initial_weights, c.anchors);
}

std::string weights_line(const eval::Snapshot& s) {
    std::string out;
    for (std::size_t i = 0; i < s.names.size(); ++i)
        out += (i ? " " : "") + s.names[i] + "=" + eval::format_double(s.weights[i]);
    return out;
}

}  // namespace

TrainingSummary run_training(const RunConfig& c) {
    return with_game(c.game, [&]<typename G>() {
        ensure_dir(c.out_dir);
        const auto features = std::make_shared<const eval::Features<G>>(c.features);
        const auto opts = training_options(c);
        arena::RunArtifact run;
        if (c.mode == "train-online") {
            arena::PoolConfig<G> pool;
            pool.matching = arena::parse_matching(c.matching);
            for (const auto& spec : c.opponents) {
                pool.opponents.push_back(make_agent<G>(spec, features));
                pool.ratings.push_back(spec.rating.value_or(arena::RatingTable::kInitialRating));
            }
            run = arena::train_online(pool, opts, initial_weights(c, *features), features);
        } else {
            run = arena::train_selfplay(opts, initial_weights(c, *features), features);
        }

        write_file(c.out_dir / "config.json", c.source.dump(2) + "\n");
        std::ostringstream csv;
        arena::write_ratings_csv(csv, run.rows);
        write_file(c.out_dir / "ratings.csv", csv.str());
        write_file(c.out_dir / "traces.log", run.trace_log);
        write_file(c.out_dir / "weights_final.snapshot", eval::snapshot_text(run.final_weights));
        for (const auto& [played, w] : run.snapshots)
            write_file(c.out_dir / snapshot_name(played), eval::snapshot_text({run.final_weights.game, run.final_weights.names, w}));
        return TrainingSummary{std::move(run.final_weights), std::move(run.rows), c.out_dir};
    });
}

arena::HeadToHead run_head_to_head(const RunConfig& c) {
    return with_game(c.game, [&]<typename G>() {
        const auto features = std::make_shared<const eval::Features<G>>(c.features);
        const auto a = make_agent<G>(c.agent_a, features);
        const auto b = make_agent<G>(c.agent_b, features);
        arena::HeadToHeadOptions<G> opts;
        opts.seed = c.seed;
        opts.opening_random_plies = c.opening_random_plies;
        opts.threads = c.threads;
        return arena::head_to_head(a, b, c.games, opts);
    });
}

ReplaySummary run_replay(const RunConfig& c) {
    const RunConfig run = load_config(c.run_dir / "config.json");
    if (run.mode != "train-online" && run.mode != "train-selfplay")
        throw ConfigError((c.run_dir / "config.json").string(), 0, "not a training run");
    if (!c.game.empty() && c.game != run.game)
        throw ConfigError(c.source_name, 0, "run directory holds a " + run.game + " run");

    return with_game(run.game, [&]<typename G>() {
        const eval::Features<G> features(run.features);
        std::istringstream log(read_file(c.run_dir / "traces.log"));
        const auto entries = arena::read_trace_log(log);
        const auto initial = initial_weights(run, features);
        const auto result = arena::replay_traces<G>(entries, run.learner, initial, features);

        ReplaySummary out;
        out.updates = static_cast<int>(result.updates.size());
        out.problems = result.mismatches;
        auto compare = [&](const fs::path& file, const eval::WeightVector& w) {
            const auto stored = load_snapshot(file);
            const eval::Snapshot mine{std::string(G::kName), features.names(), w};
            if (eval::snapshot_text(stored) != eval::snapshot_text(mine))
                out.problems.push_back(file.filename().string() + " differs from the replayed weights");
            ++out.snapshots_checked;
        };
        compare(c.run_dir / "weights_final.snapshot", result.final_weights);
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(c.run_dir)) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& p : files) {
            const std::string name = p.filename().string();
            int played = 0;
            if (std::sscanf(name.c_str(), "weights_game_%d.snapshot", &played) == 1 && name == snapshot_name(played))
                compare(p, result.after_games(played, initial));
        }
        out.pass = out.problems.empty();
        return out;
    });
}

std::vector<TreeFixture> default_tree_fixtures() {
    return {
        {"unique-pv", "A(B(D(H:3 I:-9) E(J:-5 K:-6)) C(F(L:4 M:2) G(N:-9 O:5)))", 3, 4.0, {"L"}},
        {"tied-pv", "A(B(D(H:4 I:-9) E(J:10 K:8)) C(F(L:4 M:2) G(N:-9 O:5)))", 3, 4.0, {"H", "L"}},
    };
}

std::vector<FixtureCheck> verify_figures(const RunConfig& c) {
    constexpr int kTieTrials = 200;
    const auto fixtures = c.trees.empty() ? default_tree_fixtures() : c.trees;
    std::vector<FixtureCheck> out;
    for (const auto& fx : fixtures) {
        const auto root = game::SyntheticTree::root(fx.tree);
        const std::set<std::string> allowed(fx.leaves.begin(), fx.leaves.end());
        auto ok = [&](const search::SearchResult<game::SyntheticTree>& r) {
            return r.value == fx.value && allowed.count(r.leaf.label()) &&
                   search::leaf_evaluation(r, game::synthetic_eval) == r.value;
        };
        const auto mm = search::minimax(root, fx.depth, game::synthetic_eval);
        const auto ab = search::alphabeta(root, fx.depth, game::synthetic_eval);
        bool pass = ok(mm) && ok(ab) && mm.pv == ab.pv;
        std::set<std::string> seen;
        for (int seed = 0; seed < kTieTrials; ++seed) {
            const auto r = search::alphabeta(root, fx.depth, game::synthetic_eval,
                                             search::TieBreak::uniform_random(c.seed + static_cast<std::uint64_t>(seed)));
            pass = pass && ok(r);
            seen.insert(r.leaf.label());
        }
        pass = pass && seen == allowed;

        std::string leaves;
        for (const auto& l : seen) leaves += (leaves.empty() ? "" : ",") + l;
        std::ostringstream line;
        line << (pass ? "PASS " : "FAIL ") << fx.name << ": value " << eval::format_double(ab.value)
             << " (expected " << eval::format_double(fx.value) << "), first-found leaf " << ab.leaf.label()
             << ", leaves over " << kTieTrials << " random tie-breaks {" << leaves << "}";
        out.push_back({pass, line.str()});
    }
    return out;
}

int run(const RunConfig& c, std::ostream& out, bool quiet) {
    if (c.mode == "train-online" || c.mode == "train-selfplay") {
        const auto s = run_training(c);
        if (!quiet) {
            out << c.mode << ": " << s.rows.size() << " games, run directory " << s.dir.string() << '\n';
            if (!s.rows.empty())
                out << "final learner rating " << eval::format_double(s.rows.back().agent_rating) << '\n';
            out << "weights " << weights_line(s.final_weights) << '\n';
        }
        return 0;
    }
    if (c.mode == "head-to-head") {
        const auto h = run_head_to_head(c);
        json result{{"a", c.agent_a.id}, {"b", c.agent_b.id}, {"games", c.games}, {"wins", h.wins},
                    {"draws", h.draws}, {"losses", h.losses}, {"faults", h.faults}, {"score", h.score}};
        ensure_dir(c.out_dir);
        write_file(c.out_dir / "config.json", c.source.dump(2) + "\n");
        write_file(c.out_dir / "head_to_head.json", result.dump(2) + "\n");
        if (!quiet)
            out << c.agent_a.id << " vs " << c.agent_b.id << ": score " << eval::format_double(h.score) << " over "
                << c.games << " games (" << h.wins << " wins, " << h.draws << " draws, " << h.losses << " losses)\n";
        return 0;
    }
    if (c.mode == "replay") {
        const auto r = run_replay(c);
        std::ostringstream report;
        for (const auto& p : r.problems) report << "  " << p << '\n';
        report << (r.pass ? "PASS" : "FAIL") << " replay of " << c.run_dir.string() << ": " << r.updates
               << " updates recomputed, " << r.snapshots_checked << " snapshots compared\n";
        if (!c.out_dir.empty()) {
            ensure_dir(c.out_dir);
            write_file(c.out_dir / "replay.txt", report.str());
        }
        out << report.str();
        return r.pass ? 0 : 1;
    }
    const auto checks = verify_figures(c);
    bool pass = true;
    std::ostringstream report;
    for (const auto& ch : checks) {
        report << ch.line << '\n';
        pass = pass && ch.pass;
    }
    report << (pass ? "PASS" : "FAIL") << '\n';
    if (!c.out_dir.empty()) {
        ensure_dir(c.out_dir);
        write_file(c.out_dir / "verify_figures.txt", report.str());
    }
    out << report.str();
    return pass ? 0 : 1;
}

}  // namespace tdleaf::cli
