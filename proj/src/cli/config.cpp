#include "tdleaf/cli/config.hpp"

#include "tdleaf/eval/features.hpp"
#include "tdleaf/game/connect4.hpp"
#include "tdleaf/game/minichess.hpp"
#include "tdleaf/game/tictactoe.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace tdleaf::cli {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      line_(line) {}

namespace {

// Iterator over the raw text that tracks the line of the last
// non-whitespace character read, so a value's line is known when its SAX
// event fires even if the lexer has already consumed a trailing newline.
struct LineCountingIterator {
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    const char* p = nullptr;
    int* line = nullptr;
    int* pending = nullptr;

    reference operator*() const { return *p; }
    LineCountingIterator& operator++() {
        const char c = *p;
        if (c == '\n') {
            ++*pending;
        } else if (c != ' ' && c != '\t' && c != '\r') {
            *line += *pending;
            *pending = 0;
        }
        ++p;
        return *this;
    }
    LineCountingIterator operator++(int) {
        auto old = *this;
        ++*this;
        return old;
    }
    friend bool operator==(const LineCountingIterator& a, const LineCountingIterator& b) { return a.p == b.p; }
};

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

class LineSax : public nlohmann::json_sax<json> {
  public:
    LineSax(json& root, const int& line, std::map<std::string, int>& lines)
        : dom_(root, true), line_(line), lines_(lines) {}

    bool null() override { return value(), dom_.null(); }
    bool boolean(bool v) override { return value(), dom_.boolean(v); }
    bool number_integer(number_integer_t v) override { return value(), dom_.number_integer(v); }
    bool number_unsigned(number_unsigned_t v) override { return value(), dom_.number_unsigned(v); }
    bool number_float(number_float_t v, const string_t& s) override { return value(), dom_.number_float(v, s); }
    bool string(string_t& v) override { return value(), dom_.string(v); }
    bool binary(binary_t& v) override { return value(), dom_.binary(v); }
    bool start_object(std::size_t n) override {
        frames_.push_back({here(), false, 0, {}});
        return dom_.start_object(n);
    }
    bool key(string_t& k) override {
        frames_.back().key = k;
        lines_[frames_.back().path + "/" + escape_token(k)] = line_;
        return dom_.key(k);
    }
    bool end_object() override {
        frames_.pop_back();
        return dom_.end_object();
    }
    bool start_array(std::size_t n) override {
        frames_.push_back({here(), true, 0, {}});
        return dom_.start_array(n);
    }
    bool end_array() override {
        frames_.pop_back();
        return dom_.end_array();
    }
    bool parse_error(std::size_t pos, const std::string& token, const nlohmann::detail::exception& e) override {
        return dom_.parse_error(pos, token, e);
    }

  private:
    struct Frame {
        std::string path;
        bool array;
        int index;
        std::string key;
    };

    // Pointer of the value that starts now; array elements get their line
    // recorded here, object members already got theirs from key().
    std::string here() {
        if (frames_.empty()) {
            lines_[""] = line_;
            return "";
        }
        auto& f = frames_.back();
        if (!f.array) return f.path + "/" + escape_token(f.key);
        const std::string p = f.path + "/" + std::to_string(f.index++);
        lines_[p] = line_;
        return p;
    }
    void value() { here(); }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    const int& line_;
    std::map<std::string, int>& lines_;
    std::vector<Frame> frames_;
};

/// Typed, line-aware access to one JSON object; finish() rejects keys that
/// were never read.
class ObjectReader {
  public:
    ObjectReader(const JsonDocument& doc, const json& obj, std::string pointer)
        : doc_(doc), obj_(obj), pointer_(std::move(pointer)) {
        if (!obj_.is_object()) fail_at(pointer_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& at(const std::string& key) {
        used_.insert(key);
        if (!obj_.contains(key)) fail_at(pointer_, "missing required key '" + key + "'");
        return obj_.at(key);
    }

    std::string pointer(const std::string& key) const { return pointer_ + "/" + escape_token(key); }

    std::string get_string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key) && fallback) return mark(key), *fallback;
        const json& v = at(key);
        if (!v.is_string()) fail(key, "expected a string");
        return v.get<std::string>();
    }

    double get_double(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key) && fallback) return mark(key), *fallback;
        const json& v = at(key);
        if (!v.is_number()) fail(key, "expected a number");
        return v.get<double>();
    }

    std::int64_t get_int(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
        if (!has(key) && fallback) return mark(key), *fallback;
        const json& v = at(key);
        if (!v.is_number_integer()) fail(key, "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t get_uint(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
        if (!has(key) && fallback) return mark(key), *fallback;
        const json& v = at(key);
        if (!v.is_number_unsigned()) fail(key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool get_bool(const std::string& key, std::optional<bool> fallback = std::nullopt) {
        if (!has(key) && fallback) return mark(key), *fallback;
        const json& v = at(key);
        if (!v.is_boolean()) fail(key, "expected true or false");
        return v.get<bool>();
    }

    std::map<std::string, double> get_number_map(const std::string& key) {
        std::map<std::string, double> out;
        if (!has(key)) return mark(key), out;
        ObjectReader inner(doc_, at(key), pointer(key));
        for (const auto& [name, v] : obj_.at(key).items()) {
            out[name] = inner.get_double(name);
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, v] : obj_.items())
            if (!used_.count(key)) fail_at(pointer(key), "unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        fail_at(pointer(key), "'" + key + "': " + message);
    }

    [[noreturn]] void fail_at(const std::string& pointer, const std::string& message) const {
        throw ConfigError(doc_.source(), doc_.line_of(pointer), message);
    }

  private:
    void mark(const std::string& key) { used_.insert(key); }

    const JsonDocument& doc_;
    const json& obj_;
    std::string pointer_;
    std::set<std::string> used_;
};

template <typename T>
void require_one_of(ObjectReader& r, const std::string& key, const T& value, const std::vector<T>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    r.fail(key, "'" + value + "' is not one of: " + list);
}

int positive_int(ObjectReader& r, const std::string& key, std::int64_t fallback, std::int64_t min) {
    const auto v = r.get_int(key, fallback);
    if (v < min || v > std::numeric_limits<int>::max()) r.fail(key, "must be at least " + std::to_string(min));
    return static_cast<int>(v);
}

fs::path existing_path(ObjectReader& r, const std::string& key) {
    const fs::path p = r.get_string(key);
    std::error_code ec;
    if (!fs::exists(p, ec)) r.fail(key, "file '" + p.string() + "' does not exist");
    return p;
}

void check_names(ObjectReader& r, const std::string& key, const std::map<std::string, double>& weights,
                 const std::vector<std::string>& names) {
    for (const auto& [name, v] : weights)
        if (std::find(names.begin(), names.end(), name) == names.end())
            r.fail_at(r.pointer(key) + "/" + escape_token(name), "unknown feature '" + name + "'");
}

AgentSpec parse_agent(const JsonDocument& doc, const json& j, const std::string& pointer, bool in_pool,
                      const std::vector<std::string>& names) {
    ObjectReader r(doc, j, pointer);
    AgentSpec a;
    a.pointer = pointer;
    a.id = r.get_string("id");
    if (a.id.empty() || a.id.find_first_of(" \t,=") != std::string::npos)
        r.fail("id", "must be non-empty without spaces, commas or '='");
    a.kind = r.get_string("kind");
    require_one_of(r, "kind", a.kind, std::vector<std::string>{"random", "fixed", "search"});
    a.seed = r.get_uint("seed", 0);
    if (a.kind != "random") {
        a.depth = positive_int(r, "depth", 1, 1);
        a.random_ties = r.get_bool("random_ties", false);
        if (r.has("weights") == r.has("weights_file"))
            r.fail_at(pointer, "agent '" + a.id + "' needs exactly one of 'weights' and 'weights_file'");
        if (r.has("weights")) {
            a.weights = r.get_number_map("weights");
            check_names(r, "weights", a.weights, names);
        } else {
            a.weights_file = existing_path(r, "weights_file");
        }
    }
    if (in_pool && r.has("rating")) a.rating = r.get_double("rating");
    r.finish();
    return a;
}

learn::LearnerConfig parse_learner(const JsonDocument& doc, const json& j, const std::string& pointer) {
    ObjectReader r(doc, j, pointer);
    learn::LearnerConfig cfg;
    cfg.lambda = r.get_double("lambda", 0.7);
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) r.fail("lambda", "must lie in [0, 1]");

    if (!r.has("alpha") || r.at("alpha").is_number()) {
        cfg.alpha.value = r.get_double("alpha", 1.0);
        if (!(cfg.alpha.value > 0.0)) r.fail("alpha", "must be positive");
    } else {
        ObjectReader a(doc, r.at("alpha"), r.pointer("alpha"));
        const auto schedule = a.get_string("schedule", "constant");
        require_one_of(a, "schedule", schedule, std::vector<std::string>{"constant", "inverse-decay"});
        cfg.alpha.value = a.get_double("value");
        if (!(cfg.alpha.value > 0.0)) a.fail("value", "must be positive");
        if (schedule == "inverse-decay") {
            cfg.alpha.kind = learn::AlphaSchedule::Kind::InverseDecay;
            cfg.alpha.horizon = a.get_double("horizon");
            cfg.alpha.floor = a.get_double("floor");
            if (!(cfg.alpha.horizon > 0.0)) a.fail("horizon", "must be positive");
            if (!(cfg.alpha.floor > 0.0)) a.fail("floor", "must be positive");
        }
        a.finish();
    }

    if (r.has("squash")) {
        ObjectReader s(doc, r.at("squash"), r.pointer("squash"));
        cfg.squash.enabled = s.get_bool("enabled", true);
        if (s.has("unit") && s.has("beta")) s.fail("beta", "give either 'unit' or 'beta', not both");
        if (s.has("beta")) {
            cfg.squash.beta = s.get_double("beta");
            if (!(cfg.squash.beta > 0.0)) s.fail("beta", "must be positive");
        } else {
            const double unit = s.get_double("unit", 1.0);
            if (!(unit > 0.0)) s.fail("unit", "must be positive");
            cfg.squash.beta = eval::SquashConfig::calibrated(unit).beta;
        }
        s.finish();
    } else {
        cfg.squash = eval::SquashConfig::calibrated(1.0);
    }

    const auto clipping = r.get_string("clipping", std::string(learn::to_string(cfg.clipping)));
    try {
        cfg.clipping = learn::parse_clipping(clipping);
    } catch (const std::invalid_argument& e) {
        r.fail("clipping", e.what());
    }
    cfg.update_every_n_games = positive_int(r, "update_every_n_games", 1, 1);

    if (r.has("lambda_schedule")) {
        const json& stages = r.at("lambda_schedule");
        if (!stages.is_array()) r.fail("lambda_schedule", "expected an array");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            ObjectReader st(doc, stages[i], r.pointer("lambda_schedule") + "/" + std::to_string(i));
            learn::LambdaStage stage;
            stage.until_game = positive_int(st, "until_game", 0, 0);
            stage.lambda = st.get_double("lambda");
            if (!(stage.lambda >= 0.0 && stage.lambda <= 1.0)) st.fail("lambda", "must lie in [0, 1]");
            st.finish();
            cfg.lambda_schedule.push_back(stage);
        }
    }
    r.finish();
    return cfg;
}

TreeFixture parse_tree(const JsonDocument& doc, const json& j, const std::string& pointer) {
    ObjectReader r(doc, j, pointer);
    TreeFixture t;
    t.name = r.get_string("name");
    t.tree = r.get_string("tree");
    t.depth = positive_int(r, "depth", 0, 0);
    t.value = r.get_double("value");
    const json& leaves = r.at("leaves");
    if (!leaves.is_array() || leaves.empty()) r.fail("leaves", "expected a non-empty array of labels");
    for (const auto& l : leaves) {
        if (!l.is_string()) r.fail("leaves", "expected labels as strings");
        t.leaves.push_back(l.get<std::string>());
    }
    r.finish();
    return t;
}

}  // namespace

void JsonDocument::override_value(const std::string& key, json value) {
    root_[key] = std::move(value);
    lines_.erase("/" + escape_token(key));
}

int JsonDocument::line_of(const std::string& pointer) const {
    const auto it = lines_.find(pointer);
    return it == lines_.end() ? 0 : it->second;
}

JsonDocument JsonDocument::parse(const std::string& text, std::string source) {
    JsonDocument doc;
    doc.source_ = std::move(source);
    int line = 1, pending = 0;
    LineSax sax(doc.root_, line, doc.lines_);
    const LineCountingIterator first{text.data(), &line, &pending};
    const LineCountingIterator last{text.data() + text.size(), &line, &pending};
    try {
        json::sax_parse(first, last, &sax);
    } catch (const json::exception& e) {
        // "[json.exception.parse_error.101] parse error at line 4, column 1: <detail>"
        const std::string what = e.what();
        const auto colon = what.rfind(": ");
        throw ConfigError(doc.source_, line, "invalid JSON" + (colon == std::string::npos ? "" : what.substr(colon)));
    }
    return doc;
}

JsonDocument JsonDocument::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path.string());
}

std::vector<std::string> feature_names(const std::string& game, const std::string& set) {
    if (game == "tictactoe") return eval::Features<game::TicTacToe>(set).names();
    if (game == "connect4") return eval::Features<game::Connect4>(set).names();
    if (game == "minichess") return eval::Features<game::Minichess>(set).names();
    throw std::invalid_argument("game '" + game + "' has no features");
}

const std::vector<std::string>& known_modes() {
    static const std::vector<std::string> modes{"train-online", "train-selfplay", "head-to-head", "replay",
                                                "verify-figures"};
    return modes;
}

const std::vector<std::string>& known_games() {
    static const std::vector<std::string> games{"tictactoe", "connect4", "minichess", "synthetic-tree"};
    return games;
}

RunConfig parse_config(const JsonDocument& doc) {
    ObjectReader r(doc, doc.root(), "");
    RunConfig c;
    c.source = doc.root();
    c.source_name = doc.source();
    c.mode = r.get_string("mode");
    require_one_of(r, "mode", c.mode, known_modes());
    c.description = r.get_string("description", "");

    if (c.mode == "replay") {
        c.run_dir = r.get_string("run_dir");
        for (const char* f : {"config.json", "traces.log", "weights_final.snapshot"}) {
            std::error_code ec;
            if (!fs::exists(c.run_dir / f, ec)) r.fail("run_dir", "'" + (c.run_dir / f).string() + "' does not exist");
        }
        if (r.has("game")) {
            c.game = r.get_string("game");
            require_one_of(r, "game", c.game, known_games());
        }
        if (r.has("out_dir")) c.out_dir = r.get_string("out_dir");
        r.finish();
        return c;
    }

    c.game = r.get_string("game");
    require_one_of(r, "game", c.game, known_games());
    const bool synthetic = c.game == "synthetic-tree";
    if (synthetic != (c.mode == "verify-figures"))
        r.fail("game", synthetic ? "synthetic-tree only supports mode verify-figures"
                                 : "verify-figures needs game synthetic-tree");

    if (c.mode == "verify-figures") {
        if (r.has("trees")) {
            const json& trees = r.at("trees");
            if (!trees.is_array()) r.fail("trees", "expected an array");
            for (std::size_t i = 0; i < trees.size(); ++i)
                c.trees.push_back(parse_tree(doc, trees[i], "/trees/" + std::to_string(i)));
        }
        c.seed = r.get_uint("seed", 0);
        if (r.has("out_dir")) c.out_dir = r.get_string("out_dir");
        r.finish();
        return c;
    }

    c.seed = r.get_uint("seed", 0);
    c.out_dir = r.get_string("out_dir");
    if (c.out_dir.empty()) r.fail("out_dir", "must not be empty");
    c.features = r.get_string("features", "full");
    std::vector<std::string> names;
    try {
        names = feature_names(c.game, c.features);
    } catch (const std::invalid_argument& e) {
        r.fail("features", e.what());
    }
    c.games = positive_int(r, "games", 0, 0);
    c.opening_random_plies = positive_int(r, "opening_random_plies", 0, 0);
    c.threads = static_cast<unsigned>(positive_int(r, "threads", 1, 1));

    if (c.mode == "head-to-head") {
        ObjectReader agents(doc, r.at("agents"), "/agents");
        c.agent_a = parse_agent(doc, agents.at("a"), "/agents/a", false, names);
        c.agent_b = parse_agent(doc, agents.at("b"), "/agents/b", false, names);
        agents.finish();
        if (c.agent_a.id == c.agent_b.id) r.fail("agents", "the two agents need distinct ids");
        r.finish();
        return c;
    }

    c.search_depth = positive_int(r, "search_depth", 1, 1);
    c.initial_weights = r.get_number_map("initial_weights");
    c.anchors = r.get_number_map("anchors");
    check_names(r, "initial_weights", c.initial_weights, names);
    check_names(r, "anchors", c.anchors, names);
    c.learner = r.has("learner") ? parse_learner(doc, r.at("learner"), "/learner") : learn::LearnerConfig{};
    if (!r.has("learner")) c.learner.squash = eval::SquashConfig::calibrated(1.0);
    c.random_ties = r.get_bool("random_ties", true);
    c.snapshot_every = positive_int(r, "snapshot_every", 0, 0);
    c.k_factor = r.get_double("k_factor", 32.0);
    if (!(c.k_factor > 0.0)) r.fail("k_factor", "must be positive");
    c.learner_id = r.get_string("learner_id", "learner");
    c.learner_rating = r.get_double("learner_rating", 1500.0);

    if (c.mode == "train-online") {
        ObjectReader pool(doc, r.at("pool"), "/pool");
        c.matching = pool.get_string("matching", "uniform");
        require_one_of(pool, "matching", c.matching, std::vector<std::string>{"uniform", "nearest-rating"});
        const json& opponents = pool.at("opponents");
        if (!opponents.is_array() || opponents.empty()) pool.fail("opponents", "expected a non-empty array");
        std::set<std::string> ids{c.learner_id};
        for (std::size_t i = 0; i < opponents.size(); ++i) {
            const std::string p = "/pool/opponents/" + std::to_string(i);
            c.opponents.push_back(parse_agent(doc, opponents[i], p, true, names));
            if (!ids.insert(c.opponents.back().id).second)
                throw ConfigError(doc.source(), doc.line_of(p + "/id"), "duplicate agent id '" + c.opponents.back().id + "'");
        }
        pool.finish();
    } else {
        c.record_both_seats = r.get_bool("record_both_seats", false);
    }
    r.finish();
    return c;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
    JsonDocument doc = JsonDocument::load(path);
    if (doc.root().is_object()) {
        const bool replay = doc.root().value("mode", json()) == "replay";
        if (overrides.seed && !replay) doc.override_value("seed", *overrides.seed);
        if (overrides.out_dir) doc.override_value("out_dir", *overrides.out_dir);
    }
    return parse_config(doc);
}

}  // namespace tdleaf::cli
