#include "tdleaf/arena/trace_log.hpp"

#include <charconv>
#include <cstdio>

namespace tdleaf::arena {

namespace {

constexpr std::string_view kMagic = "# tdleaf-trace v1";

int parse_int(std::string_view text, const std::string& what) {
    int v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw TraceLogError("trace log: bad " + what + " '" + std::string(text) + "'");
    return v;
}

std::string field_value(const std::string& field, std::string_view key) {
    if (field.size() <= key.size() || field.compare(0, key.size(), key) != 0 || field[key.size()] != '=')
        throw TraceLogError("trace log: expected " + std::string(key) + "=..., got '" + field + "'");
    return field.substr(key.size() + 1);
}

bool parse_flag(const std::string& text) {
    if (text == "1") return true;
    if (text == "0") return false;
    throw TraceLogError("trace log: bad flag '" + text + "'");
}

}  // namespace

std::string trace_log_header(std::string_view game) {
    return std::string(kMagic) + " game=" + std::string(game) +
           "\n# step columns: ply root_hash pv raw_value squashed_value predicted rating_lower\n";
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    if (tokens.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ',';
        out += tokens[i];
    }
    return out;
}

std::vector<std::string> split_tokens(std::string_view joined) {
    std::vector<std::string> out;
    if (joined == "-") return out;
    while (true) {
        const auto comma = joined.find(',');
        out.emplace_back(joined.substr(0, comma));
        if (comma == std::string_view::npos) break;
        joined.remove_prefix(comma + 1);
    }
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_trace_block(std::ostream& out, const learn::GameTrace& trace, const std::string& agent_id,
                       const std::string& white, const std::string& black, const std::vector<std::string>& moves) {
    out << "game " << trace.game_index << " agent=" << agent_id << " color=" << game::to_string(trace.agent)
        << " white=" << white << " black=" << black << " moves=" << join_tokens(moves) << '\n';
    for (const auto& s : trace.steps) {
        out << "step " << s.ply << ' ' << hex64(s.root_hash) << ' ' << join_tokens(s.pv) << ' '
            << eval::format_double(s.raw_value) << ' ' << eval::format_double(s.value) << ' '
            << (s.opponent_move_predicted ? 1 : 0) << ' ' << (s.opponent_rating_lower ? 1 : 0) << '\n';
    }
    out << "outcome " << eval::format_double(trace.outcome ? trace.outcome->white_reward : 0.0) << '\n';
}

void write_update_line(std::ostream& out, int game_index) { out << "update " << game_index << '\n'; }

std::vector<TraceLogEntry> read_trace_log(std::istream& in) {
    std::vector<TraceLogEntry> entries;
    std::string line;
    if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0) throw TraceLogError("trace log: missing header");
    bool open = false;  // a game block without its outcome yet
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::vector<std::string> f;
        for (std::string tok; fields >> tok;) f.push_back(tok);
        if (f.empty()) continue;
        const std::string where = " (line " + std::to_string(line_no) + ")";
        try {
            if (f[0] == "game" && f.size() == 7) {
                if (open) throw TraceLogError("trace log: game block without outcome");
                TraceLogEntry e;
                e.game_index = parse_int(f[1], "game index");
                e.agent_id = field_value(f[2], "agent");
                const auto color = field_value(f[3], "color");
                if (color != "white" && color != "black") throw TraceLogError("trace log: bad color");
                e.color = color == "white" ? game::Color::White : game::Color::Black;
                e.white = field_value(f[4], "white");
                e.black = field_value(f[5], "black");
                e.moves = split_tokens(field_value(f[6], "moves"));
                e.trace.agent = e.color;
                e.trace.game_index = e.game_index;
                entries.push_back(std::move(e));
                open = true;
            } else if (f[0] == "step" && f.size() == 8) {
                if (!open) throw TraceLogError("trace log: step outside a game block");
                learn::StepRecord s;
                s.ply = parse_int(f[1], "ply");
                if (f[2].size() != 16) throw TraceLogError("trace log: bad root hash");
                auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + 16, s.root_hash, 16);
                if (ec != std::errc{} || p != f[2].data() + 16) throw TraceLogError("trace log: bad root hash");
                s.pv = split_tokens(f[3]);
                s.raw_value = eval::parse_double(f[4]);
                s.value = eval::parse_double(f[5]);
                s.opponent_move_predicted = parse_flag(f[6]);
                s.opponent_rating_lower = parse_flag(f[7]);
                entries.back().trace.steps.push_back(std::move(s));
            } else if (f[0] == "outcome" && f.size() == 2) {
                if (!open) throw TraceLogError("trace log: outcome outside a game block");
                entries.back().trace.set_outcome(game::Outcome{eval::parse_double(f[1])});
                open = false;
            } else if (f[0] == "update" && f.size() == 2) {
                if (open) throw TraceLogError("trace log: update inside a game block");
                TraceLogEntry e;
                e.kind = TraceLogEntry::Kind::Update;
                e.game_index = parse_int(f[1], "game index");
                entries.push_back(std::move(e));
            } else {
                throw TraceLogError("trace log: unrecognized record");
            }
        } catch (const TraceLogError& e) {
            throw TraceLogError(e.what() + where);
        } catch (const std::invalid_argument& e) {
            throw TraceLogError(std::string("trace log: ") + e.what() + where);
        }
    }
    if (open) throw TraceLogError("trace log: truncated game block");
    return entries;
}

}  // namespace tdleaf::arena
