#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdleaf/arena/match.hpp"

namespace tdleaf::arena {

/// Plain-text trace log. One block per recorded trace, in play order:
///
///   game <index> agent=<id> color=<white|black> white=<id> black=<id> moves=<m1,m2,...|->
///   step <ply> <root_hash> <pv m1,m2,...|-> <raw_value> <squashed_value> <predicted> <rating_lower>
///   ...
///   outcome <white reward>
///
/// plus "update <game_index>" after every weight update. ply counts moves
/// from the initial position; root_hash is 16 hex digits; values are
/// White-frame and printed with 17 significant digits.
class TraceLogError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string trace_log_header(std::string_view game);

std::string join_tokens(const std::vector<std::string>& tokens);
std::vector<std::string> split_tokens(std::string_view joined);
std::string hex64(std::uint64_t v);

template <Game G>
std::vector<std::string> move_tokens(const std::vector<typename G::Action>& moves) {
    std::vector<std::string> out;
    out.reserve(moves.size());
    for (const auto& m : moves) out.push_back(G::action_to_string(m));
    return out;
}

void write_trace_block(std::ostream& out, const learn::GameTrace& trace, const std::string& agent_id,
                       const std::string& white, const std::string& black, const std::vector<std::string>& moves);
void write_update_line(std::ostream& out, int game_index);

/// One parsed log record.
struct TraceLogEntry {
    enum class Kind { Game, Update };
    Kind kind = Kind::Game;
    int game_index = 0;
    std::string agent_id;
    game::Color color = game::Color::White;
    std::string white;
    std::string black;
    std::vector<std::string> moves;
    learn::GameTrace trace;  // steps carry logged values; leaf features are not logged
};

std::vector<TraceLogEntry> read_trace_log(std::istream& in);

}  // namespace tdleaf::arena
