#include "tdleaf/arena/training.hpp"

namespace tdleaf::arena {

std::string_view to_string(Matching m) { return m == Matching::Uniform ? "uniform" : "nearest-rating"; }

Matching parse_matching(std::string_view text) {
    if (text == "uniform") return Matching::Uniform;
    if (text == "nearest-rating") return Matching::NearestRating;
    throw std::invalid_argument("unknown matching rule '" + std::string(text) + "'");
}

void write_ratings_csv(std::ostream& out, const std::vector<GameRow>& rows) {
    out << "game_index,opponent_id,color,outcome,agent_rating,opponent_rating,moves,nodes_searched,weight_hash\n";
    for (const auto& r : rows) {
        out << r.game_index << ',' << r.opponent_id << ',' << game::to_string(r.color) << ','
            << eval::format_double(r.outcome + 0.0) << ',' << eval::format_double(r.agent_rating) << ','
            << eval::format_double(r.opponent_rating) << ',' << r.moves << ',' << r.nodes << ','
            << hex64(r.weight_hash) << '\n';
    }
}

}  // namespace tdleaf::arena
