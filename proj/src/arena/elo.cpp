#include "tdleaf/arena/elo.hpp"

#include <cmath>

namespace tdleaf::arena {

void RatingTable::add(const std::string& id, double rating) {
    if (!std::isfinite(rating)) throw std::invalid_argument("rating must be finite");
    ratings_[id] = rating;
}

double RatingTable::rating(const std::string& id) const {
    const auto it = ratings_.find(id);
    if (it == ratings_.end()) throw UnknownAgentError("unregistered agent '" + id + "'");
    return it->second;
}

double expected_score(double r, double opp) { return 1.0 / (1.0 + std::pow(10.0, (opp - r) / 400.0)); }

void RatingTable::record(const std::string& white, const std::string& black, game::Outcome outcome) {
    const double rw = rating(white);
    const double rb = rating(black);
    if (white == black) return;  // self-play leaves the rating where it is
    const double score = (outcome.white_reward + 1.0) / 2.0;
    const double delta = k_ * (score - expected_score(rw, rb));
    ratings_[white] = rw + delta;
    ratings_[black] = rb - delta;
}

RatingTable elo_update(RatingTable table, const std::string& white, const std::string& black, game::Outcome outcome) {
    table.record(white, black, outcome);
    return table;
}

}  // namespace tdleaf::arena
