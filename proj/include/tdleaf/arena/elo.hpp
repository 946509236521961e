#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "tdleaf/game/types.hpp"

namespace tdleaf::arena {

class UnknownAgentError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Elo ratings keyed by agent id.
class RatingTable {
  public:
    static constexpr double kInitialRating = 1500.0;

    explicit RatingTable(double k_factor = 32.0) : k_(k_factor) {}

    void add(const std::string& id, double rating = kInitialRating);
    bool contains(const std::string& id) const { return ratings_.count(id) != 0; }
    double rating(const std::string& id) const;
    double k_factor() const { return k_; }
    const std::map<std::string, double>& all() const { return ratings_; }

    /// Applies one game result. The same delta is added to one side and
    /// subtracted from the other.
    void record(const std::string& white, const std::string& black, game::Outcome outcome);

  private:
    double k_;
    std::map<std::string, double> ratings_;
};

/// Expected score of a player rated `r` against one rated `opp`.
double expected_score(double r, double opp);

RatingTable elo_update(RatingTable table, const std::string& white, const std::string& black, game::Outcome outcome);

}  // namespace tdleaf::arena
