#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdleaf/eval/linear.hpp"
#include "tdleaf/game/connect4.hpp"
#include "tdleaf/game/minichess.hpp"
#include "tdleaf/game/tictactoe.hpp"

namespace tdleaf::eval {

/// Feature map phi for game G. Every feature is relative to the side to
/// move: "own" means the player to move, "opp" the other one.
template <typename G>
class Features;

/// Tic-tac-toe, k = 10.
///
///   0..8  cell_i  +1 own mark, -1 opponent mark, 0 empty
///   9     bias    always 1
template <>
class Features<game::TicTacToe> {
  public:
    explicit Features(std::string_view set = "full");
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    FeatureVector operator()(const game::TicTacToe& s) const;

  private:
    std::vector<std::string> names_;
};

/// Connect-4, k = 10. Each entry is own count minus opp count.
///
///   0 three      4-cell windows holding 3 own pieces and 1 empty cell
///   1 two        windows with 2 own pieces and 2 empty cells
///   2 one        windows with 1 own piece and 3 empty cells
///   3 center     pieces in column 3
///   4 inner      pieces in columns 2 and 4
///   5 immediate  threat cells that are playable right now
///   6 odd        other threat cells on rows 1, 3, 5 (counted from 1 at the bottom)
///   7 even       other threat cells on rows 2, 4, 6
///   8 stacked    threat cells with another own threat cell directly above
///   9 edge       pieces in columns 0 and 6
///
/// A threat cell is an empty cell that would complete four in a row.
template <>
class Features<game::Connect4> {
  public:
    explicit Features(std::string_view set = "full");
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    FeatureVector operator()(const game::Connect4& s) const;

    /// Empty cells that complete four for the owner of `pieces`.
    static std::uint64_t threat_cells(std::uint64_t pieces, std::uint64_t occupied);
    /// The 69 four-cell lines of the board.
    static const std::vector<std::uint64_t>& windows();

  private:
    std::vector<std::string> names_;
};

/// Minichess. Feature set "full" has k = 7, "material" the first 5 only.
///
///   0..4  pawn, knight, bishop, rook, queen   own count - opp count
///   5     mobility       own pseudo-legal moves - opp pseudo-legal moves
///   6     king_exposure  attacked squares around own king - same for opp
template <>
class Features<game::Minichess> {
  public:
    explicit Features(std::string_view set = "full");
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    FeatureVector operator()(const game::Minichess& s) const;

  private:
    std::vector<std::string> names_;
    bool material_only_ = false;
};

/// J(., w) as a search evaluator: side-to-move-relative raw evaluation.
template <typename G>
class LinearEvaluator {
  public:
    LinearEvaluator(const Features<G>& features, const WeightVector& weights)
        : features_(features), weights_(weights) {}

    double operator()(const G& s) const { return raw_eval(features_(s), weights_); }

  private:
    const Features<G>& features_;
    const WeightVector& weights_;
};

/// Looks up a feature index by name, or throws std::invalid_argument.
std::size_t feature_index(const std::vector<std::string>& names, std::string_view name);

}  // namespace tdleaf::eval
