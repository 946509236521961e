#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdleaf/game/types.hpp"

namespace tdleaf::game {

/// 3x3 tic-tac-toe. X is White and moves first. Cells are numbered
/// row-major from the top-left corner, 0..8.
class TicTacToe {
  public:
    using Action = int;
    enum class Cell : std::uint8_t { Empty, X, O };

    static constexpr std::string_view kName = "tictactoe";

    static TicTacToe initial() { return {}; }

    std::vector<Action> legal_actions() const;
    TicTacToe apply(Action cell) const;
    bool is_terminal() const;
    Outcome outcome() const;

    Color side_to_move() const { return ply_ % 2 == 0 ? Color::White : Color::Black; }
    int ply() const { return ply_; }
    Cell at(int cell) const { return cells_[static_cast<std::size_t>(cell)]; }

    /// Three lines of three characters from {X, O, .}, newline separated.
    std::string to_string() const;
    static TicTacToe parse(std::string_view text);
    static std::string action_to_string(Action a);
    static Action parse_action(std::string_view token);

    std::uint64_t hash() const;

    friend bool operator==(const TicTacToe&, const TicTacToe&) = default;

  private:
    Cell winner() const;

    std::array<Cell, 9> cells_{};
    int ply_ = 0;
};

}  // namespace tdleaf::game
