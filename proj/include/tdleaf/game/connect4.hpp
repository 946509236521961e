#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdleaf/game/types.hpp"

namespace tdleaf::game {

/// Connect-4 on the standard 7 columns x 6 rows board. White ('X') moves
/// first. Actions are column indices 0..6.
///
/// Bitboard layout: bit (col * 7 + row), row 0 at the bottom. The seventh
/// bit of every column is a sentinel that is always clear, so shifted line
/// tests never wrap between columns.
class Connect4 {
  public:
    using Action = int;

    static constexpr std::string_view kName = "connect4";
    static constexpr int kCols = 7;
    static constexpr int kRows = 6;
    static constexpr int kStride = kRows + 1;

    static constexpr std::uint64_t bit(int col, int row) {
        return std::uint64_t{1} << (col * kStride + row);
    }

    static Connect4 initial() { return {}; }

    std::vector<Action> legal_actions() const;
    Connect4 apply(Action col) const;
    bool is_terminal() const;
    Outcome outcome() const;

    Color side_to_move() const { return ply_ % 2 == 0 ? Color::White : Color::Black; }
    int ply() const { return ply_; }
    int height(int col) const { return heights_[static_cast<std::size_t>(col)]; }
    std::uint64_t pieces(Color c) const { return pieces_[c == Color::White ? 0 : 1]; }
    std::uint64_t occupied() const { return pieces_[0] | pieces_[1]; }

    /// True if the bitboard holds four in a row anywhere.
    static bool has_four(std::uint64_t b);

    /// Six lines of seven characters from {X, O, .}, top row first.
    std::string to_string() const;
    static Connect4 parse(std::string_view text);
    static std::string action_to_string(Action a);
    static Action parse_action(std::string_view token);

    std::uint64_t hash() const;

    friend bool operator==(const Connect4&, const Connect4&) = default;

  private:
    std::array<std::uint64_t, 2> pieces_{};
    std::array<std::uint8_t, kCols> heights_{};
    int ply_ = 0;
};

}  // namespace tdleaf::game
