#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tdleaf/game/types.hpp"

namespace tdleaf::game {

/// Gardner 5x5 minichess. Chess rules with these simplifications: no
/// castling, no pawn double step, no en passant, pawns always promote to a
/// queen, and the game is drawn once kMaxPly plies have been played.
///
/// Squares are numbered rank * 5 + file with rank 0 being White's back
/// rank, so a1 = 0 and e5 = 24.
class Minichess {
  public:
    enum PieceType : std::int8_t { None = 0, Pawn = 1, Knight, Bishop, Rook, Queen, King };

    struct Move {
        std::uint8_t from = 0;
        std::uint8_t to = 0;
        friend bool operator==(const Move&, const Move&) = default;
    };
    using Action = Move;

    static constexpr std::string_view kName = "minichess";
    static constexpr int kSize = 5;
    static constexpr int kSquares = kSize * kSize;
    static constexpr int kMaxPly = 50;

    static constexpr int square(int file, int rank) { return rank * kSize + file; }
    static constexpr int file_of(int sq) { return sq % kSize; }
    static constexpr int rank_of(int sq) { return sq / kSize; }

    static Minichess initial();

    std::vector<Action> legal_actions() const;
    Minichess apply(Action m) const;
    bool is_terminal() const;
    Outcome outcome() const;

    Color side_to_move() const { return side_; }
    int ply() const { return ply_; }

    /// Signed piece code: positive for White, negative for Black.
    std::int8_t at(int sq) const { return board_[static_cast<std::size_t>(sq)]; }
    int count(Color c, PieceType t) const;
    int king_square(Color c) const;
    bool in_check(Color c) const;
    bool attacked(int sq, Color by) const;
    /// Pseudo-legal move count for c, ignoring whose turn it is and
    /// whether the own king is left in check.
    int pseudo_move_count(Color c) const;
    /// Squares in the 3x3 block around c's king (king square included)
    /// attacked by the other side.
    int king_exposure(Color c) const;

    /// FEN-like single line: "<placement> <w|b> <ply>", ranks from 5 down to
    /// 1 separated by '/', digits for empty runs.
    std::string to_string() const;
    static Minichess parse(std::string_view text);
    /// Coordinate notation, e.g. "b2b3". Promotion is implicit.
    static std::string action_to_string(Action m);
    static Action parse_action(std::string_view token);

    std::uint64_t hash() const;

    friend bool operator==(const Minichess&, const Minichess&) = default;

  private:
    template <typename F>
    void for_each_pseudo_move(Color c, F&& f) const;
    bool has_legal_move() const;
    bool leaves_king_safe(Move m) const;
    Minichess make(Move m) const;

    std::array<std::int8_t, kSquares> board_{};
    Color side_ = Color::White;
    int ply_ = 0;
};

}  // namespace tdleaf::game
