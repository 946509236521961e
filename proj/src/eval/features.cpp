#include "tdleaf/eval/features.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace tdleaf::eval {

using game::Color;
using game::Connect4;
using game::Minichess;
using game::TicTacToe;

namespace {

void require_full(std::string_view game, std::string_view set) {
    if (set != "full") throw std::invalid_argument(std::string(game) + " has no feature set '" + std::string(set) + "'");
}

}  // namespace

std::size_t feature_index(const std::vector<std::string>& names, std::string_view name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

// --- tic-tac-toe -----------------------------------------------------------

Features<TicTacToe>::Features(std::string_view set) {
    require_full(TicTacToe::kName, set);
    for (int i = 0; i < 9; ++i) names_.push_back("cell_" + std::to_string(i));
    names_.push_back("bias");
}

FeatureVector Features<TicTacToe>::operator()(const TicTacToe& s) const {
    const auto own = s.side_to_move() == Color::White ? TicTacToe::Cell::X : TicTacToe::Cell::O;
    FeatureVector phi{std::vector<double>(10, 0.0)};
    for (int i = 0; i < 9; ++i) {
        const auto c = s.at(i);
        if (c != TicTacToe::Cell::Empty) phi.values[i] = c == own ? 1.0 : -1.0;
    }
    phi.values[9] = 1.0;
    return phi;
}

// --- connect-4 -------------------------------------------------------------

namespace {

constexpr std::uint64_t column_mask(int col) {
    return ((std::uint64_t{1} << Connect4::kRows) - 1) << (col * Connect4::kStride);
}

constexpr std::uint64_t board_mask() {
    std::uint64_t m = 0;
    for (int c = 0; c < Connect4::kCols; ++c) m |= column_mask(c);
    return m;
}

// Cells at rows 0, 2, 4.
constexpr std::uint64_t odd_row_mask() {
    std::uint64_t m = 0;
    for (int c = 0; c < Connect4::kCols; ++c)
        for (int r = 0; r < Connect4::kRows; r += 2) m |= Connect4::bit(c, r);
    return m;
}

// Cells where the next piece of each column lands.
std::uint64_t playable_cells(const Connect4& s) {
    std::uint64_t m = 0;
    for (int c = 0; c < Connect4::kCols; ++c)
        if (s.height(c) < Connect4::kRows) m |= Connect4::bit(c, s.height(c));
    return m;
}

int popcount(std::uint64_t x) { return std::popcount(x); }

}  // namespace

const std::vector<std::uint64_t>& Features<Connect4>::windows() {
    static const std::vector<std::uint64_t> all = [] {
        std::vector<std::uint64_t> out;
        constexpr int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
        for (const auto& d : dirs) {
            for (int c = 0; c < Connect4::kCols; ++c) {
                for (int r = 0; r < Connect4::kRows; ++r) {
                    const int ec = c + 3 * d[0], er = r + 3 * d[1];
                    if (ec < 0 || ec >= Connect4::kCols || er < 0 || er >= Connect4::kRows) continue;
                    std::uint64_t w = 0;
                    for (int i = 0; i < 4; ++i) w |= Connect4::bit(c + i * d[0], r + i * d[1]);
                    out.push_back(w);
                }
            }
        }
        return out;
    }();
    return all;
}

std::uint64_t Features<Connect4>::threat_cells(std::uint64_t p, std::uint64_t occupied) {
    // Vertical: three stacked below.
    std::uint64_t r = (p << 1) & (p << 2) & (p << 3);
    // Horizontal and both diagonals: the cell can sit at any of the four
    // positions of a line.
    for (int s : {Connect4::kStride, Connect4::kStride - 1, Connect4::kStride + 1}) {
        std::uint64_t q = (p << s) & (p << 2 * s);
        r |= q & (p << 3 * s);
        r |= q & (p >> s);
        q = (p >> s) & (p >> 2 * s);
        r |= q & (p << s);
        r |= q & (p >> 3 * s);
    }
    return r & board_mask() & ~occupied;
}

Features<Connect4>::Features(std::string_view set) {
    require_full(Connect4::kName, set);
    names_ = {"three", "two", "one", "center", "inner", "immediate", "odd", "even", "stacked", "edge"};
}

FeatureVector Features<Connect4>::operator()(const Connect4& s) const {
    const Color me = s.side_to_move();
    const std::uint64_t own = s.pieces(me);
    const std::uint64_t opp = s.pieces(game::opposite(me));
    const std::uint64_t occ = own | opp;

    FeatureVector phi{std::vector<double>(10, 0.0)};
    auto& f = phi.values;
    for (std::uint64_t w : windows()) {
        const int a = popcount(w & own), b = popcount(w & opp);
        if (a > 0 && b == 0 && a < 4) f[3 - a] += 1.0;
        else if (b > 0 && a == 0 && b < 4) f[3 - b] -= 1.0;
    }
    f[3] = popcount(own & column_mask(3)) - popcount(opp & column_mask(3));
    const std::uint64_t inner = column_mask(2) | column_mask(4);
    f[4] = popcount(own & inner) - popcount(opp & inner);

    const std::uint64_t playable = playable_cells(s);
    const std::uint64_t odd_rows = odd_row_mask();
    auto threat_terms = [&](std::uint64_t pieces, double sign) {
        const std::uint64_t t = threat_cells(pieces, occ);
        const std::uint64_t later = t & ~playable;
        f[5] += sign * popcount(t & playable);
        f[6] += sign * popcount(later & odd_rows);
        f[7] += sign * popcount(later & ~odd_rows);
        f[8] += sign * popcount(t & (t >> 1));
    };
    threat_terms(own, 1.0);
    threat_terms(opp, -1.0);

    const std::uint64_t edge = column_mask(0) | column_mask(6);
    f[9] = popcount(own & edge) - popcount(opp & edge);
    return phi;
}

// --- minichess -------------------------------------------------------------

Features<Minichess>::Features(std::string_view set) {
    if (set == "material") material_only_ = true;
    else if (set != "full") throw std::invalid_argument("minichess has no feature set '" + std::string(set) + "'");
    names_ = {"pawn", "knight", "bishop", "rook", "queen"};
    if (!material_only_) {
        names_.push_back("mobility");
        names_.push_back("king_exposure");
    }
}

FeatureVector Features<Minichess>::operator()(const Minichess& s) const {
    const Color me = s.side_to_move();
    const Color them = game::opposite(me);
    FeatureVector phi{std::vector<double>(names_.size(), 0.0)};
    auto& f = phi.values;
    for (int t = Minichess::Pawn; t <= Minichess::Queen; ++t) {
        const auto type = static_cast<Minichess::PieceType>(t);
        f[static_cast<std::size_t>(t - 1)] = s.count(me, type) - s.count(them, type);
    }
    if (!material_only_) {
        f[5] = s.pseudo_move_count(me) - s.pseudo_move_count(them);
        f[6] = s.king_exposure(me) - s.king_exposure(them);
    }
    return phi;
}

}  // namespace tdleaf::eval
