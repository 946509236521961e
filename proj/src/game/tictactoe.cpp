#include "tdleaf/game/tictactoe.hpp"

#include <charconv>

namespace tdleaf::game {

namespace {

constexpr std::array<std::array<int, 3>, 8> kLines{{
    {0, 1, 2}, {3, 4, 5}, {6, 7, 8},  // rows
    {0, 3, 6}, {1, 4, 7}, {2, 5, 8},  // columns
    {0, 4, 8}, {2, 4, 6},             // diagonals
}};

}  // namespace

TicTacToe::Cell TicTacToe::winner() const {
    for (const auto& line : kLines) {
        Cell c = cells_[line[0]];
        if (c != Cell::Empty && c == cells_[line[1]] && c == cells_[line[2]]) return c;
    }
    return Cell::Empty;
}

bool TicTacToe::is_terminal() const { return ply_ == 9 || winner() != Cell::Empty; }

std::vector<TicTacToe::Action> TicTacToe::legal_actions() const {
    std::vector<Action> out;
    if (is_terminal()) return out;
    out.reserve(9 - ply_);
    for (int i = 0; i < 9; ++i)
        if (cells_[i] == Cell::Empty) out.push_back(i);
    return out;
}

TicTacToe TicTacToe::apply(Action cell) const {
    if (cell < 0 || cell > 8 || cells_[cell] != Cell::Empty || is_terminal())
        throw IllegalMoveError("tictactoe: illegal move " + std::to_string(cell));
    TicTacToe next = *this;
    next.cells_[cell] = side_to_move() == Color::White ? Cell::X : Cell::O;
    ++next.ply_;
    return next;
}

Outcome TicTacToe::outcome() const {
    switch (winner()) {
        case Cell::X: return Outcome::white_wins();
        case Cell::O: return Outcome::black_wins();
        case Cell::Empty: break;
    }
    if (ply_ < 9) throw NotTerminalError("tictactoe: outcome of a non-terminal position");
    return Outcome::draw();
}

std::string TicTacToe::to_string() const {
    std::string out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            switch (cells_[r * 3 + c]) {
                case Cell::X: out += 'X'; break;
                case Cell::O: out += 'O'; break;
                case Cell::Empty: out += '.'; break;
            }
        }
        if (r < 2) out += '\n';
    }
    return out;
}

TicTacToe TicTacToe::parse(std::string_view text) {
    TicTacToe s;
    int i = 0, xs = 0, os = 0;
    for (char ch : text) {
        if (ch == '\n' || ch == '\r' || ch == ' ') continue;
        if (i >= 9) throw ParseError("tictactoe: too many cells");
        switch (ch) {
            case 'X': s.cells_[i] = Cell::X; ++xs; break;
            case 'O': s.cells_[i] = Cell::O; ++os; break;
            case '.': break;
            default: throw ParseError(std::string("tictactoe: bad cell character '") + ch + "'");
        }
        ++i;
    }
    if (i != 9) throw ParseError("tictactoe: expected 9 cells");
    if (xs != os && xs != os + 1) throw ParseError("tictactoe: impossible piece counts");
    s.ply_ = xs + os;
    // A finished game has exactly one winner, and the winner moved last.
    int x_lines = 0, o_lines = 0;
    for (const auto& line : kLines) {
        Cell c = s.cells_[line[0]];
        if (c != Cell::Empty && c == s.cells_[line[1]] && c == s.cells_[line[2]])
            (c == Cell::X ? x_lines : o_lines)++;
    }
    if ((x_lines && o_lines) || (x_lines && xs != os + 1) || (o_lines && xs != os))
        throw ParseError("tictactoe: unreachable position");
    return s;
}

std::string TicTacToe::action_to_string(Action a) { return std::to_string(a); }

TicTacToe::Action TicTacToe::parse_action(std::string_view token) {
    int v = -1;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size() || v < 0 || v > 8)
        throw ParseError("tictactoe: bad move token '" + std::string(token) + "'");
    return v;
}

std::uint64_t TicTacToe::hash() const { return fnv1a(to_string()); }

}  // namespace tdleaf::game
