#include "tdleaf/game/connect4.hpp"

#include <charconv>

namespace tdleaf::game {

bool Connect4::has_four(std::uint64_t b) {
    for (int shift : {1, kStride, kStride - 1, kStride + 1}) {
        std::uint64_t m = b & (b >> shift);
        if (m & (m >> (2 * shift))) return true;
    }
    return false;
}

bool Connect4::is_terminal() const {
    return ply_ == kCols * kRows || has_four(pieces_[0]) || has_four(pieces_[1]);
}

std::vector<Connect4::Action> Connect4::legal_actions() const {
    std::vector<Action> out;
    if (is_terminal()) return out;
    out.reserve(kCols);
    for (int c = 0; c < kCols; ++c)
        if (heights_[c] < kRows) out.push_back(c);
    return out;
}

Connect4 Connect4::apply(Action col) const {
    if (col < 0 || col >= kCols || heights_[col] >= kRows || is_terminal())
        throw IllegalMoveError("connect4: illegal move " + std::to_string(col));
    Connect4 next = *this;
    next.pieces_[ply_ % 2] |= bit(col, heights_[col]);
    ++next.heights_[col];
    ++next.ply_;
    return next;
}

Outcome Connect4::outcome() const {
    if (has_four(pieces_[0])) return Outcome::white_wins();
    if (has_four(pieces_[1])) return Outcome::black_wins();
    if (ply_ < kCols * kRows) throw NotTerminalError("connect4: outcome of a non-terminal position");
    return Outcome::draw();
}

std::string Connect4::to_string() const {
    std::string out;
    for (int r = kRows - 1; r >= 0; --r) {
        for (int c = 0; c < kCols; ++c) {
            const auto b = bit(c, r);
            out += (pieces_[0] & b) ? 'X' : (pieces_[1] & b) ? 'O' : '.';
        }
        if (r > 0) out += '\n';
    }
    return out;
}

Connect4 Connect4::parse(std::string_view text) {
    std::array<std::string, kRows> rows;
    int r = 0;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (r >= kRows) throw ParseError("connect4: too many rows");
        rows[r++] = std::move(cur);
        cur.clear();
    };
    for (char ch : text) {
        if (ch == '\n') flush();
        else if (ch != '\r' && ch != ' ') cur += ch;
    }
    flush();
    if (r != kRows) throw ParseError("connect4: expected 6 rows");

    Connect4 s;
    int xs = 0, os = 0;
    for (int i = 0; i < kRows; ++i) {
        if (rows[i].size() != kCols) throw ParseError("connect4: expected 7 cells per row");
        const int row = kRows - 1 - i;
        for (int c = 0; c < kCols; ++c) {
            const char ch = rows[i][c];
            if (ch == 'X') { s.pieces_[0] |= bit(c, row); ++xs; }
            else if (ch == 'O') { s.pieces_[1] |= bit(c, row); ++os; }
            else if (ch != '.') throw ParseError(std::string("connect4: bad cell character '") + ch + "'");
        }
    }
    for (int c = 0; c < kCols; ++c) {
        int h = 0;
        while (h < kRows && (s.occupied() & bit(c, h))) ++h;
        for (int row = h; row < kRows; ++row)
            if (s.occupied() & bit(c, row)) throw ParseError("connect4: floating piece");
        s.heights_[c] = static_cast<std::uint8_t>(h);
    }
    if (xs != os && xs != os + 1) throw ParseError("connect4: impossible piece counts");
    s.ply_ = xs + os;
    return s;
}

std::string Connect4::action_to_string(Action a) { return std::to_string(a); }

Connect4::Action Connect4::parse_action(std::string_view token) {
    int v = -1;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size() || v < 0 || v >= kCols)
        throw ParseError("connect4: bad move token '" + std::string(token) + "'");
    return v;
}

std::uint64_t Connect4::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t word : {pieces_[0], pieces_[1]}) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace tdleaf::game
