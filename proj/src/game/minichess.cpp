#include "tdleaf/game/minichess.hpp"

#include <cstdlib>
#include <sstream>

namespace tdleaf::game {

namespace {

struct Step {
    int df, dr;
};

constexpr std::array<Step, 8> kKnightSteps{{{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
constexpr std::array<Step, 8> kKingSteps{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<Step, 4> kRookSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Step, 4> kBishopSteps{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

constexpr bool on_board(int f, int r) { return f >= 0 && f < Minichess::kSize && r >= 0 && r < Minichess::kSize; }

constexpr int owner_sign(Color c) { return c == Color::White ? 1 : -1; }

bool belongs_to(std::int8_t piece, Color c) { return c == Color::White ? piece > 0 : piece < 0; }

constexpr char kPieceChars[] = " pnbrqk";

}  // namespace

Minichess Minichess::initial() {
    Minichess s;
    constexpr std::array<PieceType, 5> back{Rook, Knight, Bishop, Queen, King};
    for (int f = 0; f < kSize; ++f) {
        s.board_[square(f, 0)] = back[f];
        s.board_[square(f, 1)] = Pawn;
        s.board_[square(f, 3)] = static_cast<std::int8_t>(-Pawn);
        s.board_[square(f, 4)] = static_cast<std::int8_t>(-back[f]);
    }
    return s;
}

template <typename F>
void Minichess::for_each_pseudo_move(Color c, F&& f) const {
    const int sign = owner_sign(c);
    for (int from = 0; from < kSquares; ++from) {
        const std::int8_t piece = board_[from];
        if (!belongs_to(piece, c)) continue;
        const int pf = file_of(from), pr = rank_of(from);
        auto target_ok = [&](int to) { return !belongs_to(board_[to], c); };
        auto emit = [&](int to) { f(Move{static_cast<std::uint8_t>(from), static_cast<std::uint8_t>(to)}); };
        auto leap = [&](const auto& steps) {
            for (const auto& s : steps) {
                const int nf = pf + s.df, nr = pr + s.dr;
                if (!on_board(nf, nr)) continue;
                const int to = square(nf, nr);
                if (target_ok(to)) emit(to);
            }
        };
        auto slide = [&](const auto& steps) {
            for (const auto& s : steps) {
                int nf = pf + s.df, nr = pr + s.dr;
                while (on_board(nf, nr)) {
                    const int to = square(nf, nr);
                    if (board_[to] == None) {
                        emit(to);
                    } else {
                        if (target_ok(to)) emit(to);
                        break;
                    }
                    nf += s.df;
                    nr += s.dr;
                }
            }
        };
        switch (std::abs(piece)) {
            case Pawn: {
                const int nr = pr + sign;
                if (nr < 0 || nr >= kSize) break;
                if (board_[square(pf, nr)] == None) emit(square(pf, nr));
                for (int df : {-1, 1}) {
                    const int nf = pf + df;
                    if (!on_board(nf, nr)) continue;
                    const std::int8_t victim = board_[square(nf, nr)];
                    if (victim != None && !belongs_to(victim, c)) emit(square(nf, nr));
                }
                break;
            }
            case Knight: leap(kKnightSteps); break;
            case King: leap(kKingSteps); break;
            case Bishop: slide(kBishopSteps); break;
            case Rook: slide(kRookSteps); break;
            case Queen:
                slide(kRookSteps);
                slide(kBishopSteps);
                break;
            default: break;
        }
    }
}

bool Minichess::attacked(int sq, Color by) const {
    const int sign = owner_sign(by);
    const int f = file_of(sq), r = rank_of(sq);
    // Pawns of `by` attack diagonally forward, so look one rank behind sq.
    for (int df : {-1, 1}) {
        const int pf = f + df, pr = r - sign;
        if (on_board(pf, pr) && board_[square(pf, pr)] == sign * Pawn) return true;
    }
    for (const auto& s : kKnightSteps) {
        const int nf = f + s.df, nr = r + s.dr;
        if (on_board(nf, nr) && board_[square(nf, nr)] == sign * Knight) return true;
    }
    for (const auto& s : kKingSteps) {
        const int nf = f + s.df, nr = r + s.dr;
        if (on_board(nf, nr) && board_[square(nf, nr)] == sign * King) return true;
    }
    auto ray_hits = [&](const auto& steps, PieceType slider) {
        for (const auto& s : steps) {
            int nf = f + s.df, nr = r + s.dr;
            while (on_board(nf, nr)) {
                const std::int8_t p = board_[square(nf, nr)];
                if (p != None) {
                    if (p == sign * slider || p == sign * Queen) return true;
                    break;
                }
                nf += s.df;
                nr += s.dr;
            }
        }
        return false;
    };
    return ray_hits(kRookSteps, Rook) || ray_hits(kBishopSteps, Bishop);
}

int Minichess::king_square(Color c) const {
    const std::int8_t k = static_cast<std::int8_t>(owner_sign(c) * King);
    for (int sq = 0; sq < kSquares; ++sq)
        if (board_[sq] == k) return sq;
    return -1;
}

bool Minichess::in_check(Color c) const {
    const int k = king_square(c);
    return k >= 0 && attacked(k, opposite(c));
}

Minichess Minichess::make(Move m) const {
    Minichess next = *this;
    std::int8_t piece = board_[m.from];
    const int last_rank = side_ == Color::White ? kSize - 1 : 0;
    if (std::abs(piece) == Pawn && rank_of(m.to) == last_rank)
        piece = static_cast<std::int8_t>(owner_sign(side_) * Queen);
    next.board_[m.to] = piece;
    next.board_[m.from] = None;
    next.side_ = opposite(side_);
    ++next.ply_;
    return next;
}

bool Minichess::leaves_king_safe(Move m) const { return !make(m).in_check(side_); }

bool Minichess::has_legal_move() const {
    bool found = false;
    // No early exit from the generator; positions are small enough.
    for_each_pseudo_move(side_, [&](Move m) {
        if (!found && leaves_king_safe(m)) found = true;
    });
    return found;
}

std::vector<Minichess::Action> Minichess::legal_actions() const {
    std::vector<Action> out;
    if (ply_ >= kMaxPly) return out;
    for_each_pseudo_move(side_, [&](Move m) {
        if (leaves_king_safe(m)) out.push_back(m);
    });
    return out;
}

bool Minichess::is_terminal() const { return ply_ >= kMaxPly || !has_legal_move(); }

Minichess Minichess::apply(Action m) const {
    if (m.from >= kSquares || m.to >= kSquares || ply_ >= kMaxPly)
        throw IllegalMoveError("minichess: illegal move " + action_to_string(m));
    bool pseudo = false;
    for_each_pseudo_move(side_, [&](Move p) { pseudo = pseudo || p == m; });
    if (!pseudo || !leaves_king_safe(m))
        throw IllegalMoveError("minichess: illegal move " + action_to_string(m));
    return make(m);
}

Outcome Minichess::outcome() const {
    if (!has_legal_move()) {
        if (!in_check(side_)) return Outcome::draw();
        return side_ == Color::White ? Outcome::black_wins() : Outcome::white_wins();
    }
    if (ply_ >= kMaxPly) return Outcome::draw();
    throw NotTerminalError("minichess: outcome of a non-terminal position");
}

int Minichess::count(Color c, PieceType t) const {
    const std::int8_t code = static_cast<std::int8_t>(owner_sign(c) * t);
    int n = 0;
    for (auto p : board_) n += (p == code);
    return n;
}

int Minichess::pseudo_move_count(Color c) const {
    int n = 0;
    for_each_pseudo_move(c, [&](Move) { ++n; });
    return n;
}

int Minichess::king_exposure(Color c) const {
    const int k = king_square(c);
    if (k < 0) return 0;
    const Color them = opposite(c);
    int n = attacked(k, them) ? 1 : 0;
    for (const auto& s : kKingSteps) {
        const int nf = file_of(k) + s.df, nr = rank_of(k) + s.dr;
        if (on_board(nf, nr) && attacked(square(nf, nr), them)) ++n;
    }
    return n;
}

std::string Minichess::to_string() const {
    std::string out;
    for (int r = kSize - 1; r >= 0; --r) {
        int empty = 0;
        for (int f = 0; f < kSize; ++f) {
            const std::int8_t p = board_[square(f, r)];
            if (p == None) {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty);
            empty = 0;
            const char ch = kPieceChars[std::abs(p)];
            out += p > 0 ? static_cast<char>(ch - 'a' + 'A') : ch;
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (r > 0) out += '/';
    }
    out += side_ == Color::White ? " w " : " b ";
    out += std::to_string(ply_);
    return out;
}

Minichess Minichess::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string placement, side;
    long long ply = -1;
    if (!(in >> placement >> side >> ply)) throw ParseError("minichess: expected '<placement> <w|b> <ply>'");
    std::string rest;
    if (in >> rest) throw ParseError("minichess: trailing text '" + rest + "'");

    Minichess s;
    int r = kSize - 1, f = 0;
    for (char ch : placement) {
        if (ch == '/') {
            if (f != kSize) throw ParseError("minichess: rank with wrong width");
            --r;
            f = 0;
            if (r < 0) throw ParseError("minichess: too many ranks");
            continue;
        }
        if (ch >= '1' && ch <= '5') {
            f += ch - '0';
            if (f > kSize) throw ParseError("minichess: rank with wrong width");
            continue;
        }
        const char lower = (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
        int type = 0;
        for (int t = Pawn; t <= King; ++t)
            if (kPieceChars[t] == lower) type = t;
        if (type == 0) throw ParseError(std::string("minichess: bad piece character '") + ch + "'");
        if (f >= kSize || r < 0) throw ParseError("minichess: rank with wrong width");
        s.board_[square(f, r)] = static_cast<std::int8_t>(lower == ch ? -type : type);
        ++f;
    }
    if (r != 0 || f != kSize) throw ParseError("minichess: expected 5 ranks of 5 squares");

    if (side == "w") s.side_ = Color::White;
    else if (side == "b") s.side_ = Color::Black;
    else throw ParseError("minichess: side to move must be 'w' or 'b'");
    if (ply < 0 || ply > kMaxPly) throw ParseError("minichess: ply counter out of range");
    if ((ply % 2 == 0) != (s.side_ == Color::White)) throw ParseError("minichess: ply parity disagrees with side to move");
    s.ply_ = static_cast<int>(ply);

    if (s.count(Color::White, King) != 1 || s.count(Color::Black, King) != 1)
        throw ParseError("minichess: each side needs exactly one king");
    for (int file = 0; file < kSize; ++file) {
        if (s.board_[square(file, kSize - 1)] == Pawn || s.board_[square(file, 0)] == -Pawn)
            throw ParseError("minichess: unpromoted pawn on its last rank");
    }
    if (s.in_check(opposite(s.side_))) throw ParseError("minichess: side not to move is in check");
    return s;
}

std::string Minichess::action_to_string(Action m) {
    std::string out;
    for (int sq : {int{m.from}, int{m.to}}) {
        out += static_cast<char>('a' + file_of(sq));
        out += static_cast<char>('1' + rank_of(sq));
    }
    return out;
}

Minichess::Action Minichess::parse_action(std::string_view token) {
    if (token.size() == 5 && (token[4] == 'q' || token[4] == 'Q')) token.remove_suffix(1);
    auto coord = [&](std::size_t i) {
        const char f = token[i], r = token[i + 1];
        if (f < 'a' || f > 'e' || r < '1' || r > '5')
            throw ParseError("minichess: bad move token '" + std::string(token) + "'");
        return square(f - 'a', r - '1');
    };
    if (token.size() != 4) throw ParseError("minichess: bad move token '" + std::string(token) + "'");
    return Move{static_cast<std::uint8_t>(coord(0)), static_cast<std::uint8_t>(coord(2))};
}

std::uint64_t Minichess::hash() const { return fnv1a(to_string()); }

}  // namespace tdleaf::game
