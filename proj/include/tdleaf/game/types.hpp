#pragma once

#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tdleaf::game {

enum class Color : std::uint8_t { White, Black };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

/// +1 for White, -1 for Black. Used to move values between the White
/// frame and a side-relative frame.
constexpr double sign_of(Color c) { return c == Color::White ? 1.0 : -1.0; }

std::string_view to_string(Color c);

/// Terminal reward, always stored from White's point of view.
struct Outcome {
    double white_reward = 0.0;

    static constexpr Outcome white_wins() { return {1.0}; }
    static constexpr Outcome black_wins() { return {-1.0}; }
    static constexpr Outcome draw() { return {0.0}; }

    constexpr double for_side(Color c) const { return white_reward * sign_of(c); }

    friend constexpr bool operator==(const Outcome&, const Outcome&) = default;
};

class IllegalMoveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NotTerminalError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// 64-bit FNV-1a, used for position hashes in trace logs and for weight
/// snapshot fingerprints.
std::uint64_t fnv1a(std::string_view bytes);

/// What search needs from a position.
template <typename G>
concept SearchableGame = std::copy_constructible<G> && requires(const G& s, typename G::Action a) {
    { s.legal_actions() } -> std::same_as<std::vector<typename G::Action>>;
    { s.apply(a) } -> std::same_as<G>;
    { s.is_terminal() } -> std::same_as<bool>;
    { s.outcome() } -> std::same_as<Outcome>;
    { s.side_to_move() } -> std::same_as<Color>;
};

/// A complete reference game: playable from a fixed initial position and
/// serializable to text.
template <typename G>
concept Game = SearchableGame<G> && std::equality_comparable<G> &&
    std::equality_comparable<typename G::Action> &&
    requires(const G& s, typename G::Action a, std::string_view text) {
        { G::kName } -> std::convertible_to<std::string_view>;
        { G::initial() } -> std::same_as<G>;
        { s.ply() } -> std::convertible_to<int>;
        { s.hash() } -> std::same_as<std::uint64_t>;
        { s.to_string() } -> std::same_as<std::string>;
        { G::parse(text) } -> std::same_as<G>;
        { G::action_to_string(a) } -> std::same_as<std::string>;
        { G::parse_action(text) } -> std::same_as<typename G::Action>;
    };

/// Plays a move list from the initial position.
template <Game G>
G replay(const std::vector<typename G::Action>& moves, G start = G::initial()) {
    for (const auto& a : moves) start = start.apply(a);
    return start;
}

}  // namespace tdleaf::game
