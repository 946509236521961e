#include "tdleaf/game/types.hpp"

namespace tdleaf::game {

std::string_view to_string(Color c) { return c == Color::White ? "white" : "black"; }

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace tdleaf::game
