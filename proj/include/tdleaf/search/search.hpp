#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tdleaf/game/types.hpp"

namespace tdleaf::search {

using game::SearchableGame;

/// How to pick among equally valued moves.
struct TieBreak {
    enum class Mode { FirstFound, UniformRandom };

    Mode mode = Mode::FirstFound;
    std::uint64_t seed = 0;

    static TieBreak first_found() { return {}; }
    static TieBreak uniform_random(std::uint64_t seed) { return {Mode::UniformRandom, seed}; }
};

/// Magnitude of a decided game inside the tree. Evaluators must stay far
/// below it.
inline constexpr double kMateScore = 1e9;

template <SearchableGame G>
struct SearchResult {
    double value = 0.0;  // side to move at the root
    std::vector<typename G::Action> pv;
    G leaf;
    int depth = 0;
    std::uint64_t nodes = 0;  // leaves scored
};

/// Score of a terminal position for the side to move there, shifted so
/// that nearer wins (and farther losses) are preferred.
template <SearchableGame G>
double terminal_score(const G& s, int distance) {
    const double r = s.outcome().for_side(s.side_to_move());
    if (r > 0) return kMateScore - distance;
    if (r < 0) return -(kMateScore - distance);
    return 0.0;
}

/// The score the search assigned to result.leaf, expressed for the side to
/// move at the root. Equals result.value for every completed search.
template <SearchableGame G, typename Eval>
double leaf_evaluation(const SearchResult<G>& r, const Eval& eval) {
    const int dist = static_cast<int>(r.pv.size());
    const double v = r.leaf.is_terminal() ? terminal_score(r.leaf, dist) : static_cast<double>(eval(r.leaf));
    return dist % 2 == 0 ? v : -v;
}

namespace detail {

template <SearchableGame G, typename Eval>
class Negamax {
  public:
    using Action = typename G::Action;

    Negamax(const Eval& eval, TieBreak tie, bool prune)
        : eval_(eval), tie_(tie), prune_(prune), rng_(tie.seed) {}

    SearchResult<G> run(const G& root, int depth) {
        std::vector<Action> pv;
        constexpr double inf = std::numeric_limits<double>::infinity();
        const double value = search(root, depth, 0, -inf, inf, pv);
        G leaf = root;
        for (const auto& a : pv) leaf = leaf.apply(a);
        return SearchResult<G>{value, std::move(pv), std::move(leaf), depth, nodes_};
    }

  private:
    double score_leaf(const G& s, int dist) {
        ++nodes_;
        if (s.is_terminal()) return terminal_score(s, dist);
        return static_cast<double>(eval_(s));
    }

    // Closed-window alpha-beta: a cutoff needs value > beta, so any
    // returned value equal to a window bound is exact. That keeps tied
    // siblings visible to the tie-breaker.
    double search(const G& s, int depth, int dist, double alpha, double beta, std::vector<Action>& pv) {
        pv.clear();
        if (depth == 0) return score_leaf(s, dist);
        const auto moves = s.legal_actions();
        if (moves.empty()) return score_leaf(s, dist);

        const bool random_ties = tie_.mode == TieBreak::Mode::UniformRandom;
        const double alpha0 = alpha;
        double best = -std::numeric_limits<double>::infinity();
        std::uint64_t ties = 0;
        std::vector<Action> child_pv;
        for (const auto& a : moves) {
            const double v = -search(s.apply(a), depth - 1, dist + 1, -beta, -alpha, child_pv);
            if (v > best) {
                best = v;
                ties = 1;
                adopt(pv, a, child_pv);
                if (prune_) {
                    if (best > alpha) alpha = best;
                    if (best > beta) break;
                }
            } else if (v == best && random_ties && v >= alpha0) {
                ++ties;
                if (std::uniform_int_distribution<std::uint64_t>(0, ties - 1)(rng_) == 0) adopt(pv, a, child_pv);
            }
        }
        return best;
    }

    static void adopt(std::vector<Action>& pv, const Action& a, const std::vector<Action>& tail) {
        pv.clear();
        pv.push_back(a);
        pv.insert(pv.end(), tail.begin(), tail.end());
    }

    const Eval& eval_;
    TieBreak tie_;
    bool prune_;
    std::mt19937_64 rng_;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Full-width fixed-depth minimax (negamax form). eval scores non-terminal
/// leaves for the side to move there; terminal leaves are scored with
/// terminal_score.
template <SearchableGame G, typename Eval>
    requires std::invocable<const Eval&, const G&>
SearchResult<G> minimax(const G& root, int depth, const Eval& eval, TieBreak tie = {}) {
    return detail::Negamax<G, Eval>(eval, tie, false).run(root, depth);
}

/// Alpha-beta search. Same value and, under FirstFound, the same
/// principal variation as minimax.
template <SearchableGame G, typename Eval>
    requires std::invocable<const Eval&, const G&>
SearchResult<G> alphabeta(const G& root, int depth, const Eval& eval, TieBreak tie = {}) {
    return detail::Negamax<G, Eval>(eval, tie, true).run(root, depth);
}

template <SearchableGame G>
const G& pv_leaf(const SearchResult<G>& r) {
    return r.leaf;
}

}  // namespace tdleaf::search
