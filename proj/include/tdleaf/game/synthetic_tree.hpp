#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdleaf/game/types.hpp"

namespace tdleaf::game {

/// Explicit game tree used as a search fixture. Text format:
///
///   node  := [label] '(' node* ')'      internal node
///          | [label ':'] number         leaf with a score
///
/// e.g. "A(B(D(H:3 I:-9) E(J:-5 K:-6)) C(F(L:4 M:2) G(N:-9 O:5)))".
/// Leaf scores are from the point of view of the player to move at the
/// root (White).
class Tree {
  public:
    struct Node {
        std::string label;
        std::optional<double> score;
        std::vector<int> children;
    };

    static std::shared_ptr<const Tree> parse(std::string_view text);

    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(nodes_.size()); }
    /// Index of the node with the given label, or -1.
    int find(std::string_view label) const;
    std::string to_string() const;

  private:
    std::vector<Node> nodes_;  // nodes_[0] is the root
};

/// A position in a Tree. Never terminal; nodes without children are
/// scored by the evaluator. Actions are child ordinals.
class SyntheticTree {
  public:
    using Action = int;

    SyntheticTree(std::shared_ptr<const Tree> tree, int node = 0, int depth = 0)
        : tree_(std::move(tree)), node_(node), depth_(depth) {}

    static SyntheticTree root(std::string_view text) { return SyntheticTree(Tree::parse(text)); }

    std::vector<Action> legal_actions() const;
    SyntheticTree apply(Action child) const;
    bool is_terminal() const { return false; }
    Outcome outcome() const;
    Color side_to_move() const { return depth_ % 2 == 0 ? Color::White : Color::Black; }
    int ply() const { return depth_; }

    int node() const { return node_; }
    const std::string& label() const { return tree_->node(node_).label; }
    /// Leaf score from White's (the root player's) point of view; 0 for
    /// unscored nodes.
    double white_score() const { return tree_->node(node_).score.value_or(0.0); }
    const Tree& tree() const { return *tree_; }

    friend bool operator==(const SyntheticTree& a, const SyntheticTree& b) {
        return a.tree_ == b.tree_ && a.node_ == b.node_ && a.depth_ == b.depth_;
    }

  private:
    std::shared_ptr<const Tree> tree_;
    int node_;
    int depth_;
};

/// Side-to-move-relative evaluator for SyntheticTree positions.
inline double synthetic_eval(const SyntheticTree& s) { return sign_of(s.side_to_move()) * s.white_score(); }

}  // namespace tdleaf::game
