#include "tdleaf/game/synthetic_tree.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace tdleaf::game {

namespace {

class TreeParser {
  public:
    TreeParser(std::string_view text, std::vector<Tree::Node>& nodes) : text_(text), nodes_(nodes) {}

    void parse_all() {
        parse_node();
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters");
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("tree: " + what + " at offset " + std::to_string(pos_));
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    std::string parse_label() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    double parse_number() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-' ||
                text_[pos_] == '+' || text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            ++pos_;
        double v = 0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        if (*first == '+') ++first;
        auto [p, ec] = std::from_chars(first, last, v);
        if (start == pos_ || ec != std::errc{} || p != last) fail("bad number");
        return v;
    }

    int parse_node() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const int index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        std::string label;
        if (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_') {
            label = parse_label();
            if (peek(':')) {
                ++pos_;
                const double score = parse_number();
                nodes_[index].label = std::move(label);
                nodes_[index].score = score;
                return index;
            }
            if (!peek('(')) fail("expected '(' or ':' after label");
        }
        nodes_[index].label = std::move(label);
        if (peek('(')) {
            ++pos_;
            std::vector<int> children;
            while (!peek(')')) {
                if (pos_ >= text_.size()) fail("unbalanced parentheses");
                children.push_back(parse_node());
            }
            ++pos_;
            nodes_[index].children = std::move(children);
            return index;
        }
        nodes_[index].score = parse_number();
        return index;
    }

    std::string_view text_;
    std::vector<Tree::Node>& nodes_;
    std::size_t pos_ = 0;
};

void print_node(const Tree& t, int i, std::ostringstream& out) {
    const auto& n = t.node(i);
    out << n.label;
    if (n.children.empty()) {
        if (!n.label.empty()) out << ':';
        out << n.score.value_or(0.0);
        return;
    }
    out << '(';
    for (std::size_t c = 0; c < n.children.size(); ++c) {
        if (c) out << ' ';
        print_node(t, n.children[c], out);
    }
    out << ')';
}

}  // namespace

std::shared_ptr<const Tree> Tree::parse(std::string_view text) {
    auto tree = std::make_shared<Tree>();
    TreeParser(text, tree->nodes_).parse_all();
    return tree;
}

int Tree::find(std::string_view label) const {
    for (int i = 0; i < size(); ++i)
        if (nodes_[i].label == label) return i;
    return -1;
}

std::string Tree::to_string() const {
    std::ostringstream out;
    out.precision(17);
    print_node(*this, 0, out);
    return out.str();
}

std::vector<SyntheticTree::Action> SyntheticTree::legal_actions() const {
    std::vector<Action> out(tree_->node(node_).children.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
    return out;
}

SyntheticTree SyntheticTree::apply(Action child) const {
    const auto& kids = tree_->node(node_).children;
    if (child < 0 || child >= static_cast<int>(kids.size()))
        throw IllegalMoveError("tree: no child " + std::to_string(child));
    return SyntheticTree(tree_, kids[static_cast<std::size_t>(child)], depth_ + 1);
}

Outcome SyntheticTree::outcome() const { throw NotTerminalError("tree: synthetic positions are never terminal"); }

}  // namespace tdleaf::game
