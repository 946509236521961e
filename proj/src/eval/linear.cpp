#include "tdleaf/eval/linear.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace tdleaf::eval {

FeatureVector FeatureVector::negated() const {
    FeatureVector out = *this;
    for (auto& v : out.values) v = -v;
    return out;
}

WeightVector::WeightVector(std::vector<double> values, std::vector<Anchor> anchors)
    : values_(std::move(values)), anchors_(std::move(anchors)) {
    for (const auto& a : anchors_) {
        if (a.index >= values_.size()) throw DimensionError("anchor index out of range");
        values_[a.index] = a.value;
    }
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("weights must be finite");
}

bool WeightVector::anchored(std::size_t i) const {
    return std::any_of(anchors_.begin(), anchors_.end(), [i](const Anchor& a) { return a.index == i; });
}

void WeightVector::add(std::span<const double> delta) {
    if (delta.size() != values_.size()) throw DimensionError("weight delta has wrong dimension");
    std::vector<double> next = values_;
    for (std::size_t i = 0; i < next.size(); ++i) {
        if (anchored(i)) continue;
        next[i] += delta[i];
        if (!std::isfinite(next[i])) throw std::domain_error("weight update produced a non-finite value");
    }
    values_ = std::move(next);
}

SquashConfig SquashConfig::calibrated(double unit) {
    if (!(unit > 0)) throw std::invalid_argument("squash calibration unit must be positive");
    return {std::atanh(0.25) / unit, true};
}

double raw_eval(const FeatureVector& phi, const WeightVector& w) {
    if (phi.size() != w.size()) throw DimensionError("feature and weight dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) sum += w[i] * phi[i];
    return sum;
}

double squash(double j, const SquashConfig& cfg) { return cfg.enabled ? std::tanh(cfg.beta * j) : j; }

std::vector<double> grad_squashed(const FeatureVector& phi, const WeightVector& w, const SquashConfig& cfg) {
    const double v = squash(raw_eval(phi, w), cfg);
    const double scale = cfg.enabled ? cfg.beta * (1.0 - v * v) : 1.0;
    std::vector<double> g(phi.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = w.anchored(i) ? 0.0 : scale * phi[i];
    return g;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last) throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

namespace {

std::size_t parse_index(std::string_view text) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw std::invalid_argument("not an index: '" + std::string(text) + "'");
    return v;
}

constexpr std::string_view kMagic = "# tdleaf-weights";

}  // namespace

void write_snapshot(std::ostream& out, const Snapshot& snap) {
    const auto& w = snap.weights;
    if (snap.names.size() != w.size()) throw DimensionError("snapshot names and weights differ in length");
    out << kMagic << " game=" << snap.game << " k=" << w.size() << " anchors=";
    for (std::size_t i = 0; i < w.anchors().size(); ++i) {
        if (i) out << ';';
        out << w.anchors()[i].index << ':' << format_double(w.anchors()[i].value);
    }
    out << '\n';
    for (std::size_t i = 0; i < w.size(); ++i) out << i << ',' << snap.names[i] << ',' << format_double(w[i]) << '\n';
}

std::string snapshot_text(const Snapshot& snap) {
    std::ostringstream out;
    write_snapshot(out, snap);
    return out.str();
}

Snapshot read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind(kMagic, 0) != 0)
        throw std::invalid_argument("weight snapshot: missing header");
    Snapshot snap;
    std::size_t k = 0;
    bool have_k = false;
    std::vector<Anchor> anchors;
    std::istringstream fields(header.substr(kMagic.size()));
    std::string field;
    while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("weight snapshot: bad header field '" + field + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "game") {
            snap.game = value;
        } else if (key == "k") {
            k = parse_index(value);
            have_k = true;
        } else if (key == "anchors") {
            std::string_view rest = value;
            while (!rest.empty()) {
                const auto semi = rest.find(';');
                const auto item = rest.substr(0, semi);
                const auto colon = item.find(':');
                if (colon == std::string_view::npos) throw std::invalid_argument("weight snapshot: bad anchor");
                anchors.push_back({parse_index(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
                rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
            }
        } else {
            throw std::invalid_argument("weight snapshot: unknown header field '" + key + "'");
        }
    }
    if (!have_k) throw std::invalid_argument("weight snapshot: header lacks k");

    std::vector<double> values(k, 0.0);
    snap.names.assign(k, {});
    std::vector<bool> seen(k, false);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        if (c1 == std::string::npos || c1 == c2) throw std::invalid_argument("weight snapshot: bad line '" + line + "'");
        const std::size_t i = parse_index(std::string_view(line).substr(0, c1));
        if (i >= k || seen[i]) throw std::invalid_argument("weight snapshot: bad or repeated index");
        seen[i] = true;
        snap.names[i] = line.substr(c1 + 1, c2 - c1 - 1);
        values[i] = parse_double(std::string_view(line).substr(c2 + 1));
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw std::invalid_argument("weight snapshot: missing weights");
    // Anchored entries must already hold their pinned value.
    for (const auto& a : anchors)
        if (a.index >= k || values[a.index] != a.value) throw std::invalid_argument("weight snapshot: anchor mismatch");
    snap.weights = WeightVector(std::move(values), std::move(anchors));
    return snap;
}

}  // namespace tdleaf::eval
