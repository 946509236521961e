#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdleaf::eval {

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// phi(x): dense features of one position.
struct FeatureVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    FeatureVector negated() const;
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// A weight held at a fixed value for the whole run.
struct Anchor {
    std::size_t index = 0;
    double value = 0.0;
    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Parameters w of the linear evaluator. Anchored entries are pinned: they
/// are set on construction and add() never moves them.
class WeightVector {
  public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> values, std::vector<Anchor> anchors = {});

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    const std::vector<Anchor>& anchors() const { return anchors_; }
    bool anchored(std::size_t i) const;

    /// w += delta on every non-anchored entry.
    void add(std::span<const double> delta);

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

  private:
    std::vector<double> values_;
    std::vector<Anchor> anchors_;
};

/// v = tanh(beta * J). With enabled == false the squash is the identity.
struct SquashConfig {
    double beta = 1.0;
    bool enabled = true;

    /// beta such that a raw evaluation of `unit` squashes to exactly 0.25.
    static SquashConfig calibrated(double unit);
    static SquashConfig identity() { return {1.0, false}; }
};

/// J(x, w) = w . phi(x).
double raw_eval(const FeatureVector& phi, const WeightVector& w);

double squash(double j, const SquashConfig& cfg);

/// Gradient of squash(raw_eval(phi, w)) with respect to w, with zeros at
/// anchored indices.
std::vector<double> grad_squashed(const FeatureVector& phi, const WeightVector& w, const SquashConfig& cfg);

/// 17 significant digits ("%.17g"); parse_double reads it back exactly.
std::string format_double(double v);
double parse_double(std::string_view text);

/// Weight snapshot file: a header line
///   "# tdleaf-weights game=<id> k=<k> anchors=<i>:<v>;..."
/// then one "index,name,value" line per weight.
struct Snapshot {
    std::string game;
    std::vector<std::string> names;
    WeightVector weights;
};

void write_snapshot(std::ostream& out, const Snapshot& snap);
Snapshot read_snapshot(std::istream& in);
std::string snapshot_text(const Snapshot& snap);

}  // namespace tdleaf::eval
