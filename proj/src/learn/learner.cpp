#include "tdleaf/learn/learner.hpp"

#include <algorithm>
#include <cmath>

namespace tdleaf::learn {

std::string_view to_string(Clipping c) {
    switch (c) {
        case Clipping::None: return "none";
        case Clipping::ClipUnlessPredicted: return "clip-unless-predicted";
        case Clipping::ClipUnlessPredictedOrStronger: return "clip-unless-predicted-or-stronger";
    }
    return "none";
}

Clipping parse_clipping(std::string_view text) {
    for (Clipping c : {Clipping::None, Clipping::ClipUnlessPredicted, Clipping::ClipUnlessPredictedOrStronger})
        if (to_string(c) == text) return c;
    throw std::invalid_argument("unknown clipping policy '" + std::string(text) + "'");
}

double AlphaSchedule::at(int game_index) const {
    if (kind == Kind::Constant) return value;
    return std::max(floor, value / (1.0 + static_cast<double>(game_index) / horizon));
}

double LearnerConfig::lambda_at(int game_index) const {
    for (const auto& stage : lambda_schedule)
        if (game_index < stage.until_game) return stage.lambda;
    return lambda;
}

void LearnerConfig::validate() const {
    auto check_lambda = [](double l) {
        if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    };
    check_lambda(lambda);
    for (const auto& s : lambda_schedule) check_lambda(s.lambda);
    if (!(alpha.value > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (alpha.kind == AlphaSchedule::Kind::InverseDecay) {
        if (!(alpha.horizon > 0.0)) throw std::invalid_argument("alpha horizon must be positive");
        if (!(alpha.floor > 0.0)) throw std::invalid_argument("alpha floor must be positive");
    }
    if (!(squash.beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (update_every_n_games < 1) throw std::invalid_argument("update_every_n_games must be at least 1");
}

void GameTrace::set_outcome(game::Outcome r) {
    if (outcome) throw TraceError("trace outcome already set");
    outcome = r;
}

std::vector<double> clipped_differences(std::span<const double> values, double reward,
                                        std::span<const StepFlags> flags, Clipping clipping) {
    if (!flags.empty() && flags.size() != values.size()) throw TraceError("one flag set per step is required");
    std::vector<double> d(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) {
        const double next = t + 1 < values.size() ? values[t + 1] : reward;
        d[t] = next - values[t];
        if (d[t] <= 0.0 || clipping == Clipping::None) continue;
        const StepFlags f = flags.empty() ? StepFlags{} : flags[t];
        const bool clip = clipping == Clipping::ClipUnlessPredicted
                              ? !f.opponent_move_predicted
                              : !f.opponent_move_predicted && f.opponent_rating_lower;
        if (clip) d[t] = 0.0;
    }
    return d;
}

std::vector<double> discounted_difference_sums(std::span<const double> d, double lambda) {
    std::vector<double> s(d.size());
    double acc = 0.0;
    for (std::size_t i = d.size(); i-- > 0;) {
        acc = d[i] + lambda * acc;
        s[i] = acc;
    }
    return s;
}

namespace {

struct AgentView {
    std::vector<double> values;
    std::vector<StepFlags> flags;
    double reward = 0.0;
};

AgentView agent_view(const GameTrace& trace) {
    if (!trace.outcome) throw TraceError("trace has no outcome");
    if (trace.steps.empty()) throw TraceError("trace has no steps");
    const double sign = game::sign_of(trace.agent);
    AgentView v;
    v.reward = trace.outcome->for_side(trace.agent);
    for (const auto& s : trace.steps) {
        v.values.push_back(sign * s.value);
        v.flags.push_back({s.opponent_move_predicted, s.opponent_rating_lower});
    }
    return v;
}

// alpha * sum_t grad_t * S_t
std::vector<double> accumulate(std::span<const std::vector<double>> grads, std::span<const double> sums, double alpha,
                               std::size_t k) {
    std::vector<double> delta(k, 0.0);
    for (std::size_t t = 0; t < grads.size(); ++t) {
        if (grads[t].empty()) continue;
        for (std::size_t i = 0; i < k; ++i) delta[i] += grads[t][i] * sums[t];
    }
    for (auto& x : delta) x *= alpha;
    return delta;
}

}  // namespace

std::vector<TemporalDifference> temporal_differences(const GameTrace& trace, const LearnerConfig& cfg) {
    const AgentView v = agent_view(trace);
    const auto d = clipped_differences(v.values, v.reward, v.flags, cfg.clipping);
    std::vector<TemporalDifference> out(d.size());
    for (std::size_t t = 0; t < d.size(); ++t) out[t] = {static_cast<int>(t), d[t]};
    return out;
}

std::vector<double> td_update(std::span<const eval::FeatureVector> roots, std::span<const StepFlags> flags,
                              double reward, const LearnerConfig& cfg, const eval::WeightVector& w, int game_index) {
    std::vector<double> values;
    std::vector<std::vector<double>> grads;
    for (const auto& phi : roots) {
        values.push_back(eval::squash(eval::raw_eval(phi, w), cfg.squash));
        grads.push_back(eval::grad_squashed(phi, w, cfg.squash));
    }
    const auto d = clipped_differences(values, reward, flags, cfg.clipping);
    const auto sums = discounted_difference_sums(d, cfg.lambda_at(game_index));
    return accumulate(grads, sums, cfg.alpha.at(game_index), w.size());
}

std::vector<double> tdleaf_delta(const GameTrace& trace, const LearnerConfig& cfg, const eval::WeightVector& w) {
    const AgentView v = agent_view(trace);
    const double sign = game::sign_of(trace.agent);
    std::vector<std::vector<double>> grads;
    grads.reserve(trace.steps.size());
    for (const auto& s : trace.steps) {
        if (s.leaf_terminal) {
            grads.emplace_back();
            continue;
        }
        const auto phi = sign > 0 ? s.leaf_features : s.leaf_features.negated();
        grads.push_back(eval::grad_squashed(phi, w, cfg.squash));
    }
    const auto d = clipped_differences(v.values, v.reward, v.flags, cfg.clipping);
    const auto sums = discounted_difference_sums(d, cfg.lambda_at(trace.game_index));
    return accumulate(grads, sums, cfg.alpha.at(trace.game_index), w.size());
}

eval::WeightVector tdleaf_update(const GameTrace& trace, const LearnerConfig& cfg, eval::WeightVector w) {
    const auto delta = tdleaf_delta(trace, cfg, w);
    w.add(delta);
    return w;
}

eval::WeightVector apply_batch(std::span<const GameTrace> traces, const LearnerConfig& cfg, eval::WeightVector w) {
    std::vector<double> total(w.size(), 0.0);
    for (const auto& trace : traces) {
        const auto delta = tdleaf_delta(trace, cfg, w);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += delta[i];
    }
    w.add(total);
    return w;
}

}  // namespace tdleaf::learn
