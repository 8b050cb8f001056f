#include "wmc/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wmc::forecast {

std::string_view to_string(LagStatus status) noexcept {
    switch (status) {
    case LagStatus::used: return "used";
    case LagStatus::zero_weight: return "zero-weight";
    case LagStatus::history_too_short: return "history-too-short";
    case LagStatus::missing_state: return "missing-state";
    case LagStatus::unsupported_row: return "unsupported-row";
    }
    return "unknown";
}

std::string_view to_string(IterationMode mode) noexcept {
    return mode == IterationMode::point ? "point" : "distribution";
}

ArgmaxDecision argmax_class(std::span<const double> probabilities, std::span<const double> class_frequencies,
                            std::size_t neutral_index) {
    if (probabilities.empty()) throw Error(ErrorKind::invalid_input, "empty probability vector");
    const double best = *std::max_element(probabilities.begin(), probabilities.end());
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        if (probabilities[i] >= best - tie_tolerance) tied.push_back(i);

    ArgmaxDecision out;
    for (std::size_t i : tied) out.tied_classes.push_back(DroughtClass::from_index(i));
    out.tie_break_applied = tied.size() > 1;

    const auto frequency = [&](std::size_t i) { return i < class_frequencies.size() ? class_frequencies[i] : 0.0; };
    const auto distance = [&](std::size_t i) { return i > neutral_index ? i - neutral_index : neutral_index - i; };
    const std::size_t winner = *std::min_element(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) {
        if (frequency(a) != frequency(b)) return frequency(a) > frequency(b);
        if (distance(a) != distance(b)) return distance(a) < distance(b);
        return a < b;
    });
    out.predicted_class = DroughtClass::from_index(winner);
    return out;
}

namespace {

std::size_t resolve_neutral(const ForecastOptions& options, std::size_t class_count) {
    const std::size_t n = options.neutral_index.value_or((class_count - 1) / 2);
    if (n >= class_count) throw Error(ErrorKind::invalid_input, "neutral class index out of range");
    return n;
}

void decide(ForecastDistribution& out, const markov::TransitionMatrixSet& matrices, std::size_t neutral) {
    const ArgmaxDecision decision = argmax_class(out.probabilities, matrices.class_frequencies(), neutral);
    out.predicted_class = decision.predicted_class;
    out.tie_break_applied = decision.tie_break_applied;
    out.trace.tied_classes = decision.tied_classes;
    out.trace.weighted_sum = out.probabilities;
}

} // namespace

ForecastDistribution predict_one(std::span<const std::optional<DroughtClass>> history,
                                 const markov::TransitionMatrixSet& matrices,
                                 const agreement::LagWeightProfile& weights, const ForecastOptions& options) {
    if (history.empty()) throw Error(ErrorKind::invalid_input, "forecast history is empty");
    if (weights.max_lag() != matrices.max_lag())
        throw Error(ErrorKind::invalid_input, "weight profile and transition matrices disagree on the number of lags");
    const std::size_t d = matrices.class_count();
    const std::size_t neutral = resolve_neutral(options, d);

    ForecastDistribution out;
    double kept_weight = 0.0;
    std::size_t supported = 0;
    for (int t = 1; t <= matrices.max_lag(); ++t) {
        TraceRecord rec;
        rec.lag = t;
        rec.weight = weights.weight(t);
        const auto back = static_cast<std::size_t>(t);
        if (back > history.size()) {
            rec.status = LagStatus::history_too_short;
        } else if (!history[history.size() - back]) {
            rec.status = LagStatus::missing_state;
        } else {
            rec.source_state = history[history.size() - back];
            if (rec.source_state->rank < 1 || rec.source_state->index() >= d)
                throw Error(ErrorKind::invalid_input, "history class outside the matrix dimension");
            const markov::LagMatrix& m = matrices.at_lag(t);
            if (!m.supported(rec.source_state->index())) {
                rec.status = LagStatus::unsupported_row;
            } else {
                ++supported;
                const auto row = m.row(rec.source_state->index());
                rec.row.assign(row.data(), row.data() + row.size());
                rec.status = rec.weight > 0.0 ? LagStatus::used : LagStatus::zero_weight;
                if (rec.status == LagStatus::used) kept_weight += rec.weight;
            }
        }
        if (rec.status != LagStatus::used && rec.status != LagStatus::zero_weight && rec.weight > 0.0)
            out.renormalized = true;
        out.trace.records.push_back(std::move(rec));
    }
    if (supported == 0)
        throw Error(ErrorKind::no_forecast, "no lag has an observed transition row for the recent states");

    // Every remaining lag has zero weight: spread evenly over the lags that have rows.
    if (!(kept_weight > 0.0)) {
        out.renormalized = true;
        for (auto& rec : out.trace.records) {
            if (rec.status == LagStatus::zero_weight) {
                rec.status = LagStatus::used;
                rec.weight = 0.0;
                rec.effective_weight = 1.0 / static_cast<double>(supported);
            }
        }
    } else {
        for (auto& rec : out.trace.records)
            if (rec.status == LagStatus::used)
                rec.effective_weight = out.renormalized ? rec.weight / kept_weight : rec.weight;
    }

    out.probabilities.assign(d, 0.0);
    for (const auto& rec : out.trace.records) {
        if (rec.status != LagStatus::used) continue;
        out.used_lags.push_back(rec.lag);
        for (std::size_t j = 0; j < d; ++j) out.probabilities[j] += rec.effective_weight * rec.row[j];
    }
    decide(out, matrices, neutral);
    return out;
}

ForecastDistribution predict_one(std::span<const DroughtClass> history, const markov::TransitionMatrixSet& matrices,
                                 const agreement::LagWeightProfile& weights, const ForecastOptions& options) {
    const std::vector<std::optional<DroughtClass>> h(history.begin(), history.end());
    return predict_one(std::span<const std::optional<DroughtClass>>(h), matrices, weights, options);
}

std::vector<ForecastDistribution> predict_iterated(std::span<const std::optional<DroughtClass>> history,
                                                   const markov::TransitionMatrixSet& matrices,
                                                   const agreement::LagWeightProfile& weights, int horizon,
                                                   IterationMode mode, const ForecastOptions& options) {
    if (horizon < 1) throw Error(ErrorKind::invalid_input, "horizon must be at least 1");
    std::vector<ForecastDistribution> out;
    out.reserve(static_cast<std::size_t>(horizon));
    std::vector<std::optional<DroughtClass>> h(history.begin(), history.end());

    out.push_back(predict_one(h, matrices, weights, options));
    const std::size_t d = matrices.class_count();
    const std::size_t neutral = resolve_neutral(options, d);
    for (int step = 2; step <= horizon; ++step) {
        if (mode == IterationMode::point) {
            h.push_back(out.back().predicted_class);
            out.push_back(predict_one(h, matrices, weights, options));
            continue;
        }
        const markov::LagMatrix& one = matrices.at_lag(1);
        ForecastDistribution next;
        next.probabilities.assign(d, 0.0);
        const auto& prev = out.back().probabilities;
        double lost = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (prev[i] == 0.0) continue;
            if (!one.supported(i)) {
                lost += prev[i];
                continue;
            }
            for (std::size_t j = 0; j < d; ++j)
                next.probabilities[j] += prev[i] * one.probabilities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const double total = 1.0 - lost;
        if (!(total > 0.0)) throw Error(ErrorKind::no_forecast, "forecast mass left the supported states");
        if (lost > 0.0) {
            next.renormalized = true;
            for (double& p : next.probabilities) p /= total;
        }
        next.used_lags = {1};
        decide(next, matrices, neutral);
        out.push_back(std::move(next));
    }
    return out;
}

std::vector<std::optional<DroughtClass>> tail(const ClassSequence& seq, std::size_t count) {
    const std::size_t n = std::min(count, seq.size());
    return {seq.values().end() - static_cast<std::ptrdiff_t>(n), seq.values().end()};
}

} // namespace wmc::forecast
