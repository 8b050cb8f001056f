#include "wmc/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace wmc::evaluate {

SteadyComparison compare_steady(std::span<const double> forecast, const markov::StationaryDistribution& stationary) {
    if (forecast.size() != stationary.probabilities.size())
        throw Error(ErrorKind::invalid_input, "forecast and stationary distributions have different class counts");
    SteadyComparison out;
    out.forecast.assign(forecast.begin(), forecast.end());
    out.stationary = stationary.probabilities;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        const double diff = forecast[i] - stationary.probabilities[i];
        out.difference.push_back(diff);
        out.max_abs_difference = std::max(out.max_abs_difference, std::abs(diff));
    }
    return out;
}

namespace {

struct FittedState {
    markov::TransitionMatrixSet matrices;
    agreement::LagWeightProfile weights;
    markov::TransitionMatrixSet lag1;
    agreement::LagWeightProfile lag1_weights;
};

FittedState fit(const ClassSequence& train, const BacktestConfig& config) {
    markov::TransitionMatrixSet matrices = markov::estimate_transitions(train, config.max_lag, config.transitions);
    agreement::LagWeightProfile weights = agreement::weight_profile(train, config.max_lag, config.weight_basis);
    markov::TransitionMatrixSet lag1(matrices.class_count(), {matrices.at_lag(1)}, matrices.class_frequencies());
    const std::vector<std::optional<double>> unit{1.0};
    return FittedState{std::move(matrices), std::move(weights), std::move(lag1), agreement::profile_from_kappas(unit)};
}

} // namespace

BacktestReport backtest(const ClassSequence& seq, const BacktestConfig& config) {
    if (config.max_lag < 1) throw Error(ErrorKind::invalid_input, "max_lag must be at least 1");
    if (config.holdout < 1) throw Error(ErrorKind::invalid_input, "holdout must be at least 1 month");
    if (config.holdout >= seq.size())
        throw Error(ErrorKind::insufficient_data,
                    "holdout of " + std::to_string(config.holdout) + " months leaves no training data (sequence has " +
                        std::to_string(seq.size()) + " months)");

    const std::size_t d = seq.class_count();
    const std::size_t first_origin = seq.size() - config.holdout;
    const std::size_t min_train = config.min_train_factor * static_cast<std::size_t>(config.max_lag);
    {
        const std::size_t available = seq.slice(0, first_origin).valid_count();
        if (available < min_train)
            throw Error(ErrorKind::insufficient_data,
                        "training window before " + seq.period(first_origin).to_string() + " has " +
                            std::to_string(available) + " non-missing months; need at least " +
                            std::to_string(min_train) + " (" + std::to_string(config.min_train_factor) +
                            " x max_lag)");
    }
    const std::size_t neutral = config.forecast.neutral_index.value_or((d - 1) / 2);

    BacktestReport report;
    report.station_id = seq.station_id();
    report.class_count = d;
    report.confusion.assign(d, std::vector<std::size_t>(d, 0));

    std::optional<FittedState> state;
    if (!config.refit) state = fit(seq.slice(0, first_origin), config);

    std::size_t hits_wmc = 0;
    std::size_t hits_lag1 = 0;
    std::size_t hits_clim = 0;
    for (std::size_t origin = first_origin; origin < seq.size(); ++origin) {
        const YearMonth when = seq.period(origin);
        if (!seq[origin]) {
            report.skipped.push_back({when, "observed class is missing"});
            continue;
        }
        const ClassSequence train = seq.slice(0, origin);
        if (config.refit) state = fit(train, config);

        const auto history = forecast::tail(train, static_cast<std::size_t>(config.max_lag));
        FoldRecord fold;
        fold.origin = when;
        fold.observed = *seq[origin];
        try {
            fold.distribution = forecast::predict_one(history, state->matrices, state->weights, config.forecast);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_forecast) throw;
            report.skipped.push_back({when, e.what()});
            continue;
        }
        fold.predicted = fold.distribution.predicted_class;

        // Climatology uses the training frequencies for this fold, even in fixed-fit mode.
        const auto counts = train.class_counts();
        const std::vector<double> freq(counts.begin(), counts.end());
        fold.climatology = forecast::argmax_class(freq, freq, neutral).predicted_class;
        try {
            fold.markov_lag1 =
                forecast::predict_one(history, state->lag1, state->lag1_weights, config.forecast).predicted_class;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::no_forecast) throw;
            fold.markov_lag1 = fold.climatology;
        }

        hits_wmc += fold.predicted == fold.observed ? 1 : 0;
        hits_lag1 += fold.markov_lag1 == fold.observed ? 1 : 0;
        hits_clim += fold.climatology == fold.observed ? 1 : 0;
        ++report.confusion[fold.observed.index()][fold.predicted.index()];
        report.folds.push_back(std::move(fold));
    }

    if (report.folds.empty())
        throw Error(ErrorKind::insufficient_data, "every backtest fold was skipped");
    const double n = static_cast<double>(report.folds.size());
    report.hit_rate = static_cast<double>(hits_wmc) / n;
    report.baseline_hit_rates[method_wmc] = report.hit_rate;
    report.baseline_hit_rates[method_markov_lag1] = static_cast<double>(hits_lag1) / n;
    report.baseline_hit_rates[method_climatology] = static_cast<double>(hits_clim) / n;

    const FoldRecord& last = report.folds.back();
    const auto last_origin = static_cast<std::size_t>(last.origin.ordinal() - seq.start().ordinal());
    const FittedState last_state = config.refit ? fit(seq.slice(0, last_origin), config) : *state;
    try {
        const auto pi = markov::stationary(last_state.matrices);
        report.steady_state_comparison = compare_steady(last.distribution.probabilities, pi);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::no_unique_stationary && e.kind() != ErrorKind::insufficient_data) throw;
    }
    return report;
}

} // namespace wmc::evaluate
