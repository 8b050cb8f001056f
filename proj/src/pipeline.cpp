#include "wmc/pipeline.hpp"

#include <cmath>
#include <future>

namespace wmc::pipeline {

void RunConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorKind::invalid_input, what); };
    if (max_lag && (*max_lag < 1 || *max_lag > 120)) bad("max-lag must be in 1..120");
    if (auto_lag_cap < 2 || auto_lag_cap > 120) bad("auto lag cap must be in 2..120");
    if (!(steady_tolerance >= 0.0) || !std::isfinite(steady_tolerance)) bad("steady-state tolerance must be >= 0");
    if (fit.min_samples < 3) bad("minimum fit sample size must be at least 3");
    if (fit.methods.empty()) bad("at least one estimation method is required");
    if (!(transitions.smoothing_alpha >= 0.0) || !std::isfinite(transitions.smoothing_alpha))
        bad("smoothing alpha must be a finite non-negative number");
    if (horizon < 1 || horizon > 120) bad("horizon must be in 1..120");
    if (holdout < 1) bad("holdout must be at least 1 month");
}

ClassSequence prepare_classes(const io::StationDataset& dataset, const RunConfig& config,
                              std::optional<index::StandardizeResult>* standardized,
                              std::optional<IndexSeries>* index_series) {
    switch (dataset.kind) {
    case io::InputKind::raw_climate: {
        index::StandardizeResult result = index::standardize(dataset.raw(), config.grouping, config.fit);
        ClassSequence seq = classify_series(result.index, config.scheme);
        if (index_series) *index_series = result.index;
        if (standardized) *standardized = std::move(result);
        return seq;
    }
    case io::InputKind::precomputed_index:
        if (index_series) *index_series = dataset.index_series();
        return classify_series(dataset.index_series(), config.scheme);
    case io::InputKind::precomputed_classes:
        if (dataset.classes().class_count() != config.scheme.class_count())
            throw Error(ErrorKind::invalid_input, "class file and scheme disagree on the class count");
        return dataset.classes();
    }
    throw Error(ErrorKind::invalid_input, "unknown input kind");
}

StationResult run_station(const io::StationDataset& dataset, const RunConfig& config) {
    config.validate();
    std::optional<index::StandardizeResult> standardized;
    std::optional<IndexSeries> index_series;
    ClassSequence seq = prepare_classes(dataset, config, &standardized, &index_series);
    if (seq.valid_count() < 2)
        throw Error(ErrorKind::insufficient_data, "station '" + dataset.station_id + "' has fewer than 2 classified months");

    std::optional<int> auto_lag;
    int max_lag = config.max_lag.value_or(1);
    if (!config.max_lag) {
        const auto capped = markov::estimate_transitions(seq, config.auto_lag_cap, config.transitions);
        auto_lag = capped.available_lag_count() >= 2 ? markov::steady_state_lag(capped, config.steady_tolerance) : 1;
        max_lag = *auto_lag;
    }

    markov::TransitionMatrixSet matrices = markov::estimate_transitions(seq, max_lag, config.transitions);
    agreement::LagWeightProfile weights = agreement::weight_profile(seq, max_lag, config.weight_basis);

    forecast::ForecastOptions fopts;
    fopts.neutral_index = config.scheme.neutral_index();
    const auto history = forecast::tail(seq, static_cast<std::size_t>(max_lag));
    auto forecasts = forecast::predict_iterated(history, matrices, weights, config.horizon, config.iteration, fopts);

    std::optional<markov::StationaryDistribution> pi;
    std::optional<evaluate::SteadyComparison> comparison;
    std::string stationary_note;
    try {
        pi = markov::stationary(matrices);
        comparison = evaluate::compare_steady(forecasts.front().probabilities, *pi);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::no_unique_stationary) throw;
        stationary_note = e.what();
    }

    std::optional<evaluate::BacktestReport> backtest;
    std::string backtest_note;
    if (config.run_backtest) {
        evaluate::BacktestConfig bc;
        bc.max_lag = max_lag;
        bc.weight_basis = config.weight_basis;
        bc.holdout = config.holdout;
        bc.refit = config.refit;
        bc.transitions = config.transitions;
        bc.forecast = fopts;
        try {
            backtest = evaluate::backtest(seq, bc);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::insufficient_data) throw;
            backtest_note = e.what();
        }
    }

    const YearMonth first_target = seq.period(seq.size() - 1).plus_months(1);
    return StationResult{
        .station_id = dataset.station_id,
        .kind = dataset.kind,
        .standardized = std::move(standardized),
        .index = std::move(index_series),
        .classes = std::move(seq),
        .max_lag = max_lag,
        .steady_state_lag = auto_lag,
        .matrices = std::move(matrices),
        .weights = std::move(weights),
        .first_target = first_target,
        .forecasts = std::move(forecasts),
        .stationary = std::move(pi),
        .steady_comparison = std::move(comparison),
        .stationary_note = std::move(stationary_note),
        .backtest = std::move(backtest),
        .backtest_note = std::move(backtest_note),
    };
}

std::vector<StationResult> run_all(const std::vector<io::StationDataset>& datasets, const RunConfig& config) {
    std::vector<std::future<StationResult>> pending;
    pending.reserve(datasets.size());
    for (const auto& ds : datasets)
        pending.push_back(std::async(std::launch::async, [&ds, &config] { return run_station(ds, config); }));
    std::vector<StationResult> out;
    out.reserve(datasets.size());
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

} // namespace wmc::pipeline
