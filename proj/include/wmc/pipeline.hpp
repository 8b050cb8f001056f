#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmc/agreement.hpp"
#include "wmc/domain.hpp"
#include "wmc/evaluate.hpp"
#include "wmc/forecast.hpp"
#include "wmc/index.hpp"
#include "wmc/io.hpp"
#include "wmc/markov.hpp"

namespace wmc::pipeline {

/// Effective settings for one invocation; echoed into every report.
struct RunConfig {
    std::optional<int> max_lag = 7; // empty: chosen from the steady-state lag
    int auto_lag_cap = 12;
    double steady_tolerance = 0.01;
    agreement::WeightBasis weight_basis = agreement::WeightBasis::kappa;
    ClassificationScheme scheme = ClassificationScheme::standard();
    index::Grouping grouping = index::Grouping::per_calendar_month;
    index::FitOptions fit;
    markov::TransitionOptions transitions;
    int horizon = 1;
    forecast::IterationMode iteration = forecast::IterationMode::point;
    std::size_t holdout = 1;
    bool refit = true;
    bool run_backtest = true;
    std::uint64_t seed = 1955;

    /// Throws Error(invalid_input) naming the first out-of-range setting.
    void validate() const;
};

struct StationResult {
    std::string station_id;
    io::InputKind kind = io::InputKind::precomputed_classes;
    std::optional<index::StandardizeResult> standardized;
    std::optional<IndexSeries> index;
    ClassSequence classes;
    int max_lag = 1;
    std::optional<int> steady_state_lag; // set when max_lag was chosen automatically
    markov::TransitionMatrixSet matrices;
    agreement::LagWeightProfile weights;
    YearMonth first_target;
    std::vector<forecast::ForecastDistribution> forecasts;
    std::optional<markov::StationaryDistribution> stationary;
    std::optional<evaluate::SteadyComparison> steady_comparison;
    std::string stationary_note;
    std::optional<evaluate::BacktestReport> backtest;
    std::string backtest_note;
};

/// Standardizes raw input, classifies index input, and returns the class
/// sequence the forecasting steps work on.
ClassSequence prepare_classes(const io::StationDataset& dataset, const RunConfig& config,
                              std::optional<index::StandardizeResult>* standardized = nullptr,
                              std::optional<IndexSeries>* index_series = nullptr);

/// Runs every step for one station. Stationary and backtest failures are
/// recorded in the notes; every other error propagates.
StationResult run_station(const io::StationDataset& dataset, const RunConfig& config);

std::vector<StationResult> run_all(const std::vector<io::StationDataset>& datasets, const RunConfig& config);

} // namespace wmc::pipeline
