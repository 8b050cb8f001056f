#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wmc/agreement.hpp"
#include "wmc/domain.hpp"
#include "wmc/forecast.hpp"
#include "wmc/markov.hpp"

namespace wmc::evaluate {

struct SteadyComparison {
    std::vector<double> forecast;
    std::vector<double> stationary;
    std::vector<double> difference; // forecast - stationary
    double max_abs_difference = 0.0;
};

SteadyComparison compare_steady(std::span<const double> forecast, const markov::StationaryDistribution& stationary);

struct BacktestConfig {
    int max_lag = 7;
    agreement::WeightBasis weight_basis = agreement::WeightBasis::kappa;
    std::size_t holdout = 1;
    bool refit = true;
    /// Training windows need at least this many times max_lag non-missing months.
    std::size_t min_train_factor = 10;
    markov::TransitionOptions transitions;
    forecast::ForecastOptions forecast;
};

struct FoldRecord {
    YearMonth origin;
    DroughtClass observed;
    DroughtClass predicted;          // weighted Markov chain
    DroughtClass markov_lag1;        // plain first-order chain
    DroughtClass climatology;        // training-window modal class
    forecast::ForecastDistribution distribution;
};

struct SkippedFold {
    YearMonth origin;
    std::string reason;
};

inline constexpr const char* method_wmc = "wmc";
inline constexpr const char* method_markov_lag1 = "markov-lag1";
inline constexpr const char* method_climatology = "climatology";

struct BacktestReport {
    std::string station_id;
    std::size_t class_count = 0;
    std::vector<FoldRecord> folds;
    std::vector<SkippedFold> skipped;
    double hit_rate = 0.0;
    std::vector<std::vector<std::size_t>> confusion; // [observed][predicted], weighted Markov chain
    std::map<std::string, double> baseline_hit_rates;
    std::optional<SteadyComparison> steady_state_comparison; // last fold vs its training stationary distribution
};

/**
 * Rolling-origin evaluation over the last `holdout` months of `seq`.
 *
 * Each fold fits on months strictly before its origin (once, before the
 * first origin, when refit is off) and predicts the origin month.
 */
BacktestReport backtest(const ClassSequence& seq, const BacktestConfig& config = {});

} // namespace wmc::evaluate
