#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wmc/agreement.hpp"
#include "wmc/domain.hpp"
#include "wmc/markov.hpp"

namespace wmc::forecast {

/// Why a lag did not contribute to a forecast.
enum class LagStatus { used, zero_weight, history_too_short, missing_state, unsupported_row };
std::string_view to_string(LagStatus status) noexcept;

struct TraceRecord {
    int lag = 1;
    std::optional<DroughtClass> source_state; // class observed `lag` steps before the target
    std::vector<double> row;                  // P(lag) row of the source state; empty when not used
    double weight = 0.0;                      // profile weight W_lag
    double effective_weight = 0.0;            // weight after renormalization
    LagStatus status = LagStatus::used;
};

struct ForecastTrace {
    std::vector<TraceRecord> records;
    std::vector<double> weighted_sum;
    std::vector<DroughtClass> tied_classes; // classes sharing the maximum, in rank order
};

struct ForecastDistribution {
    std::vector<double> probabilities;
    DroughtClass predicted_class;
    std::vector<int> used_lags;
    bool renormalized = false;
    bool tie_break_applied = false;
    ForecastTrace trace;
};

struct ArgmaxDecision {
    DroughtClass predicted_class;
    bool tie_break_applied = false;
    std::vector<DroughtClass> tied_classes;
};

/// Probabilities closer than this to the maximum are treated as tied.
inline constexpr double tie_tolerance = 1e-12;

/**
 * Class of maximal probability. Ties go to (1) the higher historical
 * frequency, then (2) the smaller rank distance from the neutral class,
 * then (3) the lower rank.
 */
ArgmaxDecision argmax_class(std::span<const double> probabilities, std::span<const double> class_frequencies,
                            std::size_t neutral_index);

struct ForecastOptions {
    /// Reference class for the tie-break; defaults to the middle class.
    std::optional<std::size_t> neutral_index;
};

/**
 * One-step weighted Markov chain forecast.
 *
 * `history` is chronological: its last element is the most recent month,
 * which feeds lag 1. Lags with a missing or never-departed source state,
 * or reaching past the start of the history, are dropped and the remaining
 * weights renormalized.
 */
ForecastDistribution predict_one(std::span<const std::optional<DroughtClass>> history,
                                 const markov::TransitionMatrixSet& matrices,
                                 const agreement::LagWeightProfile& weights, const ForecastOptions& options = {});

ForecastDistribution predict_one(std::span<const DroughtClass> history, const markov::TransitionMatrixSet& matrices,
                                 const agreement::LagWeightProfile& weights, const ForecastOptions& options = {});

enum class IterationMode {
    point,        // feed the predicted class back as the newest observation
    distribution, // extension: propagate the forecast vector through P(1)
};
std::string_view to_string(IterationMode mode) noexcept;

std::vector<ForecastDistribution> predict_iterated(std::span<const std::optional<DroughtClass>> history,
                                                   const markov::TransitionMatrixSet& matrices,
                                                   const agreement::LagWeightProfile& weights, int horizon,
                                                   IterationMode mode = IterationMode::point,
                                                   const ForecastOptions& options = {});

/// The last `count` entries of a sequence (fewer when it is shorter).
std::vector<std::optional<DroughtClass>> tail(const ClassSequence& seq, std::size_t count);

} // namespace wmc::forecast
