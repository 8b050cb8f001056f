#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wmc/domain.hpp"
#include "wmc/index.hpp"
#include "wmc/markov.hpp"

namespace wmc::simulate {

using Rng = std::mt19937_64;

/// Samples n states of a first-order chain with row-stochastic `transition`.
ClassSequence markov_chain(const markov::Matrix& transition, std::size_t n, Rng& rng, std::size_t initial = 0,
                           const std::string& station_id = "sim");

/// n i.i.d. draws from `probabilities`.
ClassSequence iid(const std::vector<double>& probabilities, std::size_t n, Rng& rng,
                  const std::string& station_id = "sim");

struct StationClimate {
    index::RawSeries precipitation; // mm
    index::RawSeries temperature;   // deg C
};

struct ClimateOptions {
    int stations = 4;
    YearMonth start{1955, 1};
    YearMonth end{2017, 12};
    double missing_rate = 0.002; // share of months blanked out
};

/**
 * Synthetic monthly station climate. Precipitation is gamma distributed
 * with a seasonal mean; month-to-month persistence comes from an AR(1)
 * latent Gaussian mapped through the gamma quantile. Each station gets its
 * own persistence, seasonality and wetness.
 */
std::vector<StationClimate> climate(const ClimateOptions& options, std::uint64_t seed);

} // namespace wmc::simulate
