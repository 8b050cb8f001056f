#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "wmc/pipeline.hpp"

namespace wmc::report {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view software_name = "wmc";
inline constexpr std::string_view software_version = "0.1.0";

Json config_json(const pipeline::RunConfig& config);
Json software_json();

Json weights_json(const agreement::LagWeightProfile& profile);
Json matrices_json(const markov::TransitionMatrixSet& set, const ClassificationScheme& scheme);
Json forecast_json(const forecast::ForecastDistribution& f, const ClassificationScheme& scheme);
Json stationary_json(const markov::StationaryDistribution& pi, const ClassificationScheme& scheme);
Json backtest_json(const evaluate::BacktestReport& report, const ClassificationScheme& scheme);
Json station_json(const pipeline::StationResult& result, const ClassificationScheme& scheme);

/// Machine-readable report for all stations. Key order and number
/// formatting are fixed, so identical runs serialize identically.
Json report_json(const std::vector<pipeline::StationResult>& results, const pipeline::RunConfig& config);

/// Human-readable summary: per-station lag table, the forecast trace laid
/// out lag by lag, and the forecast vs steady-state comparison.
std::string summary_text(const std::vector<pipeline::StationResult>& results, const pipeline::RunConfig& config);

/// Per-lag trace of one forecast (one line per lag, then the weighted sum).
std::string trace_table(const forecast::ForecastDistribution& f, const ClassificationScheme& scheme,
                        YearMonth target);

std::string forecast_csv(const std::vector<pipeline::StationResult>& results, const ClassificationScheme& scheme);
std::string confusion_csv(const std::vector<pipeline::StationResult>& results, const ClassificationScheme& scheme);

} // namespace wmc::report
