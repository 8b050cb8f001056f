#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wmc/report.hpp"

namespace wmc::model {

inline constexpr std::string_view format_name = "wmc-model";
inline constexpr int format_version = 1;

/**
 * A fitted forecaster as written by `wmc fit` and read by `wmc predict`.
 *
 * JSON layout:
 *   { "format": "wmc-model", "format_version": 1, "station": ...,
 *     "classes": [labels...], "boundaries": [{"value", "closed_below"}...],
 *     "neutral_class": label, "weight_basis": "kappa" | "z",
 *     "class_frequencies": [...],
 *     "lags": [{ "lag", "kappa", "z", "p_value", "weight",
 *                "rows": { label: [probabilities...] } }...],
 *     "history": { "end": "YYYY-MM", "classes": [label | null ...] } }
 *
 * Rows not listed are unsupported. Rows are renormalized on load and must
 * already sum to 1 within 0.01. Weights are recomputed from the basis
 * values (kappa or z) when present, otherwise from the stored weights.
 */
struct Model {
    std::string station_id;
    ClassificationScheme scheme = ClassificationScheme::standard();
    markov::TransitionMatrixSet matrices;
    agreement::LagWeightProfile weights;
    std::vector<std::optional<DroughtClass>> history; // chronological, last = most recent
    std::optional<YearMonth> history_end;
};

Model from_result(const pipeline::StationResult& result, const ClassificationScheme& scheme);

report::Json to_json(const Model& model);
Model from_json(const report::Json& json);

Model load(const std::filesystem::path& path);

} // namespace wmc::model
