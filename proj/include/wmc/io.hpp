#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wmc/domain.hpp"
#include "wmc/index.hpp"

namespace wmc::io {

enum class InputKind { raw_climate, precomputed_index, precomputed_classes };

std::string_view to_string(InputKind kind) noexcept;
InputKind parse_input_kind(std::string_view text);

/// One station's parsed input. Exactly one of the series is meaningful,
/// selected by `kind`.
struct StationDataset {
    std::string station_id;
    InputKind kind = InputKind::raw_climate;
    std::variant<index::RawSeries, IndexSeries, ClassSequence> series;
    /// Name of the raw value column ("precip_mm" or "aggregate") for raw input.
    std::string value_column;
    /// Mean temperature column of raw-climate input; carried through, not standardized.
    std::optional<index::RawSeries> temperature;

    const index::RawSeries& raw() const { return std::get<index::RawSeries>(series); }
    const IndexSeries& index_series() const { return std::get<IndexSeries>(series); }
    const ClassSequence& classes() const { return std::get<ClassSequence>(series); }
};

/**
 * Parses a UTF-8 CSV with one of these headers:
 *
 *   station,period,precip_mm,tmean_c   raw climate (precip_mm is standardized)
 *   station,period,aggregate           raw, user-computed aggregate
 *   station,period,index               precomputed index values
 *   station,period,class               precomputed class labels
 *
 * Periods are YYYY-MM and must strictly increase per station; skipped
 * months become explicit gaps and empty fields are missing values. When
 * `expected` is set the header must match that kind. Stations are returned
 * in order of first appearance.
 */
std::vector<StationDataset> read_csv(std::istream& in, std::string_view source,
                                     std::optional<InputKind> expected = std::nullopt,
                                     const ClassificationScheme& scheme = ClassificationScheme::standard());

std::vector<StationDataset> ingest(const std::filesystem::path& path, std::optional<InputKind> expected = std::nullopt,
                                   const ClassificationScheme& scheme = ClassificationScheme::standard());

void write_index_csv(std::ostream& out, const IndexSeries& series);
void write_classes_csv(std::ostream& out, const ClassSequence& seq, const ClassificationScheme& scheme);
void write_raw_csv(std::ostream& out, const std::vector<index::RawSeries>& precipitation,
                   const std::vector<index::RawSeries>& temperature);

/// Formats a double with up to 17 significant digits, shortest round-trip.
std::string format_number(double value);

} // namespace wmc::io
