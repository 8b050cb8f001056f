#include "wmc/error.hpp"

namespace wmc {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::parse: return "parse";
    case ErrorKind::unknown_column: return "unknown-column";
    case ErrorKind::unknown_class: return "unknown-class";
    case ErrorKind::duplicate_period: return "duplicate-period";
    case ErrorKind::non_monotone_period: return "non-monotone-period";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::degenerate_sample: return "degenerate-sample";
    case ErrorKind::no_viable_model: return "no-viable-model";
    case ErrorKind::empty_table: return "empty-table";
    case ErrorKind::no_unique_stationary: return "no-unique-stationary";
    case ErrorKind::no_forecast: return "no-forecast";
    }
    return "unknown";
}

ErrorCategory category_of(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_input:
    case ErrorKind::parse:
    case ErrorKind::unknown_column:
    case ErrorKind::unknown_class:
    case ErrorKind::duplicate_period:
    case ErrorKind::non_monotone_period:
    case ErrorKind::insufficient_data:
    case ErrorKind::empty_table:
        return ErrorCategory::data;
    case ErrorKind::degenerate_sample:
    case ErrorKind::no_viable_model:
    case ErrorKind::no_unique_stationary:
    case ErrorKind::no_forecast:
        return ErrorCategory::numerical;
    }
    return ErrorCategory::data;
}

} // namespace wmc
