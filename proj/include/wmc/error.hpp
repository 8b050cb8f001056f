#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wmc {

enum class ErrorKind {
    invalid_input,
    parse,
    unknown_column,
    unknown_class,
    duplicate_period,
    non_monotone_period,
    insufficient_data,
    degenerate_sample,
    no_viable_model,
    empty_table,
    no_unique_stationary,
    no_forecast,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Broad category used by the CLI to pick an exit code.
enum class ErrorCategory { usage, data, numerical };

ErrorCategory category_of(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_of(kind_); }

private:
    ErrorKind kind_;
};

} // namespace wmc
