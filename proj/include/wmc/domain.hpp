#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wmc/error.hpp"

namespace wmc {

/// Calendar month, the time step of every series in the library.
struct YearMonth {
    int year = 1970;
    int month = 1; // 1..12

    auto operator<=>(const YearMonth&) const = default;

    /// Months since year 0, used for differences and offsets.
    long ordinal() const noexcept { return static_cast<long>(year) * 12 + (month - 1); }
    static YearMonth from_ordinal(long ordinal) noexcept;

    YearMonth plus_months(long count) const noexcept { return from_ordinal(ordinal() + count); }

    /// Parses "YYYY-MM"; throws Error(parse) otherwise.
    static YearMonth parse(std::string_view text);
    std::string to_string() const;
};

/// An ordinal class identified by its 1-based rank (1 = driest).
struct DroughtClass {
    int rank = 0;

    auto operator<=>(const DroughtClass&) const = default;
    std::size_t index() const noexcept { return static_cast<std::size_t>(rank - 1); }
    static DroughtClass from_index(std::size_t index) noexcept {
        return DroughtClass{static_cast<int>(index) + 1};
    }
};

/// The seven classes of the default scheme, driest to wettest.
namespace classes {
inline constexpr DroughtClass ED{1}; // extreme drought
inline constexpr DroughtClass SD{2}; // severe drought
inline constexpr DroughtClass MD{3}; // moderate drought
inline constexpr DroughtClass NN{4}; // near normal
inline constexpr DroughtClass MW{5}; // moderately wet
inline constexpr DroughtClass SW{6}; // severely wet
inline constexpr DroughtClass EW{7}; // extremely wet
} // namespace classes

/// Boundary between two adjacent classes. A value exactly equal to `value`
/// falls in the lower class when `closed_below` is set, otherwise the upper.
struct ClassBoundary {
    double value = 0.0;
    bool closed_below = false;
    bool operator==(const ClassBoundary&) const = default;
};

/**
 * Ordered partition of the real line into `class_count()` ordinal classes.
 *
 * The default scheme is the SPI-style seven-class table:
 *   ED: x <= -2, SD: (-2, -1.5], MD: (-1.5, -1], NN: (-1, 1),
 *   MW: [1, 1.5), SW: [1.5, 2), EW: x >= 2.
 */
class ClassificationScheme {
public:
    ClassificationScheme(std::vector<std::string> labels, std::vector<ClassBoundary> boundaries,
                         std::size_t neutral_index);

    static const ClassificationScheme& standard();

    /// Builds a scheme from increasing cut points; negative cuts close below,
    /// non-negative cuts close above. The neutral class is the one containing 0.
    static ClassificationScheme from_cuts(std::vector<std::string> labels,
                                          const std::vector<double>& cuts);

    std::size_t class_count() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<ClassBoundary>& boundaries() const noexcept { return boundaries_; }

    /// Index of the reference ("near normal") class used by the forecast tie-break.
    std::size_t neutral_index() const noexcept { return neutral_index_; }

    const std::string& label(DroughtClass c) const;
    DroughtClass parse_label(std::string_view label) const;

    DroughtClass classify(double value) const;

    bool operator==(const ClassificationScheme&) const = default;

private:
    std::vector<std::string> labels_;
    std::vector<ClassBoundary> boundaries_;
    std::size_t neutral_index_;
};

inline DroughtClass classify(double value, const ClassificationScheme& scheme) {
    return scheme.classify(value);
}

/// Half-open index range [begin, end) of consecutive non-missing entries.
struct Run {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t length() const noexcept { return end - begin; }
    bool operator==(const Run&) const = default;
};

/**
 * Monthly series starting at `start()` with one slot per calendar month.
 * Periods are implied by position, so they always increase by exactly one
 * month; gaps are explicit empty optionals.
 */
template <class T>
class MonthlySeries {
public:
    using value_type = std::optional<T>;

    MonthlySeries() = default;
    MonthlySeries(std::string station_id, YearMonth start, std::vector<value_type> values)
        : station_id_(std::move(station_id)), start_(start), values_(std::move(values)) {}

    const std::string& station_id() const noexcept { return station_id_; }
    YearMonth start() const noexcept { return start_; }
    YearMonth period(std::size_t i) const noexcept { return start_.plus_months(static_cast<long>(i)); }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const value_type& operator[](std::size_t i) const { return values_[i]; }
    const std::vector<value_type>& values() const noexcept { return values_; }

    std::size_t valid_count() const noexcept {
        std::size_t n = 0;
        for (const auto& v : values_) n += v.has_value() ? 1 : 0;
        return n;
    }

    std::vector<Run> runs() const {
        std::vector<Run> out;
        std::size_t i = 0;
        while (i < values_.size()) {
            if (!values_[i]) { ++i; continue; }
            std::size_t j = i;
            while (j < values_.size() && values_[j]) ++j;
            out.push_back(Run{i, j});
            i = j;
        }
        return out;
    }

    /// Entries in [begin, end) as a new series keeping the same station.
    MonthlySeries slice(std::size_t begin, std::size_t end) const {
        return MonthlySeries(station_id_, period(begin),
                             std::vector<value_type>(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                                                     values_.begin() + static_cast<std::ptrdiff_t>(end)));
    }

protected:
    std::string station_id_;
    YearMonth start_{};
    std::vector<value_type> values_;
};

/// Standardized, dimensionless index values. Present values are finite.
class IndexSeries : public MonthlySeries<double> {
public:
    IndexSeries() = default;
    IndexSeries(std::string station_id, YearMonth start, std::vector<std::optional<double>> values);
};

/// Class sequence over a scheme with `class_count()` classes.
class ClassSequence : public MonthlySeries<DroughtClass> {
public:
    ClassSequence() = default;
    ClassSequence(std::string station_id, YearMonth start,
                  std::vector<std::optional<DroughtClass>> values, std::size_t class_count);

    /// Convenience for gap-free test data.
    static ClassSequence from_classes(const std::vector<DroughtClass>& classes,
                                      std::size_t class_count = 7,
                                      YearMonth start = YearMonth{2000, 1});

    std::size_t class_count() const noexcept { return class_count_; }

    ClassSequence slice(std::size_t begin, std::size_t end) const;

    /// Count of each class over the non-missing entries.
    std::vector<std::size_t> class_counts() const;

private:
    std::size_t class_count_ = 7;
};

ClassSequence classify_series(const IndexSeries& series, const ClassificationScheme& scheme);

} // namespace wmc
