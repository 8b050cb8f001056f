#include "wmc/domain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace wmc {

YearMonth YearMonth::from_ordinal(long ordinal) noexcept {
    long year = ordinal / 12;
    long month0 = ordinal % 12;
    if (month0 < 0) {
        month0 += 12;
        --year;
    }
    return YearMonth{static_cast<int>(year), static_cast<int>(month0) + 1};
}

YearMonth YearMonth::parse(std::string_view text) {
    auto fail = [&]() -> YearMonth {
        throw Error(ErrorKind::parse, "invalid period '" + std::string(text) + "', expected YYYY-MM");
    };
    if (text.size() != 7 || text[4] != '-') return fail();
    int year = 0;
    int month = 0;
    auto [p1, e1] = std::from_chars(text.data(), text.data() + 4, year);
    auto [p2, e2] = std::from_chars(text.data() + 5, text.data() + 7, month);
    if (e1 != std::errc{} || p1 != text.data() + 4 || e2 != std::errc{} || p2 != text.data() + 7)
        return fail();
    if (month < 1 || month > 12) return fail();
    return YearMonth{year, month};
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

ClassificationScheme::ClassificationScheme(std::vector<std::string> labels,
                                           std::vector<ClassBoundary> boundaries,
                                           std::size_t neutral_index)
    : labels_(std::move(labels)), boundaries_(std::move(boundaries)), neutral_index_(neutral_index) {
    if (labels_.size() < 2)
        throw Error(ErrorKind::invalid_input, "a classification scheme needs at least 2 classes");
    if (boundaries_.size() + 1 != labels_.size())
        throw Error(ErrorKind::invalid_input, "a scheme with d classes needs d-1 boundaries");
    for (std::size_t i = 0; i < boundaries_.size(); ++i) {
        if (!std::isfinite(boundaries_[i].value))
            throw Error(ErrorKind::invalid_input, "class boundaries must be finite");
        if (i > 0 && !(boundaries_[i - 1].value < boundaries_[i].value))
            throw Error(ErrorKind::invalid_input, "class boundaries must be strictly increasing");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) throw Error(ErrorKind::invalid_input, "empty class label");
        if (std::find(labels_.begin() + static_cast<std::ptrdiff_t>(i) + 1, labels_.end(), labels_[i]) !=
            labels_.end())
            throw Error(ErrorKind::invalid_input, "duplicate class label '" + labels_[i] + "'");
    }
    if (neutral_index_ >= labels_.size())
        throw Error(ErrorKind::invalid_input, "neutral class index out of range");
}

const ClassificationScheme& ClassificationScheme::standard() {
    static const ClassificationScheme scheme = from_cuts({"ED", "SD", "MD", "NN", "MW", "SW", "EW"},
                                                         {-2.0, -1.5, -1.0, 1.0, 1.5, 2.0});
    return scheme;
}

ClassificationScheme ClassificationScheme::from_cuts(std::vector<std::string> labels,
                                                     const std::vector<double>& cuts) {
    std::vector<ClassBoundary> boundaries;
    boundaries.reserve(cuts.size());
    std::size_t neutral = 0;
    for (double c : cuts) {
        boundaries.push_back(ClassBoundary{c, c < 0.0});
        // 0 lies above every cut <= 0 (a cut at exactly 0 closes above).
        if (c <= 0.0) ++neutral;
    }
    if (neutral >= labels.size()) neutral = labels.size() - 1;
    return ClassificationScheme(std::move(labels), std::move(boundaries), neutral);
}

const std::string& ClassificationScheme::label(DroughtClass c) const {
    if (c.rank < 1 || static_cast<std::size_t>(c.rank) > labels_.size())
        throw Error(ErrorKind::invalid_input, "class rank " + std::to_string(c.rank) + " out of range");
    return labels_[c.index()];
}

DroughtClass ClassificationScheme::parse_label(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
        throw Error(ErrorKind::unknown_class, "unknown class label '" + std::string(label) + "'");
    return DroughtClass::from_index(static_cast<std::size_t>(it - labels_.begin()));
}

DroughtClass ClassificationScheme::classify(double value) const {
    if (!std::isfinite(value))
        throw Error(ErrorKind::invalid_input, "cannot classify a non-finite index value");
    std::size_t index = 0;
    for (const auto& b : boundaries_) {
        if (value > b.value || (value == b.value && !b.closed_below))
            ++index;
        else
            break;
    }
    return DroughtClass::from_index(index);
}

IndexSeries::IndexSeries(std::string station_id, YearMonth start, std::vector<std::optional<double>> values)
    : MonthlySeries<double>(std::move(station_id), start, std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] && !std::isfinite(*values_[i]))
            throw Error(ErrorKind::invalid_input,
                        "non-finite index value at " + period(i).to_string());
    }
}

ClassSequence::ClassSequence(std::string station_id, YearMonth start,
                             std::vector<std::optional<DroughtClass>> values, std::size_t class_count)
    : MonthlySeries<DroughtClass>(std::move(station_id), start, std::move(values)), class_count_(class_count) {
    if (class_count_ < 2) throw Error(ErrorKind::invalid_input, "class count must be at least 2");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] && (values_[i]->rank < 1 || static_cast<std::size_t>(values_[i]->rank) > class_count_))
            throw Error(ErrorKind::invalid_input,
                        "class rank out of range at " + period(i).to_string());
    }
}

ClassSequence ClassSequence::from_classes(const std::vector<DroughtClass>& classes, std::size_t class_count,
                                          YearMonth start) {
    std::vector<std::optional<DroughtClass>> values(classes.begin(), classes.end());
    return ClassSequence("", start, std::move(values), class_count);
}

ClassSequence ClassSequence::slice(std::size_t begin, std::size_t end) const {
    return ClassSequence(station_id_, period(begin),
                         std::vector<std::optional<DroughtClass>>(
                             values_.begin() + static_cast<std::ptrdiff_t>(begin),
                             values_.begin() + static_cast<std::ptrdiff_t>(end)),
                         class_count_);
}

std::vector<std::size_t> ClassSequence::class_counts() const {
    std::vector<std::size_t> counts(class_count_, 0);
    for (const auto& v : values_)
        if (v) ++counts[v->index()];
    return counts;
}

ClassSequence classify_series(const IndexSeries& series, const ClassificationScheme& scheme) {
    std::vector<std::optional<DroughtClass>> out;
    out.reserve(series.size());
    for (const auto& v : series.values()) {
        if (v)
            out.emplace_back(scheme.classify(*v));
        else
            out.emplace_back(std::nullopt);
    }
    return ClassSequence(series.station_id(), series.start(), std::move(out), scheme.class_count());
}

} // namespace wmc
