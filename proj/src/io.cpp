#include "wmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace wmc::io {

std::string_view to_string(InputKind kind) noexcept {
    switch (kind) {
    case InputKind::raw_climate: return "raw-climate";
    case InputKind::precomputed_index: return "precomputed-index";
    case InputKind::precomputed_classes: return "precomputed-classes";
    }
    return "unknown";
}

InputKind parse_input_kind(std::string_view text) {
    if (text == "raw" || text == "raw-climate") return InputKind::raw_climate;
    if (text == "index" || text == "precomputed-index") return InputKind::precomputed_index;
    if (text == "classes" || text == "precomputed-classes") return InputKind::precomputed_classes;
    throw Error(ErrorKind::invalid_input, "unknown input kind '" + std::string(text) + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct Layout {
    InputKind kind;
    std::string value_column;
    std::size_t columns;
};

std::string where(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

Layout detect_layout(const std::vector<std::string_view>& header, std::string_view source) {
    static const std::vector<std::pair<std::vector<std::string_view>, Layout>> layouts{
        {{"station", "period", "precip_mm", "tmean_c"}, {InputKind::raw_climate, "precip_mm", 4}},
        {{"station", "period", "aggregate"}, {InputKind::raw_climate, "aggregate", 3}},
        {{"station", "period", "index"}, {InputKind::precomputed_index, "index", 3}},
        {{"station", "period", "class"}, {InputKind::precomputed_classes, "class", 3}},
    };
    for (const auto& [names, layout] : layouts)
        if (header == names) return layout;

    static const std::vector<std::string_view> known{"station", "period", "precip_mm", "tmean_c",
                                                     "aggregate", "index", "class"};
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (std::find(known.begin(), known.end(), header[i]) == known.end())
            throw Error(ErrorKind::unknown_column, where(source, 1) + ": unknown column '" + std::string(header[i]) +
                                                       "' (column " + std::to_string(i + 1) + ")");
    }
    throw Error(ErrorKind::parse, where(source, 1) +
                                      ": header must be one of station,period,precip_mm,tmean_c | "
                                      "station,period,aggregate | station,period,index | station,period,class");
}

std::optional<double> parse_number(std::string_view field, std::string_view source, std::size_t line,
                                   std::string_view column) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
        throw Error(ErrorKind::parse, where(source, line) + ": invalid " + std::string(column) + " value '" +
                                          std::string(field) + "'");
    return value;
}

struct StationRows {
    std::string station;
    YearMonth start;
    YearMonth last;
    std::size_t last_line = 0;
    std::vector<std::optional<double>> values;
    std::vector<std::optional<double>> temperature;
};

} // namespace

std::vector<StationDataset> read_csv(std::istream& in, std::string_view source, std::optional<InputKind> expected,
                                     const ClassificationScheme& scheme) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Layout> layout;

    // Values are kept as doubles; class labels are stored by rank.
    std::vector<StationRows> stations;
    std::map<std::string, std::size_t, std::less<>> by_name;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        view = trim(view);
        if (view.empty()) continue;
        std::vector<std::string_view> fields = split(view);
        for (auto& f : fields) f = trim(f);

        if (!layout) {
            layout = detect_layout(fields, source);
            if (expected && *expected != layout->kind)
                throw Error(ErrorKind::parse, where(source, line_no) + ": header describes " +
                                                  std::string(to_string(layout->kind)) + " input but " +
                                                  std::string(to_string(*expected)) + " was requested");
            continue;
        }
        if (fields.size() != layout->columns)
            throw Error(ErrorKind::parse, where(source, line_no) + ": expected " + std::to_string(layout->columns) +
                                              " fields, found " + std::to_string(fields.size()));
        if (fields[0].empty()) throw Error(ErrorKind::parse, where(source, line_no) + ": empty station id");

        YearMonth period;
        try {
            period = YearMonth::parse(fields[1]);
        } catch (const Error& e) {
            throw Error(ErrorKind::parse, where(source, line_no) + ": " + e.what());
        }

        std::optional<double> value;
        std::optional<double> temperature;
        if (layout->kind == InputKind::precomputed_classes) {
            if (!fields[2].empty()) {
                try {
                    value = static_cast<double>(scheme.parse_label(fields[2]).rank);
                } catch (const Error&) {
                    throw Error(ErrorKind::unknown_class, where(source, line_no) + ": unknown class '" +
                                                              std::string(fields[2]) + "'");
                }
            }
        } else {
            value = parse_number(fields[2], source, line_no, layout->value_column);
            if (layout->columns == 4) temperature = parse_number(fields[3], source, line_no, "tmean_c");
        }

        auto [it, inserted] = by_name.try_emplace(std::string(fields[0]), stations.size());
        if (inserted) {
            stations.push_back(StationRows{std::string(fields[0]), period, period, line_no, {value}, {temperature}});
            continue;
        }
        auto& rows = stations[it->second];
        if (period == rows.last)
            throw Error(ErrorKind::duplicate_period, where(source, line_no) + ": duplicate period " +
                                                         period.to_string() + " for station '" + rows.station +
                                                         "' (first seen on line " + std::to_string(rows.last_line) + ")");
        if (period < rows.last)
            throw Error(ErrorKind::non_monotone_period, where(source, line_no) + ": period " + period.to_string() +
                                                            " precedes " + rows.last.to_string() + " for station '" +
                                                            rows.station + "'");
        for (long gap = rows.last.ordinal() + 1; gap < period.ordinal(); ++gap) {
            rows.values.emplace_back(std::nullopt);
            rows.temperature.emplace_back(std::nullopt);
        }
        rows.values.push_back(value);
        rows.temperature.push_back(temperature);
        rows.last = period;
        rows.last_line = line_no;
    }
    if (!layout) throw Error(ErrorKind::parse, std::string(source) + ": empty input (no header)");

    std::vector<StationDataset> out;
    out.reserve(stations.size());
    for (auto& rows : stations) {
        StationDataset ds;
        ds.station_id = rows.station;
        ds.kind = layout->kind;
        ds.value_column = layout->value_column;
        if (layout->columns == 4)
            ds.temperature = index::RawSeries(rows.station, rows.start, std::move(rows.temperature));
        switch (layout->kind) {
        case InputKind::raw_climate:
            ds.series = index::RawSeries(rows.station, rows.start, std::move(rows.values));
            break;
        case InputKind::precomputed_index:
            ds.series = IndexSeries(rows.station, rows.start, std::move(rows.values));
            break;
        case InputKind::precomputed_classes: {
            std::vector<std::optional<DroughtClass>> classes;
            classes.reserve(rows.values.size());
            for (const auto& v : rows.values)
                classes.push_back(v ? std::optional<DroughtClass>(DroughtClass{static_cast<int>(*v)}) : std::nullopt);
            ds.series = ClassSequence(rows.station, rows.start, std::move(classes), scheme.class_count());
            break;
        }
        }
        out.push_back(std::move(ds));
    }
    return out;
}

std::vector<StationDataset> ingest(const std::filesystem::path& path, std::optional<InputKind> expected,
                                   const ClassificationScheme& scheme) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_input, "cannot open input file '" + path.string() + "'");
    return read_csv(in, path.string(), expected, scheme);
}

std::string format_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_index_csv(std::ostream& out, const IndexSeries& series) {
    out << "station,period,index\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.station_id() << ',' << series.period(i).to_string() << ',';
        if (series[i]) out << format_number(*series[i]);
        out << '\n';
    }
}

void write_classes_csv(std::ostream& out, const ClassSequence& seq, const ClassificationScheme& scheme) {
    out << "station,period,class\n";
    for (std::size_t i = 0; i < seq.size(); ++i) {
        out << seq.station_id() << ',' << seq.period(i).to_string() << ',';
        if (seq[i]) out << scheme.label(*seq[i]);
        out << '\n';
    }
}

void write_raw_csv(std::ostream& out, const std::vector<index::RawSeries>& precipitation,
                   const std::vector<index::RawSeries>& temperature) {
    out << "station,period,precip_mm,tmean_c\n";
    for (std::size_t s = 0; s < precipitation.size(); ++s) {
        const auto& p = precipitation[s];
        for (std::size_t i = 0; i < p.size(); ++i) {
            out << p.station_id() << ',' << p.period(i).to_string() << ',';
            if (p[i]) out << format_number(*p[i]);
            out << ',';
            if (s < temperature.size() && i < temperature[s].size() && temperature[s][i])
                out << format_number(*temperature[s][i]);
            out << '\n';
        }
    }
}

} // namespace wmc::io
