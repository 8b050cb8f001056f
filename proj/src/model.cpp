#include "wmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wmc::model {

using report::Json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::parse, "model file: " + what); }

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad(std::string("missing '") + key + "'");
    return j.at(key);
}

std::optional<double> optional_number(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) bad(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

ClassificationScheme scheme_from_json(const Json& j) {
    const auto labels = require(j, "classes").get<std::vector<std::string>>();
    std::vector<ClassBoundary> bounds;
    if (j.contains("boundaries")) {
        for (const auto& b : j.at("boundaries"))
            bounds.push_back(ClassBoundary{require(b, "value").get<double>(), require(b, "closed_below").get<bool>()});
    } else if (labels == ClassificationScheme::standard().labels()) {
        bounds = ClassificationScheme::standard().boundaries();
    } else {
        bad("'boundaries' is required for a non-standard class list");
    }
    std::size_t neutral = ClassificationScheme::standard().neutral_index();
    if (j.contains("neutral_class")) {
        const auto name = j.at("neutral_class").get<std::string>();
        const auto it = std::find(labels.begin(), labels.end(), name);
        if (it == labels.end()) bad("unknown neutral class '" + name + "'");
        neutral = static_cast<std::size_t>(it - labels.begin());
    } else {
        neutral = (labels.size() - 1) / 2;
    }
    return ClassificationScheme(labels, std::move(bounds), neutral);
}

} // namespace

Model from_result(const pipeline::StationResult& result, const ClassificationScheme& scheme) {
    const auto& seq = result.classes;
    return Model{
        .station_id = result.station_id,
        .scheme = scheme,
        .matrices = result.matrices,
        .weights = result.weights,
        .history = forecast::tail(seq, static_cast<std::size_t>(result.max_lag)),
        .history_end = seq.period(seq.size() - 1),
    };
}

Json to_json(const Model& m) {
    Json out;
    out["format"] = format_name;
    out["format_version"] = format_version;
    out["software"] = report::software_json();
    out["station"] = m.station_id;
    out["classes"] = m.scheme.labels();
    Json bounds = Json::array();
    for (const auto& b : m.scheme.boundaries()) {
        Json jb;
        jb["value"] = b.value;
        jb["closed_below"] = b.closed_below;
        bounds.push_back(jb);
    }
    out["boundaries"] = bounds;
    out["neutral_class"] = m.scheme.labels()[m.scheme.neutral_index()];
    out["weight_basis"] = agreement::to_string(m.weights.basis);
    out["class_frequencies"] = m.matrices.class_frequencies();
    Json lags = Json::array();
    for (const auto& lm : m.matrices.lags()) {
        const auto& rec = m.weights.lags.at(static_cast<std::size_t>(lm.lag - 1));
        Json jl;
        jl["lag"] = lm.lag;
        jl["kappa"] = rec.statistics.kappa ? Json(*rec.statistics.kappa) : Json(nullptr);
        jl["z"] = rec.statistics.z ? Json(*rec.statistics.z) : Json(nullptr);
        jl["p_value"] = rec.statistics.p_value ? Json(*rec.statistics.p_value) : Json(nullptr);
        jl["weight"] = rec.weight;
        Json rows = Json::object();
        for (std::size_t i = 0; i < m.scheme.class_count(); ++i) {
            if (!lm.supported(i)) continue;
            Json row = Json::array();
            for (Eigen::Index j = 0; j < lm.probabilities.cols(); ++j)
                row.push_back(lm.probabilities(static_cast<Eigen::Index>(i), j));
            rows[m.scheme.labels()[i]] = row;
        }
        jl["rows"] = rows;
        lags.push_back(jl);
    }
    out["lags"] = lags;
    Json history;
    history["end"] = m.history_end ? Json(m.history_end->to_string()) : Json(nullptr);
    Json hc = Json::array();
    for (const auto& c : m.history) hc.push_back(c ? Json(m.scheme.label(*c)) : Json(nullptr));
    history["classes"] = hc;
    out["history"] = history;
    return out;
}

Model from_json(const Json& j) {
    if (require(j, "format") != format_name) bad("not a wmc-model document");
    if (require(j, "format_version") != format_version) bad("unsupported format_version");
    ClassificationScheme scheme = scheme_from_json(j);
    const std::size_t d = scheme.class_count();
    const auto di = static_cast<Eigen::Index>(d);
    const agreement::WeightBasis basis =
        j.contains("weight_basis") ? agreement::parse_weight_basis(j.at("weight_basis").get<std::string>())
                                   : agreement::WeightBasis::kappa;

    std::vector<double> freq(d, 1.0 / static_cast<double>(d));
    if (j.contains("class_frequencies") && !j.at("class_frequencies").is_null()) {
        freq = j.at("class_frequencies").get<std::vector<double>>();
        if (freq.size() != d) bad("class_frequencies has the wrong length");
    }

    const Json& jlags = require(j, "lags");
    if (!jlags.is_array() || jlags.empty()) bad("'lags' must be a non-empty array");
    std::vector<markov::LagMatrix> lags;
    agreement::LagWeightProfile profile;
    profile.basis = basis;
    std::vector<std::optional<double>> basis_values;
    std::vector<std::optional<double>> stored_weights;
    for (std::size_t t = 0; t < jlags.size(); ++t) {
        const Json& jl = jlags[t];
        if (require(jl, "lag").get<int>() != static_cast<int>(t) + 1) bad("lags must be listed in order 1..m");
        markov::LagMatrix lm;
        lm.lag = static_cast<int>(t) + 1;
        lm.counts = markov::CountMatrix::Zero(di, di);
        lm.probabilities = markov::Matrix::Zero(di, di);
        lm.row_support.assign(d, false);
        if (jl.contains("rows")) {
            for (const auto& [label, row] : jl.at("rows").items()) {
                const DroughtClass c = scheme.parse_label(label);
                const auto values = row.get<std::vector<double>>();
                if (values.size() != d) bad("row '" + label + "' at lag " + std::to_string(lm.lag) + " has the wrong length");
                double total = 0.0;
                for (double v : values) {
                    if (!(v >= 0.0) || !std::isfinite(v)) bad("transition probabilities must be finite and non-negative");
                    total += v;
                }
                if (std::abs(total - 1.0) > 0.01)
                    bad("row '" + label + "' at lag " + std::to_string(lm.lag) + " does not sum to 1");
                for (std::size_t k = 0; k < d; ++k)
                    lm.probabilities(static_cast<Eigen::Index>(c.index()), static_cast<Eigen::Index>(k)) = values[k] / total;
                lm.row_support[c.index()] = true;
                lm.available = true;
            }
        }
        lags.push_back(std::move(lm));

        agreement::LagRecord rec;
        rec.lag = static_cast<int>(t) + 1;
        rec.available = lags.back().available;
        rec.statistics.kappa = optional_number(jl, "kappa");
        rec.statistics.z = optional_number(jl, "z");
        rec.statistics.p_value = optional_number(jl, "p_value");
        profile.lags.push_back(rec);
        basis_values.push_back(basis == agreement::WeightBasis::kappa ? rec.statistics.kappa : rec.statistics.z);
        stored_weights.push_back(optional_number(jl, "weight"));
    }

    const bool has_basis = std::any_of(basis_values.begin(), basis_values.end(), [](const auto& v) { return v.has_value(); });
    const bool has_weights = std::any_of(stored_weights.begin(), stored_weights.end(), [](const auto& v) { return v.has_value(); });
    if (!has_basis && !has_weights) bad("every lag lacks both a basis value and a weight");
    for (const auto& w : stored_weights)
        if (w && *w < 0.0) bad("weights must be non-negative");
    std::vector<bool> available;
    for (const auto& lm : lags) available.push_back(lm.available);
    bool fallback = false;
    const auto weights = agreement::normalize_weights(has_basis ? basis_values : stored_weights, available, fallback);
    profile.uniform_fallback = fallback;
    for (std::size_t t = 0; t < weights.size(); ++t) profile.lags[t].weight = weights[t];

    std::vector<std::optional<DroughtClass>> history;
    std::optional<YearMonth> end;
    if (j.contains("history") && !j.at("history").is_null()) {
        const Json& h = j.at("history");
        if (h.contains("end") && !h.at("end").is_null()) end = YearMonth::parse(h.at("end").get<std::string>());
        for (const auto& c : require(h, "classes")) {
            if (c.is_null())
                history.emplace_back(std::nullopt);
            else
                history.emplace_back(scheme.parse_label(c.get<std::string>()));
        }
    }

    return Model{
        .station_id = j.contains("station") ? j.at("station").get<std::string>() : std::string(),
        .scheme = scheme,
        .matrices = markov::TransitionMatrixSet(d, std::move(lags), std::move(freq)),
        .weights = std::move(profile),
        .history = std::move(history),
        .history_end = end,
    };
}

Model load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_input, "cannot open model file '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, path.string() + ": " + e.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, path.string() + ": " + e.what());
    }
}

} // namespace wmc::model
