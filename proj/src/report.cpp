#include "wmc/report.hpp"

#include <fmt/format.h>

#include "wmc/io.hpp"

namespace wmc::report {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json vector_json(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(x);
    return out;
}

Json row_json(const markov::Matrix& m, Eigen::Index row) {
    Json out = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(row, j));
    return out;
}

std::string label_or_dash(const std::optional<DroughtClass>& c, const ClassificationScheme& scheme) {
    return c ? scheme.label(*c) : std::string("--");
}

} // namespace

Json software_json() {
    Json out;
    out["name"] = software_name;
    out["version"] = software_version;
    return out;
}

Json config_json(const pipeline::RunConfig& c) {
    Json out;
    out["max_lag"] = c.max_lag ? Json(*c.max_lag) : Json("auto");
    out["auto_lag_cap"] = c.auto_lag_cap;
    out["steady_tolerance"] = c.steady_tolerance;
    out["weight_basis"] = agreement::to_string(c.weight_basis);
    Json scheme;
    scheme["labels"] = c.scheme.labels();
    Json bounds = Json::array();
    for (const auto& b : c.scheme.boundaries()) {
        Json jb;
        jb["value"] = b.value;
        jb["closed_below"] = b.closed_below;
        bounds.push_back(jb);
    }
    scheme["boundaries"] = bounds;
    scheme["neutral_class"] = c.scheme.labels()[c.scheme.neutral_index()];
    out["scheme"] = scheme;
    out["grouping"] = index::to_string(c.grouping);
    Json fit;
    fit["min_samples"] = c.fit.min_samples;
    Json methods = Json::array();
    for (auto m : c.fit.methods) methods.push_back(index::to_string(m));
    fit["methods"] = methods;
    fit["shift_non_positive"] = c.fit.shift_non_positive;
    fit["cdf_clamp"] = index::cdf_clamp;
    out["fit"] = fit;
    out["estimation_mode"] = markov::to_string(c.transitions.mode);
    out["smoothing_alpha"] = c.transitions.smoothing_alpha;
    out["horizon"] = c.horizon;
    out["iteration"] = forecast::to_string(c.iteration);
    out["holdout"] = c.holdout;
    out["refit"] = c.refit;
    out["backtest"] = c.run_backtest;
    out["seed"] = c.seed;
    return out;
}

Json weights_json(const agreement::LagWeightProfile& profile) {
    Json out;
    out["basis"] = agreement::to_string(profile.basis);
    out["uniform_fallback"] = profile.uniform_fallback;
    Json lags = Json::array();
    for (const auto& r : profile.lags) {
        Json jl;
        jl["lag"] = r.lag;
        jl["available"] = r.available;
        jl["pair_count"] = r.pair_count;
        jl["kappa"] = optional_number(r.statistics.kappa);
        jl["standard_error"] = optional_number(r.statistics.standard_error);
        jl["z"] = optional_number(r.statistics.z);
        jl["p_value"] = optional_number(r.statistics.p_value);
        jl["weight"] = r.weight;
        lags.push_back(jl);
    }
    out["lags"] = lags;
    return out;
}

Json matrices_json(const markov::TransitionMatrixSet& set, const ClassificationScheme& scheme) {
    Json out;
    out["class_frequencies"] = vector_json(set.class_frequencies());
    Json lags = Json::array();
    for (const auto& m : set.lags()) {
        Json jl;
        jl["lag"] = m.lag;
        jl["available"] = m.available;
        jl["total_pairs"] = m.total_pairs();
        Json rows;
        Json counts;
        for (std::size_t i = 0; i < set.class_count(); ++i) {
            const auto& label = scheme.label(DroughtClass::from_index(i));
            const auto ei = static_cast<Eigen::Index>(i);
            rows[label] = m.row_support[i] ? row_json(m.probabilities, ei) : Json(nullptr);
            Json c = Json::array();
            for (Eigen::Index j = 0; j < m.counts.cols(); ++j) c.push_back(m.counts(ei, j));
            counts[label] = c;
        }
        jl["rows"] = rows;
        jl["counts"] = counts;
        lags.push_back(jl);
    }
    out["lags"] = lags;
    return out;
}

Json forecast_json(const forecast::ForecastDistribution& f, const ClassificationScheme& scheme) {
    Json out;
    out["predicted_class"] = scheme.label(f.predicted_class);
    out["probabilities"] = vector_json(f.probabilities);
    out["used_lags"] = f.used_lags;
    out["renormalized"] = f.renormalized;
    out["tie_break_applied"] = f.tie_break_applied;
    Json trace;
    Json records = Json::array();
    for (const auto& r : f.trace.records) {
        Json jr;
        jr["lag"] = r.lag;
        jr["source_state"] = r.source_state ? Json(scheme.label(*r.source_state)) : Json(nullptr);
        jr["status"] = forecast::to_string(r.status);
        jr["weight"] = r.weight;
        jr["effective_weight"] = r.effective_weight;
        jr["row"] = r.row.empty() ? Json(nullptr) : vector_json(r.row);
        records.push_back(jr);
    }
    trace["records"] = records;
    trace["weighted_sum"] = vector_json(f.trace.weighted_sum);
    Json tied = Json::array();
    for (auto c : f.trace.tied_classes) tied.push_back(scheme.label(c));
    trace["tied_classes"] = tied;
    out["trace"] = trace;
    return out;
}

Json stationary_json(const markov::StationaryDistribution& pi, const ClassificationScheme&) {
    Json out;
    out["probabilities"] = vector_json(pi.probabilities);
    out["residual"] = pi.residual;
    out["method"] = markov::to_string(pi.method);
    out["iterations"] = pi.iterations;
    return out;
}

Json backtest_json(const evaluate::BacktestReport& r, const ClassificationScheme& scheme) {
    Json out;
    out["folds_evaluated"] = r.folds.size();
    out["folds_skipped"] = r.skipped.size();
    out["hit_rate"] = r.hit_rate;
    Json rates;
    for (const char* name : {evaluate::method_wmc, evaluate::method_markov_lag1, evaluate::method_climatology})
        rates[name] = r.baseline_hit_rates.at(name);
    out["hit_rates"] = rates;
    out["confusion"] = r.confusion;
    Json folds = Json::array();
    for (const auto& f : r.folds) {
        Json jf;
        jf["origin"] = f.origin.to_string();
        jf["observed"] = scheme.label(f.observed);
        jf["predicted"] = scheme.label(f.predicted);
        jf["markov_lag1"] = scheme.label(f.markov_lag1);
        jf["climatology"] = scheme.label(f.climatology);
        jf["probabilities"] = vector_json(f.distribution.probabilities);
        folds.push_back(jf);
    }
    out["folds"] = folds;
    Json skipped = Json::array();
    for (const auto& s : r.skipped) {
        Json js;
        js["origin"] = s.origin.to_string();
        js["reason"] = s.reason;
        skipped.push_back(js);
    }
    out["skipped"] = skipped;
    if (r.steady_state_comparison) {
        Json sc;
        sc["forecast"] = vector_json(r.steady_state_comparison->forecast);
        sc["stationary"] = vector_json(r.steady_state_comparison->stationary);
        sc["difference"] = vector_json(r.steady_state_comparison->difference);
        sc["max_abs_difference"] = r.steady_state_comparison->max_abs_difference;
        out["steady_state_comparison"] = sc;
    } else {
        out["steady_state_comparison"] = nullptr;
    }
    return out;
}

Json station_json(const pipeline::StationResult& r, const ClassificationScheme& scheme) {
    Json out;
    out["station"] = r.station_id;
    out["input_kind"] = io::to_string(r.kind);
    Json data;
    data["start"] = r.classes.start().to_string();
    data["end"] = r.classes.period(r.classes.size() - 1).to_string();
    data["months"] = r.classes.size();
    data["classified_months"] = r.classes.valid_count();
    data["class_counts"] = r.classes.class_counts();
    out["data"] = data;
    if (r.standardized) {
        Json models = Json::array();
        for (const auto& m : r.standardized->models) {
            Json jm;
            jm["calendar_month"] = m.calendar_month ? Json(*m.calendar_month) : Json("pooled");
            jm["family"] = index::to_string(m.family);
            jm["method"] = index::to_string(m.method);
            jm["parameters"] = vector_json(m.parameters);
            jm["shift"] = m.shift;
            jm["aic"] = m.aic;
            jm["ks_statistic"] = m.ks_statistic;
            jm["sample_size"] = m.sample_size;
            models.push_back(jm);
        }
        out["fitted_models"] = models;
    }
    out["max_lag"] = r.max_lag;
    out["steady_state_lag"] = r.steady_state_lag ? Json(*r.steady_state_lag) : Json(nullptr);
    out["weights"] = weights_json(r.weights);
    out["transition_matrices"] = matrices_json(r.matrices, scheme);
    Json forecasts = Json::array();
    for (std::size_t k = 0; k < r.forecasts.size(); ++k) {
        Json jf;
        jf["step"] = k + 1;
        jf["target"] = r.first_target.plus_months(static_cast<long>(k)).to_string();
        jf.update(forecast_json(r.forecasts[k], scheme));
        forecasts.push_back(jf);
    }
    out["forecasts"] = forecasts;
    out["stationary"] = r.stationary ? stationary_json(*r.stationary, scheme) : Json(nullptr);
    if (r.steady_comparison) {
        Json sc;
        sc["difference"] = vector_json(r.steady_comparison->difference);
        sc["max_abs_difference"] = r.steady_comparison->max_abs_difference;
        out["steady_state_comparison"] = sc;
    } else {
        out["steady_state_comparison"] = nullptr;
    }
    if (!r.stationary_note.empty()) out["stationary_note"] = r.stationary_note;
    out["backtest"] = r.backtest ? backtest_json(*r.backtest, scheme) : Json(nullptr);
    if (!r.backtest_note.empty()) out["backtest_note"] = r.backtest_note;
    return out;
}

Json report_json(const std::vector<pipeline::StationResult>& results, const pipeline::RunConfig& config) {
    Json out;
    out["software"] = software_json();
    out["config"] = config_json(config);
    out["classes"] = config.scheme.labels();
    Json stations = Json::array();
    for (const auto& r : results) stations.push_back(station_json(r, config.scheme));
    out["stations"] = stations;
    return out;
}

std::string trace_table(const forecast::ForecastDistribution& f, const ClassificationScheme& scheme,
                        YearMonth target) {
    std::string out;
    out += fmt::format("{:<9}{:<7}{:<6}{:>9}", "Month", "Class", "Step", "Weight");
    for (const auto& l : scheme.labels()) out += fmt::format("{:>9}", l);
    out += '\n';
    // Oldest source month first, as the trace is usually read top to bottom.
    for (auto it = f.trace.records.rbegin(); it != f.trace.records.rend(); ++it) {
        const auto& r = *it;
        out += fmt::format("{:<9}{:<7}{:<6}{:>9.5f}", target.plus_months(-r.lag).to_string(),
                           label_or_dash(r.source_state, scheme), fmt::format("P{}", r.lag), r.effective_weight);
        if (r.row.empty()) {
            out += fmt::format("  ({})", forecast::to_string(r.status));
        } else {
            for (double p : r.row) out += fmt::format("{:>9.5f}", p);
        }
        out += '\n';
    }
    out += fmt::format("{:<31}", "P* = sum W_t P_t");
    for (double p : f.probabilities) out += fmt::format("{:>9.5f}", p);
    out += '\n';
    out += fmt::format("predicted {}: {} (p = {:.4f}){}{}\n", target.to_string(), scheme.label(f.predicted_class),
                       f.probabilities[f.predicted_class.index()], f.renormalized ? " [weights renormalized]" : "",
                       f.tie_break_applied ? " [tie broken]" : "");
    return out;
}

std::string summary_text(const std::vector<pipeline::StationResult>& results, const pipeline::RunConfig& config) {
    const auto& scheme = config.scheme;
    std::string out = fmt::format("{} {} weighted Markov chain report\n", software_name, software_version);
    out += fmt::format("config: max_lag={} weight_basis={} grouping={} estimation={} smoothing={} horizon={} "
                       "iteration={} holdout={} refit={}\n",
                       config.max_lag ? std::to_string(*config.max_lag) : std::string("auto"),
                       agreement::to_string(config.weight_basis), index::to_string(config.grouping),
                       markov::to_string(config.transitions.mode), config.transitions.smoothing_alpha, config.horizon,
                       forecast::to_string(config.iteration), config.holdout, config.refit);
    out += "classes:";
    const auto& bounds = scheme.boundaries();
    for (std::size_t i = 0; i < scheme.class_count(); ++i) {
        const std::string lower =
            i == 0 ? "(-inf" : fmt::format("{}{}", bounds[i - 1].closed_below ? "(" : "[", bounds[i - 1].value);
        const std::string upper =
            i == bounds.size() ? "inf)" : fmt::format("{}{}", bounds[i].value, bounds[i].closed_below ? "]" : ")");
        out += fmt::format(" {} {},{}", scheme.labels()[i], lower, upper);
    }
    out += "\n";

    for (const auto& r : results) {
        out += fmt::format("\n== Station {} ({}, {} months {}..{}, {} classified) ==\n", r.station_id,
                           io::to_string(r.kind), r.classes.size(), r.classes.start().to_string(),
                           r.classes.period(r.classes.size() - 1).to_string(), r.classes.valid_count());
        if (r.steady_state_lag) out += fmt::format("max lag chosen from steady state: {}\n", *r.steady_state_lag);

        out += fmt::format("{:<13}", "Lag");
        for (const auto& l : r.weights.lags) out += fmt::format("{:>10}", l.lag);
        out += '\n';
        const auto stat_row = [&](const char* name, auto get) {
            out += fmt::format("{:<13}", name);
            for (const auto& l : r.weights.lags) {
                const std::optional<double> v = get(l);
                out += v ? fmt::format("{:>10.4f}", *v) : fmt::format("{:>10}", "Nil");
            }
            out += '\n';
        };
        stat_row("Kappa", [](const agreement::LagRecord& l) { return l.statistics.kappa; });
        stat_row("z", [](const agreement::LagRecord& l) { return l.statistics.z; });
        stat_row("P value", [](const agreement::LagRecord& l) { return l.statistics.p_value; });
        stat_row("Weights", [](const agreement::LagRecord& l) { return std::optional<double>(l.weight); });
        if (r.weights.uniform_fallback) out += "(no informative lag agreement: uniform weights)\n";

        out += '\n';
        out += trace_table(r.forecasts.front(), scheme, r.first_target);
        for (std::size_t k = 1; k < r.forecasts.size(); ++k) {
            const auto& f = r.forecasts[k];
            out += fmt::format("step {} ({}): {} (p = {:.4f})\n", k + 1,
                               r.first_target.plus_months(static_cast<long>(k)).to_string(),
                               scheme.label(f.predicted_class), f.probabilities[f.predicted_class.index()]);
        }

        out += '\n';
        out += fmt::format("{:<15}", "Statistics");
        for (const auto& l : scheme.labels()) out += fmt::format("{:>9}", l);
        out += '\n';
        out += fmt::format("{:<15}", "Forecast");
        for (double p : r.forecasts.front().probabilities) out += fmt::format("{:>9.4f}", p);
        out += '\n';
        if (r.stationary) {
            out += fmt::format("{:<15}", "Steady states");
            for (double p : r.stationary->probabilities) out += fmt::format("{:>9.4f}", p);
            out += '\n';
            out += fmt::format("{:<15}", "Difference");
            for (double p : r.steady_comparison->difference) out += fmt::format("{:>9.4f}", p);
            out += '\n';
            out += fmt::format("max |forecast - steady| = {:.4f} ({})\n", r.steady_comparison->max_abs_difference,
                               markov::to_string(r.stationary->method));
        } else {
            out += "steady state unavailable: " + r.stationary_note + "\n";
        }

        if (r.backtest) {
            const auto& b = *r.backtest;
            out += fmt::format("\nbacktest: {} folds ({} skipped), hit rate wmc={:.4f} markov-lag1={:.4f} "
                               "climatology={:.4f}\n",
                               b.folds.size(), b.skipped.size(), b.baseline_hit_rates.at(evaluate::method_wmc),
                               b.baseline_hit_rates.at(evaluate::method_markov_lag1),
                               b.baseline_hit_rates.at(evaluate::method_climatology));
            if (b.folds.size() <= 12) {
                for (const auto& f : b.folds)
                    out += fmt::format("  {} observed {} predicted {} ({})\n", f.origin.to_string(),
                                       scheme.label(f.observed), scheme.label(f.predicted),
                                       f.observed == f.predicted ? "hit" : "miss");
            }
        } else if (!r.backtest_note.empty()) {
            out += "\nbacktest unavailable: " + r.backtest_note + "\n";
        }
    }
    return out;
}

std::string forecast_csv(const std::vector<pipeline::StationResult>& results, const ClassificationScheme& scheme) {
    std::string out = "station,step,target,predicted";
    for (const auto& l : scheme.labels()) out += "," + l;
    out += '\n';
    for (const auto& r : results) {
        for (std::size_t k = 0; k < r.forecasts.size(); ++k) {
            const auto& f = r.forecasts[k];
            out += fmt::format("{},{},{},{}", r.station_id, k + 1,
                               r.first_target.plus_months(static_cast<long>(k)).to_string(),
                               scheme.label(f.predicted_class));
            for (double p : f.probabilities) out += "," + io::format_number(p);
            out += '\n';
        }
    }
    return out;
}

std::string confusion_csv(const std::vector<pipeline::StationResult>& results, const ClassificationScheme& scheme) {
    std::string out = "station,observed";
    for (const auto& l : scheme.labels()) out += "," + l;
    out += '\n';
    for (const auto& r : results) {
        if (!r.backtest) continue;
        for (std::size_t i = 0; i < r.backtest->confusion.size(); ++i) {
            out += r.station_id + "," + scheme.labels()[i];
            for (std::size_t c : r.backtest->confusion[i]) out += "," + std::to_string(c);
            out += '\n';
        }
    }
    return out;
}

} // namespace wmc::report
