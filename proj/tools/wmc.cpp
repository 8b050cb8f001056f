// wmc: weighted Markov chain drought-class forecaster.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "wmc/model.hpp"
#include "wmc/report.hpp"
#include "wmc/simulate.hpp"

namespace fs = std::filesystem;
using namespace wmc;
using report::Json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_numerical = 3;

const char* class_table = R"(Default classes (index value x):
  ED  extremely dry   x <= -2
  SD  severely dry    -2 < x <= -1.5
  MD  moderately dry  -1.5 < x <= -1
  NN  near normal     -1 < x < 1
  MW  moderately wet  1 <= x < 1.5
  SW  severely wet    1.5 <= x < 2
  EW  extremely wet   x >= 2
Negative cut points belong to the drier class, non-negative ones to the wetter
class. Override with --thresholds (ascending cut points) and --labels.

Input CSV headers (UTF-8, periods YYYY-MM, empty field = missing):
  station,period,precip_mm,tmean_c   raw climate, precip_mm is standardized
  station,period,aggregate           raw user-computed aggregate
  station,period,index               precomputed index
  station,period,class               precomputed class labels

Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical failure.
Set WMC_VERBOSE=1 to log progress to stderr.)";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool verbose() {
    const char* v = std::getenv("WMC_VERBOSE");
    return v && *v && std::string(v) != "0";
}

void log(const std::string& msg) {
    if (verbose()) std::cerr << "wmc: " << msg << '\n';
}

struct Options {
    std::string input;
    std::string kind = "auto";
    std::string station;
    std::string output;
    std::string format = "json";
    std::string thresholds;
    std::string labels;
    std::string max_lag = "7";
    int lag_cap = 12;
    double steady_tolerance = 0.01;
    std::string weight_basis = "kappa";
    std::string grouping = "month";
    std::string fit_methods = "both";
    std::size_t min_samples = 20;
    bool shift = false;
    double smoothing = 0.0;
    std::string mode = "direct";
    int horizon = 1;
    std::string iteration = "point";
    std::size_t holdout = 1;
    bool no_refit = false;
    bool no_backtest = false;
    std::uint64_t seed = 1955;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : cur.substr(b, e - b + 1));
    }
    return out;
}

ClassificationScheme make_scheme(const Options& o) {
    if (o.thresholds.empty() && o.labels.empty()) return ClassificationScheme::standard();
    if (o.thresholds.empty() || o.labels.empty()) throw UsageError("--thresholds and --labels must be given together");
    std::vector<double> cuts;
    for (const auto& t : split(o.thresholds, ',')) {
        try {
            std::size_t used = 0;
            cuts.push_back(std::stod(t, &used));
            if (used != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw UsageError("bad threshold '" + t + "'");
        }
    }
    try {
        return ClassificationScheme::from_cuts(split(o.labels, ','), cuts);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

pipeline::RunConfig make_config(const Options& o) {
    pipeline::RunConfig c;
    if (o.max_lag == "auto") {
        c.max_lag.reset();
    } else {
        try {
            std::size_t used = 0;
            c.max_lag = std::stoi(o.max_lag, &used);
            if (used != o.max_lag.size()) throw std::invalid_argument(o.max_lag);
        } catch (const std::exception&) {
            throw UsageError("--max-lag must be a positive integer or 'auto'");
        }
    }
    c.auto_lag_cap = o.lag_cap;
    c.steady_tolerance = o.steady_tolerance;
    c.weight_basis = o.weight_basis == "z" ? agreement::WeightBasis::z : agreement::WeightBasis::kappa;
    c.scheme = make_scheme(o);
    c.grouping = o.grouping == "pooled" ? index::Grouping::pooled : index::Grouping::per_calendar_month;
    if (o.fit_methods == "l-moments") c.fit.methods = {index::EstimationMethod::l_moments};
    else if (o.fit_methods == "mle") c.fit.methods = {index::EstimationMethod::mle};
    c.fit.min_samples = o.min_samples;
    c.fit.shift_non_positive = o.shift;
    c.transitions.mode = o.mode == "power" ? markov::EstimationMode::matrix_power : markov::EstimationMode::direct;
    c.transitions.smoothing_alpha = o.smoothing;
    c.horizon = o.horizon;
    c.iteration = o.iteration == "distribution" ? forecast::IterationMode::distribution : forecast::IterationMode::point;
    c.holdout = o.holdout;
    c.refit = !o.no_refit;
    c.run_backtest = !o.no_backtest;
    c.seed = o.seed;
    try {
        c.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return c;
}

std::optional<io::InputKind> input_kind(const Options& o) {
    if (o.kind == "auto") return std::nullopt;
    return io::parse_input_kind(o.kind);
}

std::vector<io::StationDataset> load_input(const Options& o, const pipeline::RunConfig& c) {
    if (o.input.empty()) throw UsageError("--input is required");
    log("reading " + o.input);
    auto all = io::ingest(o.input, input_kind(o), c.scheme);
    if (o.station.empty()) return all;
    std::vector<io::StationDataset> picked;
    for (auto& ds : all)
        if (ds.station_id == o.station) picked.push_back(std::move(ds));
    if (picked.empty()) throw Error(ErrorKind::invalid_input, "station '" + o.station + "' not found in " + o.input);
    return picked;
}

const io::StationDataset& single_station(const std::vector<io::StationDataset>& all) {
    if (all.size() != 1) throw UsageError("input holds several stations; choose one with --station");
    return all.front();
}

/// Writes `content` to the output path (atomically via a temporary file) or stdout.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorKind::invalid_input, "cannot write '" + path + "'");
        out << content;
        if (!out) throw Error(ErrorKind::invalid_input, "cannot write '" + path + "'");
    }
    fs::rename(tmp, target);
    log("wrote " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json document(const pipeline::RunConfig& c) {
    Json out;
    out["software"] = report::software_json();
    out["config"] = report::config_json(c);
    out["classes"] = c.scheme.labels();
    return out;
}

std::vector<std::optional<DroughtClass>> parse_history(const std::string& text, const ClassificationScheme& scheme) {
    std::vector<std::optional<DroughtClass>> out;
    for (const auto& tok : split(text, ',')) {
        if (tok.empty() || tok == "-" || tok == "NA") out.emplace_back(std::nullopt);
        else out.emplace_back(scheme.parse_label(tok));
    }
    if (out.empty()) throw UsageError("--history is empty");
    return out;
}

// ---- subcommands ----------------------------------------------------------

int cmd_standardize(const Options& o) {
    const auto c = make_config(o);
    const auto data = load_input(o, c);
    std::ostringstream csv;
    Json doc = document(c);
    Json stations = Json::array();
    bool header = true;
    for (const auto& ds : data) {
        if (ds.kind != io::InputKind::raw_climate)
            throw Error(ErrorKind::invalid_input, "standardize needs raw climate input");
        const auto res = index::standardize(ds.raw(), c.grouping, c.fit);
        std::ostringstream one;
        io::write_index_csv(one, res.index);
        std::string body = one.str();
        if (!header) body = body.substr(body.find('\n') + 1);
        header = false;
        csv << body;
        Json js;
        js["station"] = ds.station_id;
        Json models = Json::array();
        for (const auto& m : res.models) {
            Json jm;
            jm["calendar_month"] = m.calendar_month ? Json(*m.calendar_month) : Json("pooled");
            jm["family"] = index::to_string(m.family);
            jm["method"] = index::to_string(m.method);
            jm["parameters"] = m.parameters;
            jm["shift"] = m.shift;
            jm["aic"] = m.aic;
            jm["ks_statistic"] = m.ks_statistic;
            jm["sample_size"] = m.sample_size;
            models.push_back(jm);
        }
        js["fitted_models"] = models;
        Json values = Json::array();
        for (std::size_t i = 0; i < res.index.size(); ++i)
            values.push_back(res.index[i] ? Json(*res.index[i]) : Json(nullptr));
        js["start"] = res.index.start().to_string();
        js["index"] = values;
        stations.push_back(js);
    }
    doc["stations"] = stations;
    emit(o.output, o.format == "json" ? dump(doc) : csv.str());
    return exit_ok;
}

int cmd_classify(const Options& o) {
    const auto c = make_config(o);
    const auto data = load_input(o, c);
    std::string out;
    bool header = true;
    for (const auto& ds : data) {
        const ClassSequence seq = pipeline::prepare_classes(ds, c);
        std::ostringstream one;
        io::write_classes_csv(one, seq, c.scheme);
        std::string body = one.str();
        if (!header) body = body.substr(body.find('\n') + 1);
        header = false;
        out += body;
    }
    emit(o.output, out);
    return exit_ok;
}

pipeline::StationResult fit_station(const io::StationDataset& ds, pipeline::RunConfig c) {
    c.run_backtest = false;
    log("fitting station " + ds.station_id);
    return pipeline::run_station(ds, c);
}

int cmd_fit(const Options& o) {
    const auto c = make_config(o);
    const auto data = load_input(o, c);
    const auto result = fit_station(single_station(data), c);
    const model::Model m = model::from_result(result, c.scheme);
    if (o.format == "text") {
        emit(o.output, report::summary_text({result}, c));
    } else {
        emit(o.output, dump(model::to_json(m)));
    }
    return exit_ok;
}

struct Predicted {
    std::string station;
    YearMonth first_target;
    std::vector<forecast::ForecastDistribution> forecasts;
};

int cmd_predict(const Options& o, const std::string& model_path, const std::string& history_text) {
    const auto c = make_config(o);
    std::vector<Predicted> out;
    ClassificationScheme scheme = c.scheme;
    if (!model_path.empty()) {
        if (!o.input.empty()) throw UsageError("give either --model or --input, not both");
        log("loading model " + model_path);
        const model::Model m = model::load(model_path);
        scheme = m.scheme;
        auto history = history_text.empty() ? m.history : parse_history(history_text, scheme);
        if (history.empty()) throw UsageError("model has no history; pass --history");
        forecast::ForecastOptions fo;
        fo.neutral_index = scheme.neutral_index();
        const YearMonth target =
            history_text.empty() && m.history_end ? m.history_end->plus_months(1) : YearMonth{0, 1};
        out.push_back({m.station_id, target,
                       forecast::predict_iterated(history, m.matrices, m.weights, c.horizon, c.iteration, fo)});
    } else {
        const auto data = load_input(o, c);
        for (const auto& ds : data) {
            auto result = fit_station(ds, c);
            if (!history_text.empty()) {
                forecast::ForecastOptions fo;
                fo.neutral_index = scheme.neutral_index();
                result.forecasts = forecast::predict_iterated(parse_history(history_text, scheme), result.matrices,
                                                              result.weights, c.horizon, c.iteration, fo);
                result.first_target = YearMonth{0, 1};
            }
            out.push_back({result.station_id, result.first_target, std::move(result.forecasts)});
        }
    }

    const auto target_text = [](YearMonth t, std::size_t k) {
        return t.year == 0 ? fmt::format("t+{}", k + 1) : t.plus_months(static_cast<long>(k)).to_string();
    };
    if (o.format == "text") {
        std::string text;
        for (const auto& p : out) {
            text += fmt::format("== Station {} ==\n", p.station);
            const YearMonth shown = p.first_target.year == 0 ? YearMonth{1, 1} : p.first_target;
            text += report::trace_table(p.forecasts.front(), scheme, shown);
            for (std::size_t k = 1; k < p.forecasts.size(); ++k)
                text += fmt::format("step {} ({}): {}\n", k + 1, target_text(p.first_target, k),
                                    scheme.label(p.forecasts[k].predicted_class));
        }
        emit(o.output, text);
        return exit_ok;
    }
    pipeline::RunConfig echo = c;
    echo.scheme = scheme;
    Json doc = document(echo);
    if (!model_path.empty()) doc["model"] = model_path;
    Json stations = Json::array();
    for (const auto& p : out) {
        Json js;
        js["station"] = p.station;
        Json fs_ = Json::array();
        for (std::size_t k = 0; k < p.forecasts.size(); ++k) {
            Json jf;
            jf["step"] = k + 1;
            jf["target"] = target_text(p.first_target, k);
            jf.update(report::forecast_json(p.forecasts[k], scheme));
            fs_.push_back(jf);
        }
        js["forecasts"] = fs_;
        stations.push_back(js);
    }
    doc["stations"] = stations;
    emit(o.output, dump(doc));
    return exit_ok;
}

int cmd_backtest(const Options& o) {
    const auto c = make_config(o);
    const auto data = load_input(o, c);
    Json doc = document(c);
    Json stations = Json::array();
    std::string text;
    for (const auto& ds : data) {
        const ClassSequence seq = pipeline::prepare_classes(ds, c);
        evaluate::BacktestConfig bc;
        bc.max_lag = c.max_lag.value_or(7);
        if (!c.max_lag) {
            const auto capped = markov::estimate_transitions(seq, c.auto_lag_cap, c.transitions);
            bc.max_lag = capped.available_lag_count() >= 2 ? markov::steady_state_lag(capped, c.steady_tolerance) : 1;
        }
        bc.weight_basis = c.weight_basis;
        bc.holdout = c.holdout;
        bc.refit = c.refit;
        bc.transitions = c.transitions;
        bc.forecast.neutral_index = c.scheme.neutral_index();
        log("backtesting station " + ds.station_id);
        const auto rep = evaluate::backtest(seq, bc);
        Json js;
        js["station"] = ds.station_id;
        js["max_lag"] = bc.max_lag;
        js.update(report::backtest_json(rep, c.scheme));
        stations.push_back(js);
        text += fmt::format("{}: {} folds ({} skipped), hit rate wmc={:.4f} markov-lag1={:.4f} climatology={:.4f}\n",
                            ds.station_id, rep.folds.size(), rep.skipped.size(),
                            rep.baseline_hit_rates.at(evaluate::method_wmc),
                            rep.baseline_hit_rates.at(evaluate::method_markov_lag1),
                            rep.baseline_hit_rates.at(evaluate::method_climatology));
        text += fmt::format("  confusion (rows observed, columns predicted): {}\n", fmt::join(c.scheme.labels(), " "));
        for (std::size_t i = 0; i < rep.confusion.size(); ++i)
            text += fmt::format("  {:<4}{}\n", c.scheme.labels()[i], fmt::join(rep.confusion[i], " "));
    }
    doc["stations"] = stations;
    emit(o.output, o.format == "json" ? dump(doc) : text);
    return exit_ok;
}

int cmd_steady(const Options& o, const std::string& model_path) {
    const auto c = make_config(o);
    struct Item {
        std::string station;
        const markov::TransitionMatrixSet* set;
        std::vector<double> forecast;
    };
    std::vector<pipeline::StationResult> results;
    std::optional<model::Model> m;
    std::vector<Item> items;
    ClassificationScheme scheme = c.scheme;
    if (!model_path.empty()) {
        m = model::load(model_path);
        scheme = m->scheme;
        std::vector<double> f;
        if (!m->history.empty()) {
            forecast::ForecastOptions fo;
            fo.neutral_index = scheme.neutral_index();
            f = forecast::predict_one(m->history, m->matrices, m->weights, fo).probabilities;
        }
        items.push_back({m->station_id, &m->matrices, f});
    } else {
        const auto data = load_input(o, c);
        for (const auto& ds : data) results.push_back(fit_station(ds, c));
        for (const auto& r : results) items.push_back({r.station_id, &r.matrices, r.forecasts.front().probabilities});
    }
    pipeline::RunConfig echo = c;
    echo.scheme = scheme;
    Json doc = document(echo);
    Json stations = Json::array();
    std::string text;
    for (const auto& it : items) {
        Json js;
        js["station"] = it.station;
        const auto pi = markov::stationary(*it.set);
        js["stationary"] = report::stationary_json(pi, scheme);
        std::optional<int> sl;
        if (it.set->available_lag_count() >= 2) sl = markov::steady_state_lag(*it.set, c.steady_tolerance);
        js["steady_state_lag"] = sl ? Json(*sl) : Json(nullptr);
        text += fmt::format("== Station {} ==\n{:<15}", it.station, "Statistics");
        for (const auto& l : scheme.labels()) text += fmt::format("{:>9}", l);
        text += fmt::format("\n{:<15}", "Steady states");
        for (double p : pi.probabilities) text += fmt::format("{:>9.4f}", p);
        text += '\n';
        if (!it.forecast.empty()) {
            const auto cmp = evaluate::compare_steady(it.forecast, pi);
            js["forecast"] = cmp.forecast;
            js["difference"] = cmp.difference;
            js["max_abs_difference"] = cmp.max_abs_difference;
            text += fmt::format("{:<15}", "Forecast");
            for (double p : cmp.forecast) text += fmt::format("{:>9.4f}", p);
            text += fmt::format("\n{:<15}", "Difference");
            for (double p : cmp.difference) text += fmt::format("{:>9.4f}", p);
            text += fmt::format("\nmax |forecast - steady| = {:.4f}\n", cmp.max_abs_difference);
        }
        text += fmt::format("steady-state lag (tolerance {}): {}\n", c.steady_tolerance,
                            sl ? std::to_string(*sl) : std::string("n/a"));
        stations.push_back(js);
    }
    doc["stations"] = stations;
    emit(o.output, o.format == "json" ? dump(doc) : text);
    return exit_ok;
}

int cmd_report(const Options& o, const std::string& out_dir) {
    const auto c = make_config(o);
    const auto data = load_input(o, c);
    log(fmt::format("running {} station(s)", data.size()));
    const auto results = pipeline::run_all(data, c);
    // Everything is rendered before any file is touched.
    const std::string json = dump(report::report_json(results, c));
    const std::string summary = report::summary_text(results, c);
    const std::string fcsv = report::forecast_csv(results, c.scheme);
    const std::string ccsv = report::confusion_csv(results, c.scheme);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    emit((dir / "report.json").string(), json);
    emit((dir / "summary.txt").string(), summary);
    emit((dir / "forecast.csv").string(), fcsv);
    emit((dir / "confusion.csv").string(), ccsv);
    if (o.format == "text") std::cout << summary;
    return exit_ok;
}

int cmd_simulate(const Options& o, int stations, const std::string& start, const std::string& end, double missing) {
    simulate::ClimateOptions so;
    so.stations = stations;
    so.start = YearMonth::parse(start);
    so.end = YearMonth::parse(end);
    so.missing_rate = missing;
    const auto sim = simulate::climate(so, o.seed);
    std::vector<index::RawSeries> precip, temp;
    for (const auto& s : sim) {
        precip.push_back(s.precipitation);
        temp.push_back(s.temperature);
    }
    std::ostringstream out;
    io::write_raw_csv(out, precip, temp);
    emit(o.output, out.str());
    return exit_ok;
}

void add_input(CLI::App* app, Options& o) {
    app->add_option("-i,--input", o.input, "Input CSV file")->check(CLI::ExistingFile);
    app->add_option("--kind", o.kind, "Input kind: auto, raw, index or classes")
        ->check(CLI::IsMember({"auto", "raw", "index", "classes", "raw-climate", "precomputed-index",
                               "precomputed-classes"}));
    app->add_option("--station", o.station, "Only process this station");
}

void add_output(CLI::App* app, Options& o, const std::string& default_format) {
    // Options is shared by all subcommands; the default is applied after parsing.
    app->add_option("-o,--output", o.output, "Output file (default: stdout)");
    app->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->default_str(default_format);
}

void add_scheme(CLI::App* app, Options& o) {
    app->add_option("--thresholds", o.thresholds, "Ascending class cut points, comma separated");
    app->add_option("--labels", o.labels, "Class labels, driest first, comma separated");
}

void add_index(CLI::App* app, Options& o) {
    app->add_option("--grouping", o.grouping, "Fit per calendar month or pooled")
        ->check(CLI::IsMember({"month", "pooled"}))
        ->capture_default_str();
    app->add_option("--fit-method", o.fit_methods, "Parameter estimation: both, l-moments or mle")
        ->check(CLI::IsMember({"both", "l-moments", "mle"}))
        ->capture_default_str();
    app->add_option("--min-samples", o.min_samples, "Minimum non-missing values per fitted group")
        ->capture_default_str();
    app->add_flag("--shift", o.shift, "Shift non-positive samples so gamma/log-normal can be fitted");
}

void add_model(CLI::App* app, Options& o) {
    app->add_option("--max-lag", o.max_lag, "Highest lag m (1..120) or 'auto' for the steady-state lag")
        ->capture_default_str();
    app->add_option("--lag-cap", o.lag_cap, "Largest lag considered by --max-lag auto")->capture_default_str();
    app->add_option("--steady-tolerance", o.steady_tolerance, "Steady-state tolerance (max-norm)")
        ->capture_default_str();
    app->add_option("--weight-basis", o.weight_basis, "Lag weights from |kappa| or |z|")
        ->check(CLI::IsMember({"kappa", "z"}))
        ->capture_default_str();
    app->add_option("--smoothing", o.smoothing, "Additive (Laplace) smoothing alpha")->capture_default_str();
    app->add_option("--mode", o.mode, "Lag-t matrices: direct counts or powers of the one-step matrix")
        ->check(CLI::IsMember({"direct", "power"}))
        ->capture_default_str();
}

void add_forecast(CLI::App* app, Options& o) {
    app->add_option("--horizon", o.horizon, "Months ahead (1..120)")->capture_default_str();
    app->add_option("--iteration", o.iteration, "Multi-step chaining: point or distribution")
        ->check(CLI::IsMember({"point", "distribution"}))
        ->capture_default_str();
}

void add_backtest(CLI::App* app, Options& o) {
    app->add_option("--holdout", o.holdout, "Number of final months used as forecast origins")
        ->capture_default_str();
    app->add_flag("--no-refit", o.no_refit, "Fit once on data before the first origin");
}

int run(int argc, char** argv) {
    CLI::App app{"wmc: weighted Markov chain forecaster for ordinal drought classes.\n\n" + std::string(class_table),
                 "wmc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(report::software_version));
    Options o;
    app.add_option("--seed", o.seed, "Random seed (simulate)")->capture_default_str();

    auto* standardize = app.add_subcommand("standardize", "Fit distributions to raw input and write the index");
    add_input(standardize, o);
    add_output(standardize, o, "text");
    add_index(standardize, o);

    auto* classify = app.add_subcommand("classify", "Write the class sequence of raw or index input");
    add_input(classify, o);
    add_scheme(classify, o);
    add_index(classify, o);
    classify->add_option("-o,--output", o.output, "Output file (default: stdout)");

    auto* fit = app.add_subcommand("fit", "Estimate transition matrices and lag weights; write a model file");
    add_input(fit, o);
    add_output(fit, o, "json");
    add_scheme(fit, o);
    add_index(fit, o);
    add_model(fit, o);

    std::string model_path, history;
    auto* predict = app.add_subcommand("predict", "Forecast the next class(es) from a model file or input data");
    add_input(predict, o);
    predict->add_option("--model", model_path, "Model file written by 'wmc fit'")->check(CLI::ExistingFile);
    predict->add_option("--history", history,
                        "Recent classes, oldest first, comma separated ('-' for missing); overrides the stored history");
    add_output(predict, o, "json");
    add_scheme(predict, o);
    add_index(predict, o);
    add_model(predict, o);
    add_forecast(predict, o);

    auto* backtest = app.add_subcommand("backtest", "Rolling-origin evaluation against lag-1 Markov and climatology");
    add_input(backtest, o);
    add_output(backtest, o, "json");
    add_scheme(backtest, o);
    add_index(backtest, o);
    add_model(backtest, o);
    add_backtest(backtest, o);

    auto* steady = app.add_subcommand("steady", "Stationary distribution and steady-state lag");
    add_input(steady, o);
    steady->add_option("--model", model_path, "Model file written by 'wmc fit'")->check(CLI::ExistingFile);
    add_output(steady, o, "json");
    add_scheme(steady, o);
    add_index(steady, o);
    add_model(steady, o);

    std::string out_dir;
    auto* rep = app.add_subcommand("report", "Run everything; write report.json, summary.txt, forecast.csv, confusion.csv");
    add_input(rep, o);
    rep->add_option("--out-dir", out_dir, "Output directory")->required();
    rep->add_option("--format", o.format, "Also print the summary to stdout when 'text'")
        ->check(CLI::IsMember({"json", "text"}))
        ->default_str("json");
    add_scheme(rep, o);
    add_index(rep, o);
    add_model(rep, o);
    add_forecast(rep, o);
    add_backtest(rep, o);
    rep->add_flag("--no-backtest", o.no_backtest, "Skip the backtest");

    int sim_stations = 4;
    std::string sim_start = "1955-01", sim_end = "2017-12";
    double sim_missing = 0.002;
    auto* sim = app.add_subcommand("simulate", "Write a seeded synthetic raw-climate CSV");
    sim->add_option("--stations", sim_stations, "Number of stations")->capture_default_str();
    sim->add_option("--start", sim_start, "First month (YYYY-MM)")->capture_default_str();
    sim->add_option("--end", sim_end, "Last month (YYYY-MM)")->capture_default_str();
    sim->add_option("--missing-rate", sim_missing, "Share of months left blank")->capture_default_str();
    sim->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sim->add_option("-o,--output", o.output, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    for (const auto* sub : app.get_subcommands()) {
        const auto* format = sub->get_option_no_throw("--format");
        if (format && format->count() == 0) o.format = format->get_default_str();
    }

    if (*standardize) return cmd_standardize(o);
    if (*classify) return cmd_classify(o);
    if (*fit) return cmd_fit(o);
    if (*predict) {
        if (model_path.empty() && o.input.empty()) throw UsageError("predict needs --model or --input");
        return cmd_predict(o, model_path, history);
    }
    if (*backtest) return cmd_backtest(o);
    if (*steady) {
        if (model_path.empty() && o.input.empty()) throw UsageError("steady needs --model or --input");
        return cmd_steady(o, model_path);
    }
    if (*rep) return cmd_report(o, out_dir);
    if (*sim) return cmd_simulate(o, sim_stations, sim_start, sim_end, sim_missing);
    return exit_usage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "wmc: usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "wmc: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.category() == ErrorCategory::numerical ? exit_numerical : exit_data;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "wmc: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "wmc: internal error: " << e.what() << '\n';
        return exit_numerical;
    }
}
