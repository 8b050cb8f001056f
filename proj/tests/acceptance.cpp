// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include <fmt/format.h>

#include "oracles.hpp"
#include "wmc/model.hpp"
#include "wmc/report.hpp"
#include "wmc/simulate.hpp"

using namespace wmc;
using namespace wmc::classes;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits.
constexpr double weight_tolerance = 5e-4;
constexpr double forecast_tolerance = 1.5e-3;
constexpr double kappa_oracle_tolerance = 1e-12;
constexpr double two_state_tolerance = 1e-9;
constexpr double residual_tolerance = 1e-8;
constexpr double simplex_tolerance = 1e-12;
constexpr double independence_tolerance = 0.05;
constexpr double marginal_tolerance = 0.05;
constexpr double median_index_tolerance = 0.05;
constexpr double percentile_index_tolerance = 0.1;
constexpr double family_hit_share = 0.9;

constexpr double limit_1_ms = 1.0;
constexpr double limit_2_ms = 1.0;
constexpr double limit_4_s = 5.0;
constexpr double limit_5_s = 5.0;
constexpr double limit_7_s = 5.0;
constexpr double limit_8_s = 60.0;
constexpr double limit_9_s = 30.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Median wall time of `reps` calls, in milliseconds.
double median_ms(const std::function<void()>& f, int reps = 101) {
    std::vector<double> t;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        f();
        t.push_back(seconds_since(t0) * 1e3);
    }
    std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
    return t[static_cast<std::size_t>(reps / 2)];
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail = what;
            pass = false;
        }
    }
};

int failures = 0;

void report(int n, const char* title, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " | " << o.detail << std::endl;
    if (!o.pass) ++failures;
}

template <class F>
void run(int n, const char* title, F&& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    report(n, title, o);
}

const std::vector<std::optional<double>> reference_kappas{0.812, -0.0512, 0.0382, -0.0411, 0.0083, -0.0746, 0.003};
const std::vector<double> reference_weights{0.7895, 0.0498, 0.0371, 0.0400, 0.0081, 0.0725, 0.0029};

// Near-normal rows for lags 1..7, classes in rank order ED..EW.
const std::vector<std::vector<double>> near_normal_rows{
    {.0024, .0189, .0684, .7241, .1132, .0354, .0377}, {.0024, .0189, .0875, .6927, .1064, .0331, .0591},
    {.0024, .0166, .0711, .6967, .1137, .0355, .0640}, {0, .0190, .0926, .6651, .1188, .0475, .0570},
    {.0024, .0143, .0667, .6786, .1286, .0500, .0595}, {.0024, .0191, .0644, .6683, .1313, .0477, .0668},
    {0, .0167, .0670, .6842, .1364, .0455, .0502}};

markov::TransitionMatrixSet near_normal_set() {
    std::vector<markov::LagMatrix> lags;
    for (std::size_t t = 0; t < near_normal_rows.size(); ++t) {
        markov::LagMatrix m;
        m.lag = static_cast<int>(t) + 1;
        m.counts = markov::CountMatrix::Zero(7, 7);
        m.probabilities = markov::Matrix::Zero(7, 7);
        m.row_support.assign(7, false);
        for (Eigen::Index j = 0; j < 7; ++j) m.probabilities(NN.index(), j) = near_normal_rows[t][static_cast<std::size_t>(j)];
        m.row_support[NN.index()] = true;
        m.available = true;
        lags.push_back(std::move(m));
    }
    return markov::TransitionMatrixSet(7, std::move(lags), std::vector<double>(7, 1.0 / 7));
}

bool on_simplex(const std::vector<double>& p, double tol) {
    double s = 0.0;
    for (double x : p) {
        if (x < -tol) return false;
        s += x;
    }
    return std::abs(s - 1.0) <= tol;
}

markov::Matrix to_matrix(const std::vector<std::vector<double>>& m) {
    markov::Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void criterion_1(Outcome& o) {
    agreement::LagWeightProfile p;
    const double ms = median_ms([&] { p = agreement::profile_from_kappas(reference_kappas); });
    double worst = 0.0;
    for (int t = 1; t <= 7; ++t) worst = std::max(worst, std::abs(p.weight(t) - reference_weights[static_cast<std::size_t>(t - 1)]));
    o.detail = fmt::format("max |W - reference| = {:.2e} (tol {:.0e}), {:.4f} ms (limit {} ms)", worst, weight_tolerance, ms,
                           limit_1_ms);
    o.require(worst <= weight_tolerance, "weights off: " + o.detail);
    o.require(ms < limit_1_ms, "too slow: " + o.detail);
}

void criterion_2(Outcome& o) {
    const auto set = near_normal_set();
    const auto weights = agreement::profile_from_kappas(reference_kappas);
    const std::vector<DroughtClass> history(7, NN);
    forecast::ForecastDistribution f;
    const double ms = median_ms([&] { f = forecast::predict_one(std::span<const DroughtClass>(history), set, weights); });
    const double nn = f.probabilities[NN.index()], mw = f.probabilities[MW.index()], md = f.probabilities[MD.index()];
    o.detail = fmt::format("P*(NN)={:.5f} P*(MW)={:.5f} P*(MD)={:.5f} argmax={} , {:.4f} ms", nn, mw, md,
                           ClassificationScheme::standard().label(f.predicted_class), ms);
    o.require(std::abs(nn - 0.7146) <= forecast_tolerance, "NN off: " + o.detail);
    o.require(std::abs(mw - 0.1146) <= forecast_tolerance, "MW off: " + o.detail);
    o.require(std::abs(md - 0.0701) <= forecast_tolerance, "MD off: " + o.detail);
    o.require(f.predicted_class == NN, "argmax not NN: " + o.detail);
    o.require(ms < limit_2_ms, "too slow: " + o.detail);

    // The bundled model file must give the same answer.
    const auto m = model::load(fs::path(WMC_DATA_DIR) / "astor_near_normal_model.json");
    const auto g = forecast::predict_one(m.history, m.matrices, m.weights);
    o.require(std::abs(g.probabilities[NN.index()] - 0.7146) <= forecast_tolerance, "model file NN off");
}

void criterion_3(Outcome& o) {
    const auto data = io::ingest(fs::path(WMC_DATA_DIR) / "synthetic_stations.csv");
    pipeline::RunConfig cfg;
    cfg.holdout = 24;
    const auto results = pipeline::run_all(data, cfg);
    o.require(results.size() == 4, "expected 4 stations");
    for (const auto& r : results) {
        const std::string s = r.station_id + ": ";
        o.require(r.classes.size() == 756, s + "expected 63 years of months");
        o.require(r.classes.start() == YearMonth{1955, 1}, s + "wrong start");
        o.require(r.standardized && r.standardized->models.size() == 12, s + "expected 12 monthly fits");
        o.require(r.weights.lags.size() == 7, s + "expected 7 lags");
        double wsum = 0.0;
        for (const auto& l : r.weights.lags) {
            o.require(l.statistics.kappa && l.statistics.p_value, s + "kappa/p-value missing");
            if (l.statistics.kappa) o.require(*l.statistics.kappa <= 1.0, s + "kappa above 1");
            if (l.statistics.p_value) o.require(*l.statistics.p_value >= 0.0 && *l.statistics.p_value <= 1.0, s + "bad p-value");
            wsum += l.weight;
        }
        o.require(std::abs(wsum - 1.0) < simplex_tolerance, s + "weights not on the simplex");
        o.require(on_simplex(r.forecasts.front().probabilities, simplex_tolerance), s + "forecast not on the simplex");
        o.require(r.stationary.has_value(), s + "no stationary distribution");
        if (r.stationary) {
            o.require(on_simplex(r.stationary->probabilities, 1e-9), s + "stationary not on the simplex");
            o.require(r.stationary->residual < residual_tolerance, s + "stationary residual too large");
            double worst = 0.0;
            for (std::size_t j = 0; j < 7; ++j)
                worst = std::max(worst, std::abs(r.steady_comparison->difference[j] -
                                                 (r.forecasts.front().probabilities[j] - r.stationary->probabilities[j])));
            o.require(worst < 1e-15, s + "difference row inconsistent");
        }
        o.require(r.backtest && !r.backtest->folds.empty(), s + "backtest missing");
    }
    const std::string summary = report::summary_text(results, cfg);
    for (const char* row : {"Kappa", "P value", "Weights", "Forecast", "Steady states", "Difference"}) {
        std::size_t count = 0;
        for (auto pos = summary.find(std::string("\n") + row); pos != std::string::npos;
             pos = summary.find(std::string("\n") + row, pos + 1))
            ++count;
        o.require(count == results.size(), fmt::format("summary has {} '{}' rows", count, row));
    }
    const auto json = report::report_json(results, cfg);
    o.require(json.contains("software") && json.contains("config") && json["stations"].size() == 4,
              "report document incomplete");
    o.detail = fmt::format("{} stations x {} months, 7 lags, kappa, p value, weight, forecast and steady-state rows present", results.size(),
                           results.empty() ? 0 : results.front().classes.size());
}

void criterion_4(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4004);
    std::uniform_int_distribution<std::size_t> len(5, 200), dd(2, 7);
    std::uniform_real_distribution<double> miss(0.0, 0.15);
    int sequences = 0;
    long long pairs = 0;
    while (sequences < 100) {
        const std::size_t d = dd(rng);
        const auto seq = oracle::random_sequence(rng, len(rng), d, miss(rng));
        bool any = false;
        for (const auto& r : seq.runs()) any = any || r.length() >= 2;
        if (!any) continue; // estimate_transitions rejects sequences without a single pair
        ++sequences;
        const auto set = markov::estimate_transitions(seq, 7);
        for (int t = 1; t <= 7; ++t) {
            const auto expect = oracle::enumerate_pairs(seq, t);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const auto got = set.at_lag(t).counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    if (got != expect[i][j]) {
                        o.require(false, fmt::format("count mismatch at lag {} ({}, {}): {} vs {}", t, i, j, got, expect[i][j]));
                        return;
                    }
                    pairs += got;
                }
        }
    }
    const double s = seconds_since(t0);
    o.detail = fmt::format("{} sequences, {} pairs matched exactly, {:.3f} s", sequences, pairs, s);
    o.require(s < limit_4_s, "too slow: " + o.detail);
}

void criterion_5(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(5005);
    double worst = 0.0, worst2 = 0.0;
    int two = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t d = 2 + static_cast<std::size_t>(rep % 6);
        const auto t = oracle::random_table(rng, d);
        Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t[i][j];
        const auto k = agreement::weighted_kappa(agreement::ContingencyTable::from_proportions(m, 1000));
        const auto a = oracle::agreement_kappa(t);
        if (!k.kappa || !a) {
            o.require(false, "undefined kappa on a positive table");
            return;
        }
        worst = std::max(worst, std::abs(*k.kappa - *a));
        if (d == 2) {
            ++two;
            worst2 = std::max(worst2, std::abs(*k.kappa - oracle::cohen_kappa(t)));
        }
    }
    const double s = seconds_since(t0);
    o.detail = fmt::format("1000 tables: max diff vs agreement form {:.1e}, {} two-class tables max diff vs Cohen {:.1e}, {:.3f} s",
                           worst, two, worst2, s);
    o.require(worst <= kappa_oracle_tolerance, "agreement form differs: " + o.detail);
    o.require(worst2 <= kappa_oracle_tolerance, "Cohen differs: " + o.detail);
    o.require(s < limit_5_s, "too slow: " + o.detail);
}

void criterion_6(Outcome& o) {
    // perfect diagonal
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(7, 7);
    for (int i = 0; i < 7; ++i) diag(i, i) = 1.0 + i;
    const auto k = agreement::weighted_kappa(agreement::ContingencyTable::from_counts(diag));
    o.require(k.kappa && *k.kappa == 1.0, "perfect diagonal kappa != 1");

    // single lag
    const std::vector<std::optional<double>> single{0.37};
    o.require(agreement::profile_from_kappas(single).weight(1) == 1.0, "single-lag weight != 1");

    // m = 1 equals the lag-1 row exactly
    std::mt19937_64 rng(6006);
    const auto seq = oracle::random_sequence(rng, 500, 7, 0.0);
    const auto set = markov::estimate_transitions(seq, 1);
    const auto hist = forecast::tail(seq, 1);
    const auto f = forecast::predict_one(hist, set, agreement::weight_profile(seq, 1));
    const auto row = set.at_lag(1).row(hist.back()->index());
    bool exact = true;
    for (std::size_t j = 0; j < 7; ++j) exact = exact && f.probabilities[j] == row(static_cast<Eigen::Index>(j));
    o.require(exact, "m = 1 forecast differs from the lag-1 row");

    // identity matrix
    bool threw = false;
    try {
        markov::stationary(markov::Matrix::Identity(7, 7));
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::no_unique_stationary;
    }
    o.require(threw, "identity matrix did not raise no-unique-stationary");

    // constant sequence
    const auto constant = ClassSequence::from_classes(std::vector<DroughtClass>(50, NN));
    const auto p = agreement::weight_profile(constant, 3);
    bool undefined = true;
    for (const auto& l : p.lags) undefined = undefined && !l.statistics.kappa;
    o.require(undefined, "constant sequence kappa defined");
    o.require(p.uniform_fallback, "uniform fallback flag not set");
    o.detail = "diagonal kappa=1, single weight=1, m=1 row exact, identity rejected, constant -> uniform fallback";
}

void criterion_7(Outcome& o) {
    const auto t0 = Clock::now();
    markov::Matrix two(2, 2);
    two << 0.9, 0.1, 0.5, 0.5;
    const auto pi = markov::stationary(two);
    const double err = std::max(std::abs(pi.probabilities[0] - 5.0 / 6), std::abs(pi.probabilities[1] - 1.0 / 6));
    o.require(err <= two_state_tolerance, fmt::format("two-state error {:.1e}", err));
    std::mt19937_64 rng(7007);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 2 + static_cast<std::size_t>(rep % 6);
        const auto P = oracle::random_stochastic(rng, d);
        const auto s = markov::stationary(to_matrix(P));
        worst = std::max(worst, oracle::stationary_residual(s.probabilities, P));
        o.require(on_simplex(s.probabilities, simplex_tolerance), "pi off the simplex");
    }
    const double s = seconds_since(t0);
    o.detail = fmt::format("two-state error {:.1e}, max residual over 100 matrices {:.1e}, {:.3f} s", err, worst, s);
    o.require(worst < residual_tolerance, "residual too large: " + o.detail);
    o.require(s < limit_7_s, "too slow: " + o.detail);
}

void criterion_8(Outcome& o) {
    const auto t0 = Clock::now();
    simulate::Rng rng(8008);

    const auto indep = simulate::iid(std::vector<double>(7, 1.0 / 7), 10000, rng);
    const auto k = agreement::weighted_kappa(agreement::lagged_table(indep, 1));
    o.require(k.kappa && std::abs(*k.kappa) < independence_tolerance, "independent kappa too large");

    const std::vector<double> marginal{0.03, 0.06, 0.1, 0.58, 0.12, 0.07, 0.04};
    const auto iid = simulate::iid(marginal, 20000, rng);
    const auto set = markov::estimate_transitions(iid, 7);
    const auto f = forecast::predict_one(forecast::tail(iid, 7), set, agreement::weight_profile(iid, 7));
    const auto counts = iid.class_counts();
    double gap = 0.0;
    for (std::size_t j = 0; j < 7; ++j)
        gap = std::max(gap, std::abs(f.probabilities[j] - static_cast<double>(counts[j]) / static_cast<double>(iid.valid_count())));
    o.require(gap < marginal_tolerance, "i.i.d. forecast far from the marginal");

    markov::Matrix p = markov::Matrix::Constant(7, 7, 0.1 / 6);
    p.diagonal().setConstant(0.9);
    const auto chain = simulate::markov_chain(p, 2070, rng, NN.index());
    evaluate::BacktestConfig cfg; // refit every fold
    cfg.max_lag = 7;
    cfg.holdout = 2000;
    const auto bt = evaluate::backtest(chain, cfg);
    const double wmc_rate = bt.hit_rate;
    const double clim = bt.baseline_hit_rates.at(evaluate::method_climatology);
    o.require(bt.folds.size() == 2000, fmt::format("{} folds evaluated", bt.folds.size()));
    o.require(wmc_rate >= clim, "WMC below climatology");
    const double s = seconds_since(t0);
    o.detail = fmt::format("|kappa|={:.4f}, forecast-marginal gap={:.4f}, hit rate wmc={:.4f} vs climatology={:.4f} over {} folds, {:.2f} s",
                           k.kappa ? std::abs(*k.kappa) : -1.0, gap, wmc_rate, clim, bt.folds.size(), s);
    o.require(s < limit_8_s, "too slow: " + o.detail);
}

void criterion_9(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(9009);
    std::gamma_distribution<double> g(2.0, 10.0);
    std::vector<double> x(5000);
    for (auto& v : x) v = g(rng);
    const auto res = index::standardize(
        index::RawSeries("S", YearMonth{1, 1}, std::vector<std::optional<double>>(x.begin(), x.end())), index::Grouping::pooled);
    const auto& m = res.models.front();
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[2499] + sorted[2500]);
    const double at_median = index::to_index(m, median);
    const double at_977 = index::to_index(m, m.quantile(0.977));
    o.require(std::abs(at_median) < median_index_tolerance, "median index too far from 0");
    o.require(std::abs(at_977 - 2.0) < percentile_index_tolerance, "97.7th percentile index too far from 2");

    int hits = 0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        const auto family = static_cast<index::Family>(rep % 3);
        std::vector<double> s(2000);
        std::normal_distribution<double> nd(50.0, 8.0);
        std::gamma_distribution<double> gd(2.0, 5.0);
        std::lognormal_distribution<double> ld(2.0, 0.5);
        for (auto& v : s)
            v = family == index::Family::normal ? nd(rng) : family == index::Family::gamma ? gd(rng) : ld(rng);
        hits += index::select_model(index::fit_candidates(s)).family == family ? 1 : 0;
    }
    const double share = static_cast<double>(hits) / reps;
    o.require(share > family_hit_share, fmt::format("true family chosen in {:.0f}% of replications", 100 * share));
    const double sec = seconds_since(t0);
    o.detail = fmt::format("index(median)={:.4f}, index(q0.977)={:.4f}, AIC picked the true family {}/{}, {:.2f} s",
                           at_median, at_977, hits, reps, sec);
    o.require(sec < limit_9_s, "too slow: " + o.detail);
}

void criterion_10(Outcome& o) {
    const fs::path base = fs::temp_directory_path() / fmt::format("wmc-acceptance-{}", ::getpid());
    fs::remove_all(base);
    const std::string input = (fs::path(WMC_DATA_DIR) / "synthetic_stations.csv").string();
    std::string bytes[2];
    for (int i = 0; i < 2; ++i) {
        const fs::path out = base / fmt::format("run{}", i);
        const std::string cmd =
            fmt::format("\"{}\" report --input \"{}\" --out-dir \"{}\" --holdout 24", WMC_CLI_PATH, input, out.string());
        const int rc = std::system(cmd.c_str());
        o.require(rc == 0, fmt::format("CLI run {} exited with {}", i + 1, rc));
        bytes[i] = read_file(out / "report.json");
    }
    fs::remove_all(base);
    o.require(!bytes[0].empty(), "report.json missing or empty");
    o.require(bytes[0] == bytes[1], "report.json differs between runs");
    o.detail = fmt::format("two CLI runs, report.json {} bytes, identical={}", bytes[0].size(), bytes[0] == bytes[1]);
}

} // namespace

int main() {
    run(1, "lag weights from seven kappas", criterion_1);
    run(2, "weighted forecast from seven near-normal rows", criterion_2);
    run(3, "end-to-end report on the synthetic 63-year dataset", criterion_3);
    run(4, "transition counts vs pair enumeration", criterion_4);
    run(5, "kappa vs agreement-weight and Cohen oracles", criterion_5);
    run(6, "degeneracy suite", criterion_6);
    run(7, "stationary solver", criterion_7);
    run(8, "statistical suite", criterion_8);
    run(9, "index standardization and family selection", criterion_9);
    run(10, "byte-identical CLI reports", criterion_10);
    return failures == 0 ? 0 : 1;
}
