#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wmc/evaluate.hpp"
#include "wmc/simulate.hpp"

using namespace wmc;
using namespace wmc::classes;

TEST_CASE("compare_steady") {
    markov::StationaryDistribution pi;
    pi.probabilities = {0.2, 0.3, 0.5};
    const std::vector<double> same{0.2, 0.3, 0.5};
    const auto c = evaluate::compare_steady(same, pi);
    for (double d : c.difference) CHECK(d == 0.0);
    CHECK(c.max_abs_difference == 0.0);
    const std::vector<double> f{0.3, 0.3, 0.4};
    CHECK(evaluate::compare_steady(f, pi).max_abs_difference == doctest::Approx(0.1));
    CHECK(evaluate::compare_steady(f, pi).difference[0] == doctest::Approx(0.1));
    CHECK_THROWS_AS(evaluate::compare_steady(std::vector<double>{1.0}, pi), Error);
}

TEST_CASE("long i.i.d. sequence: forecast sits near the stationary distribution") {
    simulate::Rng rng(31);
    const auto seq = simulate::iid({0.1, 0.15, 0.5, 0.15, 0.1}, 20000, rng);
    const auto set = markov::estimate_transitions(seq, 3);
    const auto f = forecast::predict_one(forecast::tail(seq, 3), set, agreement::weight_profile(seq, 3));
    CHECK(evaluate::compare_steady(f.probabilities, markov::stationary(set)).max_abs_difference < 0.05);
}

TEST_CASE("backtest: deterministic two-class cycle is always hit") {
    std::vector<DroughtClass> v;
    for (int i = 0; i < 120; ++i) v.push_back(i % 2 ? DroughtClass{2} : DroughtClass{1});
    const auto seq = ClassSequence::from_classes(v, 2);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 3;
    cfg.holdout = 40;
    const auto r = evaluate::backtest(seq, cfg);
    CHECK(r.folds.size() == 40);
    CHECK(r.hit_rate == 1.0);
    CHECK(r.baseline_hit_rates.at(evaluate::method_markov_lag1) == 1.0);
    CHECK(r.baseline_hit_rates.at(evaluate::method_climatology) == doctest::Approx(0.5));
}

TEST_CASE("backtest: invariants on a random sequence") {
    std::mt19937_64 rng(32);
    const auto seq = oracle::random_sequence(rng, 400, 7, 0.03);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 4;
    cfg.holdout = 60;
    const auto r = evaluate::backtest(seq, cfg);
    CHECK(r.folds.size() + r.skipped.size() == 60);

    // Confusion row sums equal observed class counts over evaluated folds.
    std::vector<std::size_t> observed(7, 0);
    for (const auto& f : r.folds) ++observed[f.observed.index()];
    for (std::size_t i = 0; i < 7; ++i) {
        std::size_t s = 0;
        for (auto x : r.confusion[i]) s += x;
        CHECK(s == observed[i]);
    }

    for (const auto& f : r.folds) {
        const std::size_t origin = static_cast<std::size_t>(f.origin.ordinal() - seq.start().ordinal());
        const auto train = seq.slice(0, origin);
        // Climatology is the modal training class, lag-1 Markov is predict_one with one lag.
        const auto counts = train.class_counts();
        std::vector<double> freq(7);
        for (std::size_t i = 0; i < 7; ++i) freq[i] = static_cast<double>(counts[i]) / static_cast<double>(train.valid_count());
        CHECK(f.climatology == forecast::argmax_class(freq, freq, NN.index()).predicted_class);
        // Without a usable lag-1 row the baseline falls back to climatology.
        try {
            const auto one = forecast::predict_one(forecast::tail(train, 1), markov::estimate_transitions(train, 1),
                                                   agreement::weight_profile(train, 1));
            CHECK(f.markov_lag1 == one.predicted_class);
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::no_forecast);
            CHECK(f.markov_lag1 == f.climatology);
        }
    }
}

TEST_CASE("backtest: data at or after an origin never leaks into that fold") {
    std::mt19937_64 rng(33);
    const auto seq = oracle::random_sequence(rng, 300, 7, 0.02);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 5;
    cfg.holdout = 30;
    const auto base = evaluate::backtest(seq, cfg);
    const std::size_t n = seq.size();
    for (std::size_t k = 0; k < 30; k += 7) {
        const std::size_t origin = n - 30 + k;
        auto values = seq.values();
        std::shuffle(values.begin() + static_cast<std::ptrdiff_t>(origin), values.end(), rng);
        for (std::size_t i = origin + 1; i < n; ++i)
            if (i % 3 == 0) values[i] = DroughtClass{1 + static_cast<int>(i % 7)};
        const ClassSequence tampered("rand", seq.start(), values, 7);
        const auto r = evaluate::backtest(tampered, cfg);
        const auto find = [&](const evaluate::BacktestReport& rep) -> const evaluate::FoldRecord* {
            for (const auto& f : rep.folds)
                if (f.origin == seq.period(origin)) return &f;
            return nullptr;
        };
        const auto* a = find(base);
        const auto* b = find(r);
        if (!a || !b) continue;
        CHECK(a->predicted == b->predicted);
        CHECK(a->distribution.probabilities == b->distribution.probabilities);
        CHECK(a->markov_lag1 == b->markov_lag1);
        CHECK(a->climatology == b->climatology);
    }
}

TEST_CASE("backtest: fixed-fit mode and short training windows") {
    std::mt19937_64 rng(34);
    const auto seq = oracle::random_sequence(rng, 200, 7, 0.0);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 3;
    cfg.holdout = 50;
    cfg.refit = false;
    const auto r = evaluate::backtest(seq, cfg);
    CHECK(r.folds.size() == 50);
    // One fit: the transition matrices behind every fold are the same, so equal histories give equal forecasts.
    cfg.holdout = 180; // leaves 20 training months, fewer than 10 x 3
    CHECK_THROWS_AS(evaluate::backtest(seq, cfg), Error);
    cfg.holdout = 0;
    CHECK_THROWS_AS(evaluate::backtest(seq, cfg), Error);
}

TEST_CASE("backtest: i.i.d. uniform hit rate is near 1/7 for every method") {
    simulate::Rng rng(35);
    const auto seq = simulate::iid(std::vector<double>(7, 1.0 / 7), 2300, rng);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 3;
    cfg.holdout = 2000;
    cfg.refit = false;
    const auto r = evaluate::backtest(seq, cfg);
    for (const auto& [name, rate] : r.baseline_hit_rates) CHECK(std::abs(rate - 1.0 / 7) < 0.05);
}

TEST_CASE("backtest: strongly diagonal chain beats climatology") {
    markov::Matrix p = markov::Matrix::Constant(7, 7, 0.1 / 6);
    p.diagonal().setConstant(0.9);
    simulate::Rng rng(36);
    const auto seq = simulate::markov_chain(p, 2600, rng, 3);
    evaluate::BacktestConfig cfg;
    cfg.max_lag = 7;
    cfg.holdout = 2000;
    cfg.refit = false;
    const auto r = evaluate::backtest(seq, cfg);
    CHECK(r.hit_rate >= r.baseline_hit_rates.at(evaluate::method_climatology));
    CHECK(r.baseline_hit_rates.at(evaluate::method_markov_lag1) > 0.85);
}
