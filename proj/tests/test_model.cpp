#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wmc/model.hpp"

using namespace wmc;
using namespace wmc::classes;

TEST_CASE("model files round-trip") {
    std::mt19937_64 rng(41);
    const auto seq = oracle::random_sequence(rng, 500, 7, 0.02);
    io::StationDataset ds;
    ds.station_id = "R";
    ds.kind = io::InputKind::precomputed_classes;
    ds.series = ClassSequence("R", YearMonth{1980, 1}, seq.values(), 7);
    pipeline::RunConfig cfg;
    cfg.run_backtest = false;
    const auto result = pipeline::run_station(ds, cfg);
    const auto m = model::from_result(result, cfg.scheme);
    const auto back = model::from_json(report::Json::parse(model::to_json(m).dump()));
    CHECK(back.station_id == "R");
    CHECK(back.history == m.history);
    CHECK(back.history_end == m.history_end);
    const auto a = forecast::predict_one(m.history, m.matrices, m.weights);
    const auto b = forecast::predict_one(back.history, back.matrices, back.weights);
    for (std::size_t j = 0; j < 7; ++j) CHECK(a.probabilities[j] == doctest::Approx(b.probabilities[j]).epsilon(1e-12));
    CHECK(a.predicted_class == b.predicted_class);
}

TEST_CASE("bundled near-normal model reproduces its forecast") {
    const auto m = model::load(std::string(WMC_DATA_DIR) + "/astor_near_normal_model.json");
    const double w[] = {0.7895, 0.0498, 0.0371, 0.0400, 0.0081, 0.0725, 0.0029};
    for (int t = 1; t <= 7; ++t) CHECK(std::abs(m.weights.weight(t) - w[t - 1]) <= 5e-4);
    const auto f = forecast::predict_one(m.history, m.matrices, m.weights);
    CHECK(std::abs(f.probabilities[NN.index()] - 0.7146) <= 1.5e-3);
    CHECK(std::abs(f.probabilities[MW.index()] - 0.1146) <= 1.5e-3);
    CHECK(std::abs(f.probabilities[MD.index()] - 0.0701) <= 1.5e-3);
    CHECK(f.predicted_class == NN);
}

TEST_CASE("malformed model files are rejected") {
    auto j = report::Json::parse(R"({"format":"wmc-model","format_version":1,"classes":["ED","SD","MD","NN","MW","SW","EW"],
        "lags":[{"lag":1,"kappa":0.5,"rows":{"NN":[0,0,0,0.5,0.2,0,0]}}]})");
    CHECK_THROWS_AS(model::from_json(j), Error); // row sums to 0.7
    j["lags"][0]["rows"]["NN"] = {0, 0, 0, 1, 0, 0};
    CHECK_THROWS_AS(model::from_json(j), Error); // wrong length
    j["lags"][0]["rows"] = {{"QQ", {0, 0, 0, 1, 0, 0, 0}}};
    CHECK_THROWS_AS(model::from_json(j), Error); // unknown class
    j["lags"][0]["rows"] = {{"NN", {0, 0, 0, 1, 0, 0, 0}}};
    CHECK_NOTHROW(model::from_json(j));
    j["lags"][0]["lag"] = 2;
    CHECK_THROWS_AS(model::from_json(j), Error);
    j["format"] = "other";
    CHECK_THROWS_AS(model::from_json(j), Error);
    CHECK_THROWS_AS(model::load("/nonexistent/model.json"), Error);
}
