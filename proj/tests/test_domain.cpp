#include <cmath>
#include <limits>

#include "doctest.h"
#include "wmc/domain.hpp"

using namespace wmc;
using namespace wmc::classes;

TEST_CASE("year-month parsing and arithmetic") {
    const auto ym = YearMonth::parse("2017-12");
    CHECK(ym.year == 2017);
    CHECK(ym.month == 12);
    CHECK(ym.plus_months(1) == YearMonth{2018, 1});
    CHECK(ym.plus_months(-12) == YearMonth{2016, 12});
    CHECK(ym.to_string() == "2017-12");
    CHECK(YearMonth{1955, 3}.to_string() == "1955-03");
    CHECK(YearMonth{2000, 1} < YearMonth{2000, 2});
    for (const char* bad : {"2017-13", "2017-00", "201712", "2017-1x", "", "17-01"})
        CHECK_THROWS_AS(YearMonth::parse(bad), Error);
}

TEST_CASE("classify: default table examples") {
    const auto& s = ClassificationScheme::standard();
    CHECK(classify(2.3, s) == EW);
    CHECK(classify(0.0, s) == NN);
    CHECK(classify(-1.75, s) == SD);
    CHECK(classify(-2.0, s) == ED);
}

TEST_CASE("classify: every boundary lands on its documented side") {
    const auto& s = ClassificationScheme::standard();
    CHECK(classify(-2.0000001, s) == ED);
    CHECK(classify(-1.9999999, s) == SD);
    CHECK(classify(-1.5, s) == SD);
    CHECK(classify(-1.4999999, s) == MD);
    CHECK(classify(-1.0, s) == MD);
    CHECK(classify(-0.9999999, s) == NN);
    CHECK(classify(0.995, s) == NN);
    CHECK(classify(1.0, s) == MW);
    CHECK(classify(1.4999999, s) == MW);
    CHECK(classify(1.5, s) == SW);
    CHECK(classify(1.9999999, s) == SW);
    CHECK(classify(2.0, s) == EW);
    CHECK(classify(-40.0, s) == ED);
    CHECK(classify(40.0, s) == EW);
}

TEST_CASE("classify: non-finite values are rejected") {
    const auto& s = ClassificationScheme::standard();
    CHECK_THROWS_AS(classify(std::numeric_limits<double>::quiet_NaN(), s), Error);
    CHECK_THROWS_AS(classify(std::numeric_limits<double>::infinity(), s), Error);
    try {
        classify(-std::numeric_limits<double>::infinity(), s);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_input);
    }
}

TEST_CASE("classify: total and monotone over a fine grid") {
    const auto& s = ClassificationScheme::standard();
    int prev = 0;
    for (int k = -500000; k <= 500000; ++k) {
        const double x = k * 1e-5;
        const DroughtClass c = classify(x, s);
        REQUIRE(c.rank >= 1);
        REQUIRE(c.rank <= 7);
        REQUIRE(c.rank >= prev);
        prev = c.rank;
    }
    CHECK(prev == 7);
}

TEST_CASE("classify_series examples") {
    const auto& s = ClassificationScheme::standard();
    const IndexSeries idx("A", YearMonth{2001, 1}, {0.2, std::nullopt, 1.6});
    const ClassSequence seq = classify_series(idx, s);
    REQUIRE(seq.size() == 3);
    CHECK(seq[0] == NN);
    CHECK(!seq[1].has_value());
    CHECK(seq[2] == SW);
    CHECK(seq.start() == YearMonth{2001, 1});
    CHECK(seq.period(2) == YearMonth{2001, 3});
    CHECK(seq.station_id() == "A");

    CHECK(classify_series(IndexSeries("A", YearMonth{2001, 1}, {}), s).size() == 0);

    const ClassSequence zeros = classify_series(IndexSeries("A", YearMonth{2001, 1}, {0.0, 0.0, 0.0, 0.0}), s);
    for (std::size_t i = 0; i < zeros.size(); ++i) CHECK(zeros[i] == NN);
}

TEST_CASE("index series rejects non-finite values") {
    CHECK_THROWS_AS(IndexSeries("A", YearMonth{2001, 1}, {0.1, std::numeric_limits<double>::quiet_NaN()}), Error);
}

TEST_CASE("labels parse and unknown labels are errors") {
    const auto& s = ClassificationScheme::standard();
    CHECK(s.class_count() == 7);
    CHECK(s.parse_label("MW") == MW);
    CHECK(s.label(ED) == "ED");
    CHECK(s.neutral_index() == NN.index());
    try {
        s.parse_label("XX");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unknown_class);
    }
}

TEST_CASE("custom schemes from cut points") {
    const auto three = ClassificationScheme::from_cuts({"DRY", "NORMAL", "WET"}, {-1.0, 1.0});
    CHECK(three.class_count() == 3);
    CHECK(three.neutral_index() == 1);
    CHECK(three.classify(-1.0).rank == 1);
    CHECK(three.classify(-0.5).rank == 2);
    CHECK(three.classify(1.0).rank == 3);

    const auto std7 = ClassificationScheme::from_cuts({"ED", "SD", "MD", "NN", "MW", "SW", "EW"},
                                                      {-2.0, -1.5, -1.0, 1.0, 1.5, 2.0});
    CHECK(std7 == ClassificationScheme::standard());

    CHECK_THROWS_AS(ClassificationScheme::from_cuts({"A", "B"}, {1.0, 2.0}), Error);        // count mismatch
    CHECK_THROWS_AS(ClassificationScheme::from_cuts({"A", "B", "C"}, {1.0, 0.0}), Error);   // not increasing
    CHECK_THROWS_AS(ClassificationScheme::from_cuts({"A", "A", "C"}, {-1.0, 1.0}), Error);  // duplicate label
}

TEST_CASE("runs split on gaps") {
    using O = std::optional<DroughtClass>;
    const ClassSequence seq("A", YearMonth{2000, 1}, {O(NN), O(MD), std::nullopt, O(SD), O(SD), std::nullopt}, 7);
    const auto runs = seq.runs();
    REQUIRE(runs.size() == 2);
    CHECK(runs[0] == Run{0, 2});
    CHECK(runs[1] == Run{3, 5});
    CHECK(seq.valid_count() == 4);
    const auto counts = seq.class_counts();
    CHECK(counts[SD.index()] == 2);
    CHECK(counts[NN.index()] == 1);
    const auto sl = seq.slice(3, 5);
    CHECK(sl.start() == YearMonth{2000, 4});
    CHECK(sl.size() == 2);
    CHECK(sl.class_count() == 7);
}

TEST_CASE("class sequences reject classes outside the scheme") {
    CHECK_THROWS_AS(ClassSequence::from_classes({DroughtClass{3}}, 2), Error);
    CHECK_THROWS_AS(ClassSequence::from_classes({DroughtClass{0}}, 7), Error);
}
