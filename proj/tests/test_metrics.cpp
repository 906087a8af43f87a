#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "lcf/metrics.hpp"
#include "lcf/rng.hpp"

using namespace lcf::metrics;

TEST_CASE("hand-computed example is exact") {
    const auto r = evaluate({1.0, 2.0}, {2.0, 2.0});
    REQUIRE(r.rmse == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
    REQUIRE(r.mae == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(r.mape == Catch::Approx(50.0).margin(1e-12));
    REQUIRE(r.smape == Catch::Approx(100.0 / 3.0).margin(1e-12));
    REQUIRE(r.n == 2);
}

TEST_CASE("perfect forecast scores zero") {
    const auto r = evaluate({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    REQUIRE(r.rmse == 0.0);
    REQUIRE(r.mae == 0.0);
    REQUIRE(r.mape == 0.0);
    REQUIRE(r.smape == 0.0);
}

TEST_CASE("scale equivariance over random pairs") {
    auto rng = lcf::make_rng(11);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(16), f(16);
        for (auto& x : a) x = u(rng);
        for (auto& x : f) x = u(rng);
        const double c = u(rng);
        std::vector<double> ac = a, fc = f;
        for (auto& x : ac) x *= c;
        for (auto& x : fc) x *= c;
        const auto r1 = evaluate(a, f), r2 = evaluate(ac, fc);
        REQUIRE(r2.rmse == Catch::Approx(c * r1.rmse).epsilon(1e-12));
        REQUIRE(r2.mae == Catch::Approx(c * r1.mae).epsilon(1e-12));
        REQUIRE(r2.mape == Catch::Approx(r1.mape).epsilon(1e-12));
        REQUIRE(r2.smape == Catch::Approx(r1.smape).epsilon(1e-12));
        REQUIRE(r1.rmse >= r1.mae);
    }
}

TEST_CASE("MAPE excludes zero actuals with a count") {
    const auto r = evaluate({0.0, 2.0}, {1.0, 1.0});
    REQUIRE(r.mape_excluded == 1);
    REQUIRE(r.mape == Catch::Approx(50.0));
}

TEST_CASE("conventional SMAPE variant behind the flag") {
    EvaluateOptions opts;
    opts.smape_printed_denominator = false;
    const auto r = evaluate({1.0}, {-1.0}, opts);
    // |err| = 2, conventional denom (1+1)/2 = 1 -> 200%
    REQUIRE(r.smape == Catch::Approx(200.0));
}

TEST_CASE("length mismatch and empty input are rejected") {
    REQUIRE_THROWS_AS(evaluate({1.0}, {1.0, 2.0}), lcf::ConfigError);
    REQUIRE_THROWS_AS(evaluate({}, {}), lcf::ConfigError);
}

TEST_CASE("summary of 1..5") {
    const auto s = summarize({1, 2, 3, 4, 5});
    REQUIRE(s.mean == Catch::Approx(3.0));
    REQUIRE(s.median == Catch::Approx(3.0));
    REQUIRE(s.range == Catch::Approx(4.0));
    REQUIRE(s.p25 == Catch::Approx(2.0));
    REQUIRE(s.p75 == Catch::Approx(4.0));
    REQUIRE(s.iqr == Catch::Approx(2.0));
    REQUIRE(s.skewness == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(s.p25 <= s.p50);
    REQUIRE(s.p50 <= s.p75);
}

TEST_CASE("constant sample degenerates cleanly") {
    const auto s = summarize({5.0, 5.0, 5.0});
    REQUIRE(s.std_dev == 0.0);
    REQUIRE(s.range == 0.0);
    REQUIRE(s.skewness == 0.0);
    REQUIRE(s.mode == Catch::Approx(5.0));
}

TEST_CASE("summarize is permutation-invariant") {
    std::vector<double> a{3.0, 1.4, 9.2, -2.0, 5.5, 0.3, 7.7};
    std::vector<double> b = a;
    std::reverse(b.begin(), b.end());
    const auto sa = summarize(a), sb = summarize(b);
    REQUIRE(sa.mean == sb.mean);
    REQUIRE(sa.median == sb.median);
    REQUIRE(sa.mode == sb.mode);
    REQUIRE(sa.skewness == sb.skewness);
    REQUIRE(sa.kurtosis == sb.kurtosis);
}

TEST_CASE("seeded normal sample has expected shape statistics") {
    auto rng = lcf::make_rng(2024);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = n01(rng);
    const auto s = summarize(xs);
    REQUIRE(std::fabs(s.skewness) < 0.1);
    REQUIRE(std::fabs(s.kurtosis - 3.0) < 0.2);

    SummarizeOptions opts;
    opts.excess_kurtosis = true;
    const auto se = summarize(xs, opts);
    REQUIRE(se.kurtosis == Catch::Approx(s.kurtosis - 3.0));
}

TEST_CASE("fewer than 2 samples rejected") {
    REQUIRE_THROWS_AS(summarize({1.0}), lcf::ConfigError);
}

TEST_CASE("csv row has the fixed column order") {
    MetricsReport r;
    r.rmse = 1; r.mae = 2; r.mape = 3; r.smape = 4; r.n = 5;
    REQUIRE(metrics_csv_header() == "rmse,mae,mape,smape,n");
    REQUIRE(to_csv_row(r) == "1,2,3,4,5");
}
