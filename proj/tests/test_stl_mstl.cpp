#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lcf/filters/stl.hpp"
#include "lcf/rng.hpp"

using namespace lcf;
using namespace lcf::filters;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

} // namespace

TEST_CASE("constant series decomposes to a constant trend") {
    std::vector<double> v(96, 4.2);
    const auto r = stl_decompose(TimeSeries(v), 12);
    for (std::size_t i = 0; i < v.size(); ++i) {
        REQUIRE(std::fabs(r.seasonals[0][i]) < 1e-8);
        REQUIRE(r.trend[i] == Catch::Approx(4.2).margin(1e-8));
        REQUIRE(std::fabs(r.residual[i]) < 1e-8);
    }
}

TEST_CASE("linear trend plus exact period-12 pattern is recovered") {
    const std::size_t n = 240, period = 12;
    std::vector<double> pattern{0.8, 1.2, 0.1, -0.5, -1.1, -0.7, 0.3, 0.9, 0.4, -0.2, -0.8, -0.4};
    double pmean = 0;
    for (double p : pattern) pmean += p;
    pmean /= 12.0;
    for (double& p : pattern) p -= pmean;

    std::vector<double> v(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        truth[i] = pattern[i % period];
        v[i] = 2.0 + 0.05 * static_cast<double>(i) + truth[i];
    }
    const auto r = stl_decompose(TimeSeries(v), period);

    double err = 0, ref = 0;
    for (std::size_t i = 0; i < n; ++i) {
        err += (r.seasonals[0][i] - truth[i]) * (r.seasonals[0][i] - truth[i]);
        ref += truth[i] * truth[i];
    }
    REQUIRE(std::sqrt(err / ref) < 0.05);
    REQUIRE(r.reconstruction_error(v) < 1e-8);
}

TEST_CASE("reconstruction identity on a 968-point series") {
    auto rng = make_rng(31);
    std::normal_distribution<double> g(0.0, 0.02);
    std::vector<double> v(968);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = static_cast<double>(i);
        v[i] = 0.02 + 2e-4 * t + 0.01 * std::sin(2 * 3.14159 * t / 24.0) + g(rng);
    }
    const auto r = stl_decompose(TimeSeries(v), 24);
    REQUIRE(r.reconstruction_error(v) < 1e-8);
}

TEST_CASE("stl validates period against length") {
    REQUIRE_THROWS_AS(stl_decompose(TimeSeries(std::vector<double>(20, 1.0)), 12),
                      ConfigError);
    REQUIRE_THROWS_AS(stl_decompose(TimeSeries(std::vector<double>(20, 1.0)), 1),
                      ConfigError);
}

TEST_CASE("mstl with a single period equals stl") {
    auto rng = make_rng(37);
    std::normal_distribution<double> g(0.0, 0.5);
    std::vector<double> v(120);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = 0.1 * static_cast<double>(i) + std::sin(2 * 3.14159 * static_cast<double>(i) / 8.0) +
               g(rng);
    const TimeSeries s(v);
    const auto single = stl_decompose(s, 8);
    const auto multi = mstl_decompose(s, {8});
    REQUIRE(multi.seasonals.size() == 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        REQUIRE(multi.seasonals[0][i] == Catch::Approx(single.seasonals[0][i]).margin(1e-10));
        REQUIRE(multi.trend[i] == Catch::Approx(single.trend[i]).margin(1e-10));
    }
}

TEST_CASE("two seasonal components are separated") {
    const std::size_t n = 480;
    std::vector<double> s4(n), s24(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        s4[i] = 0.6 * std::sin(2 * 3.14159265358979 * t / 4.0);
        s24[i] = 1.0 * std::sin(2 * 3.14159265358979 * t / 24.0);
        v[i] = 5.0 + 0.01 * t + s4[i] + s24[i];
    }
    const auto r = mstl_decompose(TimeSeries(v), {4, 24});
    REQUIRE(r.seasonals.size() == 2);
    REQUIRE(correlation(r.seasonals[0], s4) > 0.95);
    REQUIRE(correlation(r.seasonals[1], s24) > 0.95);
    REQUIRE(r.reconstruction_error(v) < 1e-8);
}

TEST_CASE("mstl validates its period list") {
    const TimeSeries s(std::vector<double>(100, 1.0));
    REQUIRE_THROWS_AS(mstl_decompose(s, {12, 12}), ConfigError);
    REQUIRE_THROWS_AS(mstl_decompose(s, {24, 12}), ConfigError);
    REQUIRE_THROWS_AS(mstl_decompose(s, {}), ConfigError);
    REQUIRE_THROWS_AS(mstl_decompose(s, {4, 60}), ConfigError);
}
