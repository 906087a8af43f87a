#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lcf/filters/ewt.hpp"
#include "lcf/rng.hpp"

using namespace lcf;
using namespace lcf::filters;

namespace {

double energy(const std::vector<double>& x) {
    double e = 0;
    for (double v : x) e += v * v;
    return e;
}

} // namespace

TEST_CASE("pure sinusoid with two modes: one mode carries the energy") {
    const std::size_t n = 512;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::sin(2.0 * 3.14159265358979323846 * static_cast<double>(i) / 16.0);
    EwtBank bank;
    bank.modes = 2;
    const auto r = ewt_decompose(TimeSeries(v), bank);

    const double total = energy(v);
    double best = energy(r.trend);
    for (const auto& w : r.seasonals) best = std::max(best, energy(w));
    REQUIRE(best >= 0.99 * total);

    double mean_sn = 0;
    for (double x : r.trend) mean_sn += x;
    mean_sn /= static_cast<double>(n);
    REQUIRE(std::fabs(mean_sn) < 1e-4); // relative to unit amplitude
}

TEST_CASE("constant signal with one mode is returned whole") {
    std::vector<double> v(64, 2.5);
    EwtBank bank;
    bank.modes = 1;
    const auto r = ewt_decompose(TimeSeries(v), bank);
    REQUIRE(r.seasonals.empty());
    for (std::size_t i = 0; i < v.size(); ++i)
        REQUIRE(r.trend[i] == Catch::Approx(2.5).margin(1e-10));
}

TEST_CASE("masks form a partition of unity: exact reconstruction") {
    auto rng = make_rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {256u, 300u, 1024u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        EwtBank bank;
        bank.modes = 4;
        const auto r = ewt_decompose(TimeSeries(v), bank);
        REQUIRE(r.seasonals.size() == 3);
        REQUIRE(r.reconstruction_error(v) < 1e-10);
        // residual channel itself is numerically zero
        for (double x : r.residual) REQUIRE(std::fabs(x) < 1e-10);
    }
}

TEST_CASE("explicit boundaries split a two-tone signal") {
    const std::size_t n = 1024;
    const double pi = 3.14159265358979323846;
    std::vector<double> lo_tone(n), hi_tone(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        lo_tone[i] = std::sin(2 * pi * t / 64.0);  // omega = pi/32
        hi_tone[i] = 0.5 * std::sin(2 * pi * t / 8.0); // omega = pi/4
        v[i] = lo_tone[i] + hi_tone[i];
    }
    EwtBank bank;
    bank.modes = 2;
    bank.boundaries = {0.5 * (pi / 32.0 + pi / 4.0)};
    const auto r = ewt_decompose(TimeSeries(v), bank);
    REQUIRE(energy(r.trend) == Catch::Approx(energy(lo_tone)).epsilon(0.05));
    REQUIRE(energy(r.seasonals[0]) == Catch::Approx(energy(hi_tone)).epsilon(0.05));
}

TEST_CASE("bank validation") {
    const TimeSeries s(std::vector<double>(64, 1.0));
    EwtBank bad;
    bad.modes = 3;
    bad.boundaries = {1.0, 0.5};
    REQUIRE_THROWS_AS(ewt_decompose(s, bad), ConfigError);

    EwtBank wrong_count;
    wrong_count.modes = 3;
    wrong_count.boundaries = {1.0};
    REQUIRE_THROWS_AS(ewt_decompose(s, wrong_count), ConfigError);

    EwtBank bad_ratio;
    bad_ratio.transition_ratio = 0.7;
    REQUIRE_THROWS_AS(ewt_decompose(s, bad_ratio), ConfigError);

    EwtBank zero_modes;
    zero_modes.modes = 0;
    REQUIRE_THROWS_AS(ewt_decompose(s, zero_modes), ConfigError);
}

TEST_CASE("too many modes for a flat spectrum is an error") {
    // constant signal: spectral peaks cannot support many modes
    std::vector<double> v(128, 1.0);
    EwtBank bank;
    bank.modes = 40;
    REQUIRE_THROWS_AS(ewt_decompose(TimeSeries(v), bank), ConfigError);
}

TEST_CASE("short series rejected") {
    EwtBank bank;
    bank.modes = 1;
    REQUIRE_THROWS_AS(ewt_decompose(TimeSeries(std::vector<double>(4, 1.0)), bank),
                      ConfigError);
}
