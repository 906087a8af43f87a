#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lcf/rng.hpp"
#include "lcf/time_series.hpp"

namespace lcf::bench {

/// Synthetic stand-in for the contaminated-insulator leakage current: a
/// monotone accelerating trend from ~20 mA toward ~240 mA, multiplicative
/// noise, and rare upward spikes (surface discharge events). The level
/// crosses the 200 mA alarm threshold near the end of the record.
inline TimeSeries make_surrogate(std::size_t n = 968, std::uint64_t seed = 0,
                                 double noise = 0.08, double spike_prob = 0.01) {
    auto rng = make_rng(derive_seed(seed, 0x5A6E));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> spike(0.3, 0.9);

    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(n - 1);
        const double trend = 0.02 + 0.22 * std::pow(u, 1.6);
        double x = trend * (1.0 + noise * gauss(rng));
        if (unit(rng) < spike_prob) x += trend * spike(rng);
        v[t] = std::max(x, 1e-4);
    }
    return TimeSeries(std::move(v), 0.0, 1.0, "A");
}

} // namespace lcf::bench
