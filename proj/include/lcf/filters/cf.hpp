#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Band-pass cycle bounds in sample periods. Oscillations with period inside
/// (low_period, high_period) are extracted as the cycle; the complement is
/// the trend.
struct CfParams {
    double low_period = 6.0;
    double high_period = 32.0;
    /// Remove the line through the first/last samples before filtering
    /// (random-walk-with-drift adjustment), added back into the trend.
    bool drift_adjust = true;
    /// Matched-window symmetric weights instead of the asymmetric full-sample
    /// form. Intended for oracle comparison on interior samples; the
    /// asymmetric default is the real-time variant.
    bool symmetric = false;

    void validate() const {
        if (!(low_period >= 2.0))
            throw ConfigError("CfParams: low_period must be >= 2 (Nyquist)");
        if (!(low_period < high_period))
            throw ConfigError("CfParams: low_period must be < high_period");
    }
};

namespace detail_cf {

/// Ideal band-pass weights b_j for the pass band [2*pi/high, 2*pi/low].
inline std::vector<double> ideal_weights(double low_period, double high_period,
                                         std::size_t count) {
    const double pi = 3.14159265358979323846;
    const double a = 2.0 * pi / high_period;
    const double b = 2.0 * pi / low_period;
    std::vector<double> w(count);
    w[0] = (b - a) / pi;
    for (std::size_t j = 1; j < count; ++j) {
        const double jd = static_cast<double>(j);
        w[j] = (std::sin(b * jd) - std::sin(a * jd)) / (pi * jd);
    }
    return w;
}

} // namespace detail_cf

/// Random-walk band-pass cycle extraction with per-position asymmetric
/// weights: interior positions carry the ideal weights, the two series
/// endpoints absorb the remainder so the weights sum to zero everywhere
/// (zero gain at frequency zero). No future samples beyond the series end
/// are ever required, which is what makes the filter usable in real time.
///
/// filtered = trend = y - cycle; seasonals = {cycle}; residual = 0.
inline DecompositionResult cf_filter(const TimeSeries& s, const CfParams& p = {}) {
    p.validate();
    const std::size_t n = s.size();
    if (static_cast<double>(n) <= 2.0 * p.high_period)
        throw ConfigError("cf_filter: series length must exceed 2 * high_period");

    std::vector<double> x = s.values;
    std::vector<double> drift_line(n, 0.0);
    if (p.drift_adjust && n > 1) {
        const double slope = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
        for (std::size_t t = 0; t < n; ++t) {
            drift_line[t] = static_cast<double>(t) * slope;
            x[t] -= drift_line[t];
        }
    }

    const auto b = detail_cf::ideal_weights(p.low_period, p.high_period, n);
    // cumulative sums S_k = b_1 + ... + b_k for the endpoint weights
    std::vector<double> cum(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) cum[k] = cum[k - 1] + b[k];
    // b_tilde[k] = -(b0/2 + S_{k-1}) for k >= 1; b_tilde[0] = +b0/2
    auto b_tilde = [&](std::size_t k) {
        if (k == 0) return 0.5 * b[0];
        return -(0.5 * b[0] + cum[k - 1]);
    };

    std::vector<double> cycle(n, 0.0);
    if (!p.symmetric) {
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const std::size_t lag = (i > t) ? i - t : t - i;
                acc += b[lag] * x[i];
            }
            acc += b_tilde(t) * x[0];
            acc += b_tilde(n - 1 - t) * x[n - 1];
            cycle[t] = acc;
        }
    } else {
        // matched lead/lag window, tail weights adjusted to zero total weight
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t len = std::min(t, n - 1 - t);
            if (len == 0) { cycle[t] = 0.0; continue; }
            double acc = b[0] * x[t];
            for (std::size_t j = 1; j < len; ++j)
                acc += b[j] * (x[t - j] + x[t + j]);
            const double tail = -(0.5 * b[0] + (len >= 1 ? cum[len - 1] : 0.0));
            acc += tail * (x[t - len] + x[t + len]);
            cycle[t] = acc;
        }
    }

    DecompositionResult r;
    r.seasonals.push_back(cycle);
    r.trend.resize(n);
    r.residual.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        r.trend[t] = s.values[t] - cycle[t];
    r.filtered = r.trend;
    return r;
}

} // namespace lcf::filters
