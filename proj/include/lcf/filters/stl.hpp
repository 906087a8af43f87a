#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/filters/loess.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Inner/outer loop counts for the season-trend iteration. The outer passes
/// recompute bisquare robustness weights from the remainder and repeat the
/// inner loop with them.
struct StlOptions {
    int inner_iters = 2;
    int robust_iters = 1;
    /// Span for smoothing each cycle-subseries (fraction of the subseries).
    double seasonal_span = 1.0;
    /// Span for the low-pass that removes trend leakage from the seasonal.
    double lowpass_span = 0.3;
};

namespace detail_stl {

/// Centered moving average with reflection padding; even windows use the
/// standard half-weight endpoints over window+1 points.
inline std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    if (window <= 1) return x;
    const bool even = (window % 2 == 0);
    const std::size_t span = even ? window + 1 : window;
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(span / 2);
    auto at = [&](std::ptrdiff_t i) {
        // reflect at the edges
        const std::ptrdiff_t nn = static_cast<std::ptrdiff_t>(n);
        while (i < 0 || i >= nn) {
            if (i < 0) i = -i;
            if (i >= nn) i = 2 * nn - 2 - i;
        }
        return x[static_cast<std::size_t>(i)];
    };
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::ptrdiff_t j = -half; j <= half; ++j) {
            double w = 1.0;
            if (even && (j == -half || j == half)) w = 0.5;
            acc += w * at(static_cast<std::ptrdiff_t>(t) + j);
        }
        out[t] = acc / static_cast<double>(window);
    }
    return out;
}

/// Smooth each cycle-subseries (samples sharing a phase mod period) with
/// LOESS and scatter the fits back. Subseries too short for a stable local
/// fit fall back to their weighted mean.
inline std::vector<double> cycle_subseries_smooth(const std::vector<double>& x,
                                                  std::size_t period, double span,
                                                  const std::vector<double>& robustness) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    LoessParams p;
    p.span_fraction = span;
    p.degree = 1;
    for (std::size_t phase = 0; phase < period; ++phase) {
        std::vector<double> xs, ys, rho;
        for (std::size_t i = phase; i < n; i += period) {
            xs.push_back(static_cast<double>(xs.size()));
            ys.push_back(x[i]);
            rho.push_back(robustness[i]);
        }
        std::vector<double> fit;
        if (xs.size() < 4) {
            double wsum = 0.0, acc = 0.0;
            for (std::size_t j = 0; j < ys.size(); ++j) {
                acc += rho[j] * ys[j];
                wsum += rho[j];
            }
            const double mean = wsum > 0.0 ? acc / wsum
                                           : std::accumulate(ys.begin(), ys.end(), 0.0) /
                                                 static_cast<double>(ys.size());
            fit.assign(ys.size(), mean);
        } else {
            fit = loess_smooth(xs, ys, p, &rho);
        }
        std::size_t j = 0;
        for (std::size_t i = phase; i < n; i += period) out[i] = fit[j++];
    }
    return out;
}

inline std::vector<double> bisquare_weights(const std::vector<double>& remainder) {
    std::vector<double> a(remainder.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(remainder[i]);
    std::vector<double> sorted = a;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double med = sorted[sorted.size() / 2];
    std::vector<double> w(a.size(), 1.0);
    if (med <= 0.0) return w;
    const double cut = 6.0 * med;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double u = a[i] / cut;
        w[i] = u >= 1.0 ? 0.0 : (1.0 - u * u) * (1.0 - u * u);
    }
    return w;
}

} // namespace detail_stl

/// Season-trend decomposition by repeated local regression.
///
/// Inner loop: detrend, smooth each cycle-subseries, remove the low-pass of
/// the result so the seasonal carries no trend, then re-estimate the trend
/// with LOESS on the deseasonalized series. Outer passes redo this with
/// bisquare robustness weights from the remainder.
inline DecompositionResult stl_decompose(const TimeSeries& s, std::size_t period,
                                         const LoessParams& trend_params = {},
                                         const StlOptions& opts = {}) {
    trend_params.validate();
    const std::size_t n = s.size();
    if (period < 2) throw ConfigError("stl_decompose: period must be >= 2");
    if (n < 2 * period)
        throw ConfigError("stl_decompose: series length must be >= 2 * period");

    const std::vector<double>& y = s.values;
    std::vector<double> positions(n);
    std::iota(positions.begin(), positions.end(), 0.0);

    std::vector<double> trend(n, 0.0), seasonal(n, 0.0), rho(n, 1.0);

    for (int outer = 0; outer <= opts.robust_iters; ++outer) {
        for (int inner = 0; inner < opts.inner_iters; ++inner) {
            std::vector<double> detrended(n);
            for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];

            auto cycle = detail_stl::cycle_subseries_smooth(detrended, period,
                                                            opts.seasonal_span, rho);
            // low-pass: MA(period) twice, MA(3), then a light LOESS
            auto low = detail_stl::moving_average(cycle, period);
            low = detail_stl::moving_average(low, period);
            low = detail_stl::moving_average(low, 3);
            LoessParams lp;
            lp.span_fraction = opts.lowpass_span;
            lp.degree = 1;
            low = loess_smooth(positions, low, lp);

            for (std::size_t i = 0; i < n; ++i) seasonal[i] = cycle[i] - low[i];

            std::vector<double> deseason(n);
            for (std::size_t i = 0; i < n; ++i) deseason[i] = y[i] - seasonal[i];
            trend = loess_smooth(positions, deseason, trend_params, &rho);
        }
        if (outer < opts.robust_iters) {
            std::vector<double> remainder(n);
            for (std::size_t i = 0; i < n; ++i) remainder[i] = y[i] - trend[i] - seasonal[i];
            rho = detail_stl::bisquare_weights(remainder);
        }
    }

    DecompositionResult r;
    r.trend = std::move(trend);
    r.seasonals.push_back(std::move(seasonal));
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        r.residual[i] = y[i] - r.trend[i] - r.seasonals[0][i];
    r.filtered = r.trend;
    return r;
}

/// Multi-seasonal extension: each period (ascending) gets its own seasonal,
/// extracted by season-trend passes on the partial residual, refined over
/// two sweeps. Trend comes from the final pass at the largest period.
inline DecompositionResult mstl_decompose(const TimeSeries& s,
                                          const std::vector<std::size_t>& periods,
                                          const LoessParams& trend_params = {},
                                          const StlOptions& opts = {}) {
    if (periods.empty()) throw ConfigError("mstl_decompose: need at least one period");
    for (std::size_t j = 0; j < periods.size(); ++j) {
        if (periods[j] < 2) throw ConfigError("mstl_decompose: periods must be >= 2");
        if (j > 0 && periods[j] <= periods[j - 1])
            throw ConfigError("mstl_decompose: periods must be strictly increasing");
    }
    const std::size_t n = s.size();
    if (n < 2 * periods.back())
        throw ConfigError("mstl_decompose: series length must be >= 2 * max period");

    const std::size_t m = periods.size();
    std::vector<std::vector<double>> seasonals(m, std::vector<double>(n, 0.0));
    std::vector<double> resid = s.values;
    std::vector<double> trend(n, 0.0);

    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) resid[i] += seasonals[j][i];
            TimeSeries partial(resid, s.t0, s.dt, s.unit);
            auto stl = stl_decompose(partial, periods[j], trend_params, opts);
            seasonals[j] = std::move(stl.seasonals[0]);
            for (std::size_t i = 0; i < n; ++i) resid[i] -= seasonals[j][i];
            if (pass == 1 && j + 1 == m) trend = std::move(stl.trend);
        }
    }

    DecompositionResult r;
    r.trend = std::move(trend);
    r.seasonals = std::move(seasonals);
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = s.values[i] - r.trend[i];
        for (const auto& sj : r.seasonals) acc -= sj[i];
        r.residual[i] = acc;
    }
    r.filtered = r.trend;
    return r;
}

} // namespace lcf::filters
