#pragma once

#include <cstddef>
#include <vector>

#include "lcf/detail/linalg.hpp"
#include "lcf/errors.hpp"

namespace lcf::forecast {

/// Repeat the last observed value across the horizon.
inline std::vector<double> naive_baseline(const std::vector<double>& tail,
                                          std::size_t horizon) {
    if (tail.empty()) throw ConfigError("naive_baseline: empty tail");
    return std::vector<double>(horizon, tail.back());
}

/// Least-squares autoregression coefficients [intercept, phi_1..phi_p],
/// phi_k multiplying the k-th lag.
inline std::vector<double> ar_fit(const std::vector<double>& series, std::size_t p) {
    const std::size_t n = series.size();
    if (p == 0) throw ConfigError("ar_fit: order must be >= 1");
    if (p >= n) throw ConfigError("ar_fit: order must be < series length");
    const std::size_t rows = n - p;
    const std::size_t m = p + 1;
    if (rows < m) throw ConfigError("ar_fit: series too short for order");

    std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        std::vector<double> row(m);
        row[0] = 1.0;
        for (std::size_t k = 1; k <= p; ++k) row[k] = series[t - k];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) xtx[i * m + j] += row[i] * row[j];
            xty[i] += row[i] * series[t];
        }
    }
    try {
        return detail::solve_dense(std::move(xtx), std::move(xty));
    } catch (const RuntimeFailure&) {
        throw RuntimeFailure("ar_fit: degenerate design matrix (constant or collinear lags)");
    }
}

/// Fit AR(p) on the series and iterate the recursion `horizon` steps ahead.
inline std::vector<double> ar_baseline(const std::vector<double>& series, std::size_t p,
                                       std::size_t horizon) {
    const auto beta = ar_fit(series, p);
    std::vector<double> hist(series.end() - static_cast<std::ptrdiff_t>(p), series.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double next = beta[0];
        for (std::size_t k = 1; k <= p; ++k) next += beta[k] * hist[hist.size() - k];
        out.push_back(next);
        hist.push_back(next);
    }
    return out;
}

} // namespace lcf::forecast
