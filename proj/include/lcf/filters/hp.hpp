#pragma once

#include <cstddef>
#include <vector>

#include "lcf/detail/linalg.hpp"
#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Smoothing strength. lambda -> 0 reproduces the input; lambda -> inf
/// drives the trend to the least-squares line.
struct HpParams {
    double lambda = 1600.0;

    void validate() const {
        if (!(lambda >= 0.0) || !std::isfinite(lambda))
            throw ConfigError("HpParams: lambda must be finite and >= 0");
    }
};

/// Trend extraction by penalized least squares: the trend tau minimizes
/// sum (y - tau)^2 + lambda * sum (second difference of tau)^2, solved
/// exactly through the pentadiagonal normal equations (I + lambda D'D).
///
/// filtered = trend; residual = y - trend; no seasonal channel.
inline DecompositionResult hp_filter(const TimeSeries& s, const HpParams& p = {}) {
    p.validate();
    const std::size_t n = s.size();
    if (n < 4) throw ConfigError("hp_filter: series length must be >= 4");

    // Diagonals of I + lambda * D'D where D is the (n-2) x n second-difference
    // operator. D'D has the classic [1 -4 6 -4 1] interior stencil.
    const double lam = p.lambda;
    std::vector<std::vector<double>> band(3, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double d0 = 6.0;
        if (i == 0 || i == n - 1) d0 = 1.0;
        else if (i == 1 || i == n - 2) d0 = 5.0;
        band[0][i] = 1.0 + lam * d0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d1 = (i == 0 || i + 1 == n - 1) ? -2.0 : -4.0;
        band[1][i] = lam * d1;
    }
    for (std::size_t i = 0; i + 2 < n; ++i) band[2][i] = lam * 1.0;

    detail::BandedSPDSolver solver(band, n);
    std::vector<double> trend = solver.solve(s.values);

    DecompositionResult r;
    r.trend = std::move(trend);
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.residual[i] = s.values[i] - r.trend[i];
    r.filtered = r.trend;
    return r;
}

} // namespace lcf::filters
