#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lcf/detail/linalg.hpp"
#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

struct EmdParams {
    std::size_t max_imfs = 10;
    /// Sifting stops when sum (h_prev - h)^2 / sum h_prev^2 drops below this,
    /// or when the mode criteria are met, or at max_sift_iters.
    double sift_tolerance = 0.2;
    std::size_t max_sift_iters = 50;

    void validate() const {
        if (max_sift_iters < 1)
            throw ConfigError("EmdParams: max_sift_iters must be >= 1");
        if (!(sift_tolerance > 0.0))
            throw ConfigError("EmdParams: sift_tolerance must be > 0");
    }
};

namespace detail_emd {

/// Natural cubic spline through (xs, ys), evaluated at 0..n-1.
inline std::vector<double> spline_eval(const std::vector<double>& xs,
                                       const std::vector<double>& ys, std::size_t n) {
    const std::size_t m = xs.size();
    std::vector<double> out(n);
    if (m == 1) {
        std::fill(out.begin(), out.end(), ys[0]);
        return out;
    }
    if (m == 2) {
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = ys[0] + slope * (static_cast<double>(i) - xs[0]);
        return out;
    }
    // second derivatives from the tridiagonal system (natural ends)
    std::vector<double> sub(m, 0.0), diag(m, 1.0), sup(m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double h0 = xs[i] - xs[i - 1];
        const double h1 = xs[i + 1] - xs[i];
        sub[i] = h0 / 6.0;
        diag[i] = (h0 + h1) / 3.0;
        sup[i] = h1 / 6.0;
        rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
    }
    const auto m2 = lcf::detail::solve_tridiagonal(sub, diag, sup, rhs);

    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        while (seg + 2 < m && x > xs[seg + 1]) ++seg;
        const double h = xs[seg + 1] - xs[seg];
        const double A = (xs[seg + 1] - x) / h;
        const double B = (x - xs[seg]) / h;
        out[i] = A * ys[seg] + B * ys[seg + 1] +
                 ((A * A * A - A) * m2[seg] + (B * B * B - B) * m2[seg + 1]) * (h * h) / 6.0;
    }
    return out;
}

struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

inline Extrema find_extrema(const std::vector<double>& x) {
    Extrema e;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] >= x[i + 1]) e.maxima.push_back(i);
        else if (x[i] < x[i - 1] && x[i] <= x[i + 1]) e.minima.push_back(i);
    }
    return e;
}

inline std::size_t count_zero_crossings(const std::vector<double>& x) {
    std::size_t c = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if ((x[i - 1] < 0.0 && x[i] >= 0.0) || (x[i - 1] > 0.0 && x[i] <= 0.0)) ++c;
    return c;
}

/// Envelope through the given extrema, mirror-extending up to two extrema
/// past each end to suppress end swings.
inline std::vector<double> envelope(const std::vector<double>& x,
                                    const std::vector<std::size_t>& idx) {
    const std::size_t n = x.size();
    std::vector<double> xs, ys;
    const std::size_t k = std::min<std::size_t>(2, idx.size());
    for (std::size_t j = k; j-- > 0;) {
        xs.push_back(-static_cast<double>(idx[j]));
        ys.push_back(x[idx[j]]);
    }
    for (std::size_t j = 0; j < idx.size(); ++j) {
        xs.push_back(static_cast<double>(idx[j]));
        ys.push_back(x[idx[j]]);
    }
    const double last = static_cast<double>(n - 1);
    for (std::size_t j = idx.size() - k; j < idx.size(); ++j) {
        // reversed mirror order so xs stays increasing
        const std::size_t jj = idx.size() - 1 - (j - (idx.size() - k));
        xs.push_back(2.0 * last - static_cast<double>(idx[jj]));
        ys.push_back(x[idx[jj]]);
    }
    return spline_eval(xs, ys, n);
}

} // namespace detail_emd

/// Sifting-based mode decomposition with cubic-spline envelopes.
///
/// Each mode is refined by subtracting the mean envelope until the
/// extrema/zero-crossing counts differ by at most one and the mean envelope
/// is near zero, or the tolerance/iteration cap is hit. A monotone input
/// yields no modes (residual = input). seasonals = modes (highest frequency
/// first); filtered = residual + last mode, the low-frequency trend proxy.
inline DecompositionResult emd_decompose(const TimeSeries& s, const EmdParams& p = {}) {
    p.validate();
    const std::size_t n = s.size();
    if (n < 8) throw ConfigError("emd_decompose: series length must be >= 8");

    std::vector<std::vector<double>> imfs;
    std::vector<double> resid = s.values;

    while (imfs.size() < p.max_imfs) {
        const auto ext = detail_emd::find_extrema(resid);
        if (ext.maxima.size() < 2 || ext.minima.size() < 2) break;

        std::vector<double> h = resid;
        for (std::size_t it = 0; it < p.max_sift_iters; ++it) {
            const auto he = detail_emd::find_extrema(h);
            if (he.maxima.size() < 2 || he.minima.size() < 2) break;
            const auto upper = detail_emd::envelope(h, he.maxima);
            const auto lower = detail_emd::envelope(h, he.minima);

            std::vector<double> next(n);
            double mean_abs = 0.0, h_abs = 0.0, num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double m = 0.5 * (upper[i] + lower[i]);
                next[i] = h[i] - m;
                mean_abs += std::fabs(m);
                h_abs += std::fabs(h[i]);
                num += m * m; // (h_prev - h_next)^2 = m^2
                den += h[i] * h[i];
            }
            const double sd = den > 0.0 ? num / den : 0.0;
            h = std::move(next);

            // mode criteria: extrema vs zero crossings within one, small mean envelope
            const auto he2 = detail_emd::find_extrema(h);
            const std::size_t n_ext = he2.maxima.size() + he2.minima.size();
            const std::size_t n_zc = detail_emd::count_zero_crossings(h);
            const bool counts_ok =
                (n_ext > n_zc ? n_ext - n_zc : n_zc - n_ext) <= 1;
            const bool envelope_ok = h_abs > 0.0 && mean_abs / h_abs < 0.05;
            if (sd < p.sift_tolerance || (counts_ok && envelope_ok)) break;
        }

        for (std::size_t i = 0; i < n; ++i) resid[i] -= h[i];
        imfs.push_back(std::move(h));
    }

    DecompositionResult r;
    r.seasonals = std::move(imfs);
    r.residual = std::move(resid); // the final remainder epsilon_n
    r.trend.assign(n, 0.0);        // remainder already carries the slow drift
    r.filtered.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = r.residual[i];
        if (!r.seasonals.empty()) f += r.seasonals.back()[i];
        r.filtered[i] = f;
    }
    return r;
}

} // namespace lcf::filters
