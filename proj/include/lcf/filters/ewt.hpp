#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lcf/detail/fft.hpp"
#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Data-adaptive wavelet bank. `modes` = N frequency bands; `boundaries`
/// holds the N-1 segment edges in (0, pi). Empty boundaries are detected
/// from the signal spectrum (midpoints between the N largest peaks).
struct EwtBank {
    std::size_t modes = 3;
    std::vector<double> boundaries;
    /// Transition half-width as a fraction of the narrower adjacent segment.
    /// Keeps the scaling/wavelet masks a partition of unity.
    double transition_ratio = 0.2;

    void validate() const {
        if (modes < 1) throw ConfigError("EwtBank: modes must be >= 1");
        if (!(transition_ratio > 0.0 && transition_ratio <= 0.5))
            throw ConfigError("EwtBank: transition_ratio must be in (0, 0.5]");
        if (!boundaries.empty()) {
            const double pi = 3.14159265358979323846;
            if (boundaries.size() != modes - 1)
                throw ConfigError("EwtBank: need modes-1 boundaries");
            double prev = 0.0;
            for (double w : boundaries) {
                if (!(w > prev))
                    throw ConfigError("EwtBank: boundaries not increasing");
                if (!(w < pi))
                    throw ConfigError("EwtBank: boundaries must lie in (0, pi)");
                prev = w;
            }
        }
    }
};

namespace detail_ewt {

/// Local maxima of the half-spectrum magnitude, endpoints included,
/// sorted by magnitude descending.
inline std::vector<std::size_t> spectrum_peaks(const std::vector<double>& mag) {
    std::vector<std::size_t> peaks;
    const std::size_t m = mag.size();
    for (std::size_t j = 0; j < m; ++j) {
        const bool left_ok = (j == 0) || mag[j] > mag[j - 1];
        const bool right_ok = (j + 1 == m) || mag[j] >= mag[j + 1];
        if (left_ok && right_ok) peaks.push_back(j);
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
    return peaks;
}

/// Midpoints between the N largest peaks of |X| over [0, pi].
inline std::vector<double> detect_boundaries(const std::vector<double>& x,
                                             std::size_t modes) {
    const std::size_t n = x.size();
    const auto spec = lcf::detail::fft_real(x);
    const std::size_t half = n / 2;
    std::vector<double> mag(half + 1);
    for (std::size_t j = 0; j <= half; ++j) mag[j] = std::abs(spec[j]);

    auto peaks = spectrum_peaks(mag);
    if (peaks.size() < modes)
        throw ConfigError("ewt_decompose: requested " + std::to_string(modes) +
                          " modes but only " + std::to_string(peaks.size()) +
                          " spectral peaks are detectable");
    peaks.resize(modes);
    std::sort(peaks.begin(), peaks.end());

    const double pi = 3.14159265358979323846;
    std::vector<double> bounds(modes - 1);
    for (std::size_t k = 0; k + 1 < modes; ++k) {
        const double w_a = 2.0 * pi * static_cast<double>(peaks[k]) / static_cast<double>(n);
        const double w_b = 2.0 * pi * static_cast<double>(peaks[k + 1]) / static_cast<double>(n);
        bounds[k] = 0.5 * (w_a + w_b);
    }
    return bounds;
}

/// Raised-cosine band mask for segment [lo, hi] with transition half-widths
/// d_lo at the lower edge and d_hi at the upper edge. Rising edge is sin^2,
/// falling edge cos^2, so adjacent masks sum to one across each transition.
inline double band_mask(double w, double lo, double hi, double d_lo, double d_hi,
                        bool first, bool last) {
    const double pi = 3.14159265358979323846;
    double gain = 1.0;
    if (!first) {
        if (w < lo - d_lo) return 0.0;
        if (w < lo + d_lo) {
            const double u = (w - (lo - d_lo)) / (2.0 * d_lo);
            const double c = std::sin(0.5 * pi * u);
            gain *= c * c;
        }
    }
    if (!last) {
        if (w > hi + d_hi) return 0.0;
        if (w > hi - d_hi) {
            const double u = (w - (hi - d_hi)) / (2.0 * d_hi);
            const double c = std::cos(0.5 * pi * u);
            gain *= c * c;
        }
    }
    return gain;
}

} // namespace detail_ewt

/// Empirical wavelet decomposition by frequency-domain masking.
///
/// The spectrum is split at the bank boundaries; each band is pulled back to
/// the time domain through the inverse transform. The lowest band is the
/// trend channel s_N, the remaining bands are the wavelet components W_k.
/// Masks form a partition of unity, so the residual is numerically zero.
///
/// The signal is mirror-extended by half its length on each side before the
/// transform and the center is kept: the transform treats the input as
/// periodic, and on trending signals the wrap-around step would otherwise
/// ring into both ends.
inline DecompositionResult ewt_decompose(const TimeSeries& s, EwtBank bank = {}) {
    bank.validate();
    const std::size_t n = s.size();
    if (n < 8) throw ConfigError("ewt_decompose: series length must be >= 8");

    if (bank.boundaries.empty() && bank.modes > 1)
        bank.boundaries = detail_ewt::detect_boundaries(s.values, bank.modes);
    bank.validate();

    const double pi = 3.14159265358979323846;
    const std::size_t n_bands = bank.modes;
    // segment edges: 0, b_1, ..., b_{N-1}, pi
    std::vector<double> edges;
    edges.push_back(0.0);
    for (double b : bank.boundaries) edges.push_back(b);
    edges.push_back(pi);

    // transition half-width per interior boundary
    std::vector<double> delta(n_bands + 1, 0.0);
    for (std::size_t k = 1; k < n_bands; ++k) {
        const double seg_lo = edges[k] - edges[k - 1];
        const double seg_hi = edges[k + 1] - edges[k];
        delta[k] = bank.transition_ratio * std::min(seg_lo, seg_hi);
    }

    // mirror extension
    const std::size_t pad = n / 2;
    const std::size_t ext = n + 2 * pad;
    std::vector<double> extended(ext);
    for (std::size_t i = 0; i < pad; ++i) extended[i] = s.values[pad - i];
    for (std::size_t i = 0; i < n; ++i) extended[pad + i] = s.values[i];
    for (std::size_t i = 0; i < pad; ++i) extended[pad + n + i] = s.values[n - 2 - i];

    const auto spec = lcf::detail::fft_real(extended);
    std::vector<std::vector<double>> bands(n_bands);
    for (std::size_t k = 0; k < n_bands; ++k) {
        std::vector<lcf::detail::cplx> masked(ext);
        for (std::size_t j = 0; j < ext; ++j) {
            const std::size_t jm = std::min(j, ext - j); // fold onto [0, ext/2]
            const double w = 2.0 * pi * static_cast<double>(jm) / static_cast<double>(ext);
            const double g = detail_ewt::band_mask(w, edges[k], edges[k + 1], delta[k],
                                                   delta[k + 1], k == 0, k + 1 == n_bands);
            masked[j] = spec[j] * g;
        }
        const auto full = lcf::detail::ifft_real(std::move(masked));
        bands[k].assign(full.begin() + static_cast<std::ptrdiff_t>(pad),
                        full.begin() + static_cast<std::ptrdiff_t>(pad + n));
    }

    DecompositionResult r;
    r.trend = std::move(bands[0]); // s_N: low-frequency component
    for (std::size_t k = 1; k < n_bands; ++k) r.seasonals.push_back(std::move(bands[k]));
    r.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = s.values[i] - r.trend[i];
        for (const auto& w : r.seasonals) acc -= w[i];
        r.residual[i] = acc;
    }
    r.filtered = r.trend;
    return r;
}

} // namespace lcf::filters
