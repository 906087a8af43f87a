#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Discrete low-pass design: feedforward taps b_0..b_n, feedback taps
/// a_1..a_n (a_0 = 1 implied), for y[t] = sum b_k x[t-k] - sum a_k y[t-k].
struct ButterworthDesign {
    int order = 2;
    double cutoff_hz = 0.1;
    double sample_rate_hz = 1.0;
    std::vector<double> b; // size order+1
    std::vector<double> a; // size order, a_1..a_n

    /// Complex frequency response at digital angular frequency w (rad/sample).
    std::complex<double> response(double w) const {
        const std::complex<double> z_inv = std::polar(1.0, -w);
        std::complex<double> num(0.0, 0.0), zp(1.0, 0.0);
        for (std::size_t k = 0; k < b.size(); ++k) {
            num += b[k] * zp;
            zp *= z_inv;
        }
        std::complex<double> den(1.0, 0.0);
        zp = z_inv;
        for (std::size_t k = 0; k < a.size(); ++k) {
            den += a[k] * zp;
            zp *= z_inv;
        }
        return num / den;
    }

    double magnitude(double w) const { return std::abs(response(w)); }
};

/// Low-pass design from the analog prototype: poles equally spaced on the
/// Butterworth circle, cutoff pre-warped for the bilinear map
/// s = (2/T)(1 - z^-1)/(1 + z^-1), n zeros placed at z = -1, gain normalized
/// to 1 at DC. The pre-warp pins the half-power point: |H| at the cutoff is
/// exactly 1/sqrt(2).
inline ButterworthDesign butterworth_design(int order, double cutoff_hz,
                                            double sample_rate_hz) {
    if (order < 1) throw ConfigError("butterworth_design: order must be >= 1");
    if (!(sample_rate_hz > 0.0))
        throw ConfigError("butterworth_design: sample rate must be > 0");
    if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate_hz))
        throw ConfigError("butterworth_design: cutoff must lie in (0, Nyquist)");

    using C = std::complex<double>;
    const double pi = 3.14159265358979323846;
    const double T = 1.0 / sample_rate_hz;
    // pre-warped analog cutoff so the digital response hits 1/sqrt(2) at cutoff_hz
    const double wc = (2.0 / T) * std::tan(pi * cutoff_hz * T);

    // analog poles on the left half of the Butterworth circle, scaled by wc
    std::vector<C> z_poles(static_cast<std::size_t>(order));
    const double two_over_T = 2.0 / T;
    for (int k = 0; k < order; ++k) {
        const double theta = pi * (2.0 * k + order + 1.0) / (2.0 * order);
        const C s_pole = wc * C(std::cos(theta), std::sin(theta));
        z_poles[static_cast<std::size_t>(k)] =
            (two_over_T + s_pole) / (two_over_T - s_pole);
    }

    // expand polynomials from roots: denominator from poles, numerator from
    // n zeros at z = -1 (coefficients in powers of z^-1)
    auto poly_from_roots = [](const std::vector<C>& roots) {
        std::vector<C> c{C(1.0, 0.0)};
        for (const C& r : roots) {
            std::vector<C> next(c.size() + 1, C(0.0, 0.0));
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i] += c[i];
                next[i + 1] -= c[i] * r;
            }
            c = std::move(next);
        }
        return c;
    };

    const auto den = poly_from_roots(z_poles);
    std::vector<C> zeros(static_cast<std::size_t>(order), C(-1.0, 0.0));
    const auto num = poly_from_roots(zeros);

    // normalize DC gain to exactly one: H(z=1) = K * num(1) / den(1) = 1
    C num_dc(0.0, 0.0), den_dc(0.0, 0.0);
    for (const C& c : num) num_dc += c;
    for (const C& c : den) den_dc += c;
    const double gain = (den_dc / num_dc).real();

    ButterworthDesign d;
    d.order = order;
    d.cutoff_hz = cutoff_hz;
    d.sample_rate_hz = sample_rate_hz;
    d.b.resize(static_cast<std::size_t>(order) + 1);
    d.a.resize(static_cast<std::size_t>(order));
    for (int k = 0; k <= order; ++k)
        d.b[static_cast<std::size_t>(k)] = gain * num[static_cast<std::size_t>(k)].real();
    for (int k = 1; k <= order; ++k)
        d.a[static_cast<std::size_t>(k - 1)] = den[static_cast<std::size_t>(k)].real();

    for (const C& zp : z_poles)
        if (!(std::abs(zp) < 1.0))
            throw RuntimeFailure("butterworth_design: unstable pole |z| >= 1");
    return d;
}

namespace detail_bw {

/// Direct-form recursion with zero initial state.
inline std::vector<double> run(const ButterworthDesign& d, const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n, 0.0);
    const std::size_t nb = d.b.size(), na = d.a.size();
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nb && k <= t; ++k) acc += d.b[k] * x[t - k];
        for (std::size_t k = 1; k <= na && k <= t; ++k) acc -= d.a[k - 1] * y[t - k];
        y[t] = acc;
    }
    return y;
}

} // namespace detail_bw

/// Apply the design by its difference equation. With zero_phase the signal
/// is filtered forward and backward, cancelling the phase shift (and
/// doubling the effective order).
///
/// filtered = low-pass output (trend); residual = input - filtered.
inline DecompositionResult butterworth_apply(const TimeSeries& s,
                                             const ButterworthDesign& d,
                                             bool zero_phase = true) {
    if (d.b.empty()) throw ConfigError("butterworth_apply: empty design");
    std::vector<double> y = detail_bw::run(d, s.values);
    if (zero_phase) {
        std::reverse(y.begin(), y.end());
        y = detail_bw::run(d, y);
        std::reverse(y.begin(), y.end());
    }
    DecompositionResult r;
    r.trend = std::move(y);
    r.residual.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        r.residual[i] = s.values[i] - r.trend[i];
    r.filtered = r.trend;
    return r;
}

} // namespace lcf::filters
