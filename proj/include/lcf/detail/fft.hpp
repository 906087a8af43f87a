#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace lcf::detail {

using cplx = std::complex<double>;

/// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n < 2) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * 3.14159265358979323846 / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// DFT of arbitrary length via Bluestein's chirp-z algorithm (power-of-two
/// lengths go straight to radix-2).
inline void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0) return;
    if ((n & (n - 1)) == 0) {
        fft_pow2(a, inverse);
        return;
    }
    const double pi = 3.14159265358979323846;
    const double sign = inverse ? 1.0 : -1.0;
    // chirp: w_k = exp(sign*i*pi*k^2/n); uses k^2 mod 2n to avoid precision loss
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t k2 = static_cast<std::size_t>(
            (static_cast<unsigned long long>(k) * k) % (2ull * n));
        const double ang = sign * pi * static_cast<double>(k2) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> x(m, cplx(0, 0)), y(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = std::conj(w[k]);
        if (k != 0) y[m - k] = std::conj(w[k]);
    }
    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

inline std::vector<cplx> fft_real(const std::vector<double>& x) {
    std::vector<cplx> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = cplx(x[i], 0.0);
    fft(a, false);
    return a;
}

inline std::vector<double> ifft_real(std::vector<cplx> a) {
    fft(a, true);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

} // namespace lcf::detail
