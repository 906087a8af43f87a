#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "lcf/detail/linalg.hpp"
#include "lcf/errors.hpp"

namespace lcf::filters {

/// Local regression settings: fraction of the sample in each neighborhood
/// and the local polynomial degree (1 or 2).
struct LoessParams {
    double span_fraction = 0.3;
    int degree = 1;

    void validate() const {
        if (!(span_fraction > 0.0 && span_fraction <= 1.0))
            throw ConfigError("LoessParams: span_fraction must be in (0,1]");
        if (degree != 1 && degree != 2)
            throw ConfigError("LoessParams: degree must be 1 or 2");
    }
};

namespace detail_loess {

inline double tricube(double u) {
    const double a = std::fabs(u);
    if (a >= 1.0) return 0.0;
    const double t = 1.0 - a * a * a;
    return t * t * t;
}

} // namespace detail_loess

/// Locally weighted polynomial fit evaluated at one target x.
///
/// Neighborhood: the k nearest points by |x - target| (ties by index), with
/// k = max(degree + 2, ceil(span * n)) clamped to n. Distances are scaled by
/// the k-th nearest distance and weighted with the tricube kernel
/// w(u) = (1 - |u|^3)^3. Optional per-point robustness weights multiply in.
inline double loess_at(const std::vector<double>& xs, const std::vector<double>& ys,
                       double target, const LoessParams& p,
                       const std::vector<double>* robustness = nullptr) {
    p.validate();
    const std::size_t n = xs.size();
    if (ys.size() != n) throw ConfigError("loess_at: xs/ys length mismatch");
    const std::size_t need = static_cast<std::size_t>(p.degree) + 1;
    if (n < need) throw ConfigError("loess_at: need at least degree+1 points");

    std::size_t k = static_cast<std::size_t>(
        std::ceil(p.span_fraction * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, std::min<std::size_t>(n, need + 1), n);

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(xs[a] - target) < std::fabs(xs[b] - target);
    });
    const double d_max = std::fabs(xs[idx[k - 1]] - target);
    if (d_max == 0.0)
        throw ConfigError("loess_at: degenerate neighborhood at x index " +
                          std::to_string(idx[0]));

    // weighted normal equations on x centered at the target
    const std::size_t m = need;
    std::vector<double> xtx(m * m, 0.0), xty(m, 0.0);
    double wsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t i = idx[j];
        const double dx = xs[i] - target;
        double w = detail_loess::tricube(dx / d_max);
        if (robustness) w *= (*robustness)[i];
        if (w <= 0.0) continue;
        wsum += w;
        double pows[3] = {1.0, dx, dx * dx};
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c) xtx[r * m + c] += w * pows[r] * pows[c];
            xty[r] += w * pows[r] * ys[i];
        }
    }
    if (wsum <= 0.0)
        throw ConfigError("loess_at: no positive weights in neighborhood of x=" +
                          std::to_string(target));
    try {
        const auto beta = detail::solve_dense(xtx, xty);
        return beta[0]; // fitted value at the (centered) target
    } catch (const RuntimeFailure&) {
        throw ConfigError("loess_at: degenerate neighborhood (singular fit) at x=" +
                          std::to_string(target));
    }
}

/// LOESS smooth of ys over xs evaluated at every xs position.
inline std::vector<double> loess_smooth(const std::vector<double>& xs,
                                        const std::vector<double>& ys,
                                        const LoessParams& p,
                                        const std::vector<double>* robustness = nullptr) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = loess_at(xs, ys, xs[i], p, robustness);
    return out;
}

} // namespace lcf::filters
