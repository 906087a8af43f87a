#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lcf/errors.hpp"

namespace lcf::detail {

/// Solve A x = b for a small dense system via Gaussian elimination with
/// partial pivoting. A is row-major n*n and is consumed.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw RuntimeFailure("solve_dense: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::fabs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a[r * n + col]);
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) throw RuntimeFailure("solve_dense: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return x;
}

/// Symmetric banded matrix stored by diagonals: band[d][i] = A(i, i+d),
/// d = 0..bw. Cholesky factorization + solve, with iterative refinement to
/// hold accuracy at extreme conditioning (HP filter at lambda ~ 1e12).
class BandedSPDSolver {
public:
    BandedSPDSolver(std::vector<std::vector<double>> band, std::size_t n)
        : a_(band), n_(n), bw_(band.size() - 1) {
        factorize(band);
    }

    std::vector<double> solve(const std::vector<double>& rhs, int refine_steps = 2) const {
        std::vector<double> x = solve_once(rhs);
        for (int it = 0; it < refine_steps; ++it) {
            std::vector<double> r = rhs;
            // r -= A x
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = a_[0][i] * x[i];
                for (std::size_t d = 1; d <= bw_; ++d) {
                    if (i + d < n_) acc += a_[d][i] * x[i + d];
                    if (i >= d) acc += a_[d][i - d] * x[i - d];
                }
                r[i] -= acc;
            }
            const std::vector<double> dx = solve_once(r);
            for (std::size_t i = 0; i < n_; ++i) x[i] += dx[i];
        }
        return x;
    }

private:
    void factorize(const std::vector<std::vector<double>>& band) {
        l_.assign(bw_ + 1, std::vector<double>(n_, 0.0));
        for (std::size_t j = 0; j < n_; ++j) {
            double diag = band[0][j];
            for (std::size_t k = (j > bw_ ? j - bw_ : 0); k < j; ++k) {
                const double l_jk = l_[j - k][k];
                diag -= l_jk * l_jk;
            }
            if (!(diag > 0.0))
                throw RuntimeFailure("BandedSPDSolver: matrix not positive definite");
            l_[0][j] = std::sqrt(diag);
            for (std::size_t d = 1; d <= bw_ && j + d < n_; ++d) {
                const std::size_t i = j + d;
                double v = band[d][j]; // A(j, j+d) = A(i, j)
                for (std::size_t k = (i > bw_ ? i - bw_ : 0); k < j; ++k) {
                    v -= l_[i - k][k] * l_[j - k][k];
                }
                l_[d][j] = v / l_[0][j];
            }
        }
    }

    std::vector<double> solve_once(const std::vector<double>& b) const {
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = b[i];
            for (std::size_t d = 1; d <= bw_ && d <= i; ++d) acc -= l_[d][i - d] * y[i - d];
            y[i] = acc / l_[0][i];
        }
        std::vector<double> x(n_);
        for (std::size_t ii = n_; ii-- > 0;) {
            double acc = y[ii];
            for (std::size_t d = 1; d <= bw_ && ii + d < n_; ++d) acc -= l_[d][ii] * x[ii + d];
            x[ii] = acc / l_[0][ii];
        }
        return x;
    }

    std::vector<std::vector<double>> a_;
    std::size_t n_;
    std::size_t bw_;
    std::vector<std::vector<double>> l_;
};

/// Thomas algorithm for tridiagonal systems. sub/diag/sup are the three
/// diagonals; sub[0] and sup[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::vector<double> sub,
                                             std::vector<double> diag,
                                             std::vector<double> sup,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t ii = n - 1; ii-- > 0;)
        x[ii] = (rhs[ii] - sup[ii] * x[ii + 1]) / diag[ii];
    return x;
}

} // namespace lcf::detail
