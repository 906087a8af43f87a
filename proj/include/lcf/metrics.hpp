#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "lcf/errors.hpp"

namespace lcf::metrics {

/// The four error metrics. MAPE/SMAPE are in percent. `mape_excluded`
/// counts points dropped from MAPE because the actual value was zero.
struct MetricsReport {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double smape = 0.0;
    std::size_t n = 0;
    std::size_t mape_excluded = 0;
};

struct EvaluateOptions {
    /// SMAPE denominator |y + yhat| / 2 (the toolkit default); set false for
    /// the conventional (|y| + |yhat|) / 2 form.
    bool smape_printed_denominator = true;
    /// Guard against vanishing SMAPE denominators (y close to -yhat).
    double denom_epsilon = 1e-15;
};

inline MetricsReport evaluate(const std::vector<double>& actual,
                              const std::vector<double>& forecast,
                              const EvaluateOptions& opts = {}) {
    if (actual.size() != forecast.size())
        throw ConfigError("metrics::evaluate: length mismatch");
    if (actual.empty())
        throw ConfigError("metrics::evaluate: empty input");

    const std::size_t n = actual.size();
    double se = 0.0, ae = 0.0, ape = 0.0, sape = 0.0;
    std::size_t mape_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = actual[i] - forecast[i];
        se += err * err;
        ae += std::fabs(err);
        if (actual[i] != 0.0) {
            ape += std::fabs(err / actual[i]);
            ++mape_n;
        }
        double denom = opts.smape_printed_denominator
                           ? std::fabs(actual[i] + forecast[i]) / 2.0
                           : (std::fabs(actual[i]) + std::fabs(forecast[i])) / 2.0;
        denom = std::max(denom, opts.denom_epsilon);
        sape += std::fabs(err) / denom;
    }

    MetricsReport r;
    r.n = n;
    r.rmse = std::sqrt(se / static_cast<double>(n));
    r.mae = ae / static_cast<double>(n);
    r.mape = mape_n > 0 ? 100.0 * ape / static_cast<double>(mape_n) : 0.0;
    r.mape_excluded = n - mape_n;
    r.smape = 100.0 * sape / static_cast<double>(n);
    return r;
}

inline std::string metrics_csv_header() { return "rmse,mae,mape,smape,n"; }

inline std::string to_csv_row(const MetricsReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.rmse << "," << r.mae << "," << r.mape << "," << r.smape << "," << r.n;
    return os.str();
}

/// The eleven distributional statistics reported per metric column.
struct StatsSummary {
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double range = 0.0;
    double std_dev = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
    double iqr = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
};

struct SummarizeOptions {
    /// Plain fourth standardized moment by default (normal ~ 3);
    /// set true to subtract 3.
    bool excess_kurtosis = false;
};

namespace detail_stats {

/// Linear-interpolation quantile on a sorted sample (position q * (n-1)).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

/// Densest-bin midpoint with Freedman-Diaconis bin width. Continuous data
/// rarely repeats exactly, so the mode is defined through the histogram.
inline double histogram_mode(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    const double lo = sorted.front(), hi = sorted.back();
    if (hi == lo) return lo;
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    if (!(width > 0.0)) width = (hi - lo) / std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
    std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    bins = std::clamp<std::size_t>(bins, 1, 1u << 20);
    std::vector<std::size_t> counts(bins, 0);
    for (double v : sorted) {
        std::size_t b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    const std::size_t best = static_cast<std::size_t>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    const double bw = (hi - lo) / static_cast<double>(bins);
    return lo + (static_cast<double>(best) + 0.5) * bw;
}

} // namespace detail_stats

inline StatsSummary summarize(const std::vector<double>& samples,
                              const SummarizeOptions& opts = {}) {
    const std::size_t n = samples.size();
    if (n < 2) throw ConfigError("metrics::summarize: need at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v)) throw ConfigError("metrics::summarize: non-finite sample");

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());

    StatsSummary out;
    // moments over the sorted sample make the summary bit-exactly
    // permutation-invariant
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    out.mean = mean;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sorted) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    out.std_dev = std::sqrt(m2 / static_cast<double>(n - 1)); // sample std
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
        if (opts.excess_kurtosis) out.kurtosis -= 3.0;
    } else {
        out.skewness = 0.0; // degenerate sample, by convention
        out.kurtosis = 0.0;
    }

    out.p25 = detail_stats::quantile_sorted(sorted, 0.25);
    out.p50 = detail_stats::quantile_sorted(sorted, 0.50);
    out.p75 = detail_stats::quantile_sorted(sorted, 0.75);
    out.median = out.p50;
    out.iqr = out.p75 - out.p25;
    out.range = sorted.back() - sorted.front();
    out.mode = detail_stats::histogram_mode(sorted);
    return out;
}

} // namespace lcf::metrics
