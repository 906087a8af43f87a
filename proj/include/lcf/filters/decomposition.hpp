#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lcf/csv.hpp"
#include "lcf/errors.hpp"

namespace lcf::filters {

/// Additive decomposition of a series.
///
/// `trend` + sum of `seasonals` + `residual` reconstructs the input.
/// `filtered` is the channel fed to the forecaster (the trend-like component
/// for every filter in this bank).
struct DecompositionResult {
    std::vector<double> trend;
    std::vector<std::vector<double>> seasonals;
    std::vector<double> residual;
    std::vector<double> filtered;

    std::size_t size() const { return trend.size(); }

    /// trend + sum(seasonals) + residual at each position.
    std::vector<double> reconstruction() const {
        std::vector<double> out = trend;
        for (const auto& s : seasonals)
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += s[i];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += residual[i];
        return out;
    }

    /// max |reconstruction - input| / max |input| (relative to input scale).
    double reconstruction_error(const std::vector<double>& input) const {
        const auto rec = reconstruction();
        double max_err = 0.0, max_abs = 0.0;
        for (std::size_t i = 0; i < input.size(); ++i) {
            max_err = std::max(max_err, std::fabs(rec[i] - input[i]));
            max_abs = std::max(max_abs, std::fabs(input[i]));
        }
        return max_abs > 0.0 ? max_err / max_abs : max_err;
    }

    /// One column per component: input, trend, seasonal_k..., residual, filtered.
    void write_csv(const std::string& path, const std::vector<double>& input) const {
        std::vector<std::string> names{"input", "trend"};
        std::vector<std::vector<double>> cols{input, trend};
        for (std::size_t j = 0; j < seasonals.size(); ++j) {
            names.push_back("seasonal_" + std::to_string(j + 1));
            cols.push_back(seasonals[j]);
        }
        names.emplace_back("residual");
        cols.push_back(residual);
        names.emplace_back("filtered");
        cols.push_back(filtered);
        csv::write_columns(path, names, cols);
    }
};

} // namespace lcf::filters
