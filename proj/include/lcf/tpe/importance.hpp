#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/filters/loess.hpp"
#include "lcf/tpe/tpe.hpp"

namespace lcf::tpe {

struct ImportanceReport {
    std::map<std::string, double> fractions; // sums to 1
    /// Set when the objective column is constant, making importances
    /// meaningless (returned uniform).
    bool degenerate = false;
};

/// Variance-explained importance: fit a univariate degree-1 local regression
/// of y on each hyperparameter (log dimensions in log scale) and take the
/// variance of the fitted values; fractions are normalized to sum one.
inline ImportanceReport importance(const TpeState& state, double span = 0.5) {
    const auto idx = state.complete_indices();
    if (idx.size() < 10)
        throw ConfigError("importance: need at least 10 complete trials");

    const std::size_t n = idx.size();
    std::vector<double> ys;
    ys.reserve(n);
    for (std::size_t r : idx) ys.push_back(state.history[r].y);

    double y_mean = 0.0;
    for (double y : ys) y_mean += y;
    y_mean /= static_cast<double>(n);
    double y_var = 0.0;
    for (double y : ys) y_var += (y - y_mean) * (y - y_mean);

    ImportanceReport rep;
    if (y_var <= 0.0) {
        rep.degenerate = true;
        for (const auto& d : state.space.dims)
            rep.fractions[d.name] = 1.0 / static_cast<double>(state.space.size());
        return rep;
    }

    filters::LoessParams lp;
    lp.span_fraction = span;
    lp.degree = 1;

    std::vector<double> variances(state.space.size(), 0.0);
    double total = 0.0;
    for (std::size_t d = 0; d < state.space.size(); ++d) {
        std::vector<double> xs;
        xs.reserve(n);
        for (std::size_t r : idx)
            xs.push_back(state.space.dims[d].transform(state.history[r].x[d]));
        std::vector<double> fit;
        try {
            fit = filters::loess_smooth(xs, ys, lp);
        } catch (const ConfigError&) {
            // dimension stuck at one value: no explanatory power
            variances[d] = 0.0;
            continue;
        }
        double mean = 0.0;
        for (double f : fit) mean += f;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double f : fit) var += (f - mean) * (f - mean);
        variances[d] = var;
        total += var;
    }

    if (total <= 0.0) {
        rep.degenerate = true;
        for (const auto& dm : state.space.dims)
            rep.fractions[dm.name] = 1.0 / static_cast<double>(state.space.size());
        return rep;
    }
    for (std::size_t d = 0; d < state.space.size(); ++d)
        rep.fractions[state.space.dims[d].name] = variances[d] / total;
    return rep;
}

} // namespace lcf::tpe
