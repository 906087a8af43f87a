#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lcf/errors.hpp"
#include "lcf/filters/butterworth.hpp"
#include "lcf/filters/cf.hpp"
#include "lcf/filters/decomposition.hpp"
#include "lcf/filters/emd.hpp"
#include "lcf/filters/ewt.hpp"
#include "lcf/filters/hp.hpp"
#include "lcf/filters/stl.hpp"
#include "lcf/time_series.hpp"

namespace lcf::filters {

/// Names accepted by apply_filter, "original" first.
inline const std::vector<std::string>& filter_names() {
    static const std::vector<std::string> names{
        "original", "cf", "hp", "stl", "mstl", "ewt", "butterworth", "emd"};
    return names;
}

/// Default settings for every filter in the bank. These are the contract for
/// what "default settings" means throughout the toolkit.
inline nlohmann::json filter_defaults() {
    return nlohmann::json{
        {"cf", {{"low_period", 6.0}, {"high_period", 32.0}, {"drift_adjust", true}}},
        {"hp", {{"lambda", 1600.0}}},
        {"stl",
         {{"period", 12}, {"span_fraction", 0.3}, {"degree", 1}, {"inner_iters", 2},
          {"robust_iters", 1}}},
        {"mstl",
         {{"periods", {12, 24}}, {"span_fraction", 0.3}, {"degree", 1},
          {"inner_iters", 2}, {"robust_iters", 1}}},
        {"ewt", {{"modes", 3}, {"transition_ratio", 0.2}, {"boundaries", nlohmann::json::array()}}},
        {"butterworth", {{"order", 2}, {"cutoff_fraction", 0.05}, {"zero_phase", true}}},
        {"emd", {{"max_imfs", 10}, {"sift_tolerance", 0.2}, {"max_sift_iters", 50}}},
    };
}

namespace detail_bank {

inline nlohmann::json merged_params(const std::string& name, const nlohmann::json& user) {
    nlohmann::json out = filter_defaults().value(name, nlohmann::json::object());
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!out.contains(it.key()))
            throw ConfigError("filter '" + name + "': unknown parameter '" + it.key() + "'");
        out[it.key()] = it.value();
    }
    return out;
}

} // namespace detail_bank

/// Run the named filter with defaults overridden by `params`.
inline DecompositionResult apply_filter(const TimeSeries& s, const std::string& name,
                                        const nlohmann::json& params = nlohmann::json::object()) {
    if (name == "original") {
        if (!params.empty())
            throw ConfigError("filter 'original' takes no parameters");
        DecompositionResult r;
        r.trend = s.values;
        r.residual.assign(s.size(), 0.0);
        r.filtered = s.values;
        return r;
    }
    const auto p = detail_bank::merged_params(name, params);
    if (name == "cf") {
        CfParams cp;
        cp.low_period = p.at("low_period").get<double>();
        cp.high_period = p.at("high_period").get<double>();
        cp.drift_adjust = p.at("drift_adjust").get<bool>();
        return cf_filter(s, cp);
    }
    if (name == "hp") {
        HpParams hp;
        hp.lambda = p.at("lambda").get<double>();
        return hp_filter(s, hp);
    }
    if (name == "stl" || name == "mstl") {
        LoessParams lp;
        lp.span_fraction = p.at("span_fraction").get<double>();
        lp.degree = p.at("degree").get<int>();
        StlOptions opts;
        opts.inner_iters = p.at("inner_iters").get<int>();
        opts.robust_iters = p.at("robust_iters").get<int>();
        if (name == "stl")
            return stl_decompose(s, p.at("period").get<std::size_t>(), lp, opts);
        return mstl_decompose(s, p.at("periods").get<std::vector<std::size_t>>(), lp, opts);
    }
    if (name == "ewt") {
        EwtBank bank;
        bank.modes = p.at("modes").get<std::size_t>();
        bank.transition_ratio = p.at("transition_ratio").get<double>();
        bank.boundaries = p.at("boundaries").get<std::vector<double>>();
        return ewt_decompose(s, bank);
    }
    if (name == "butterworth") {
        const double fs = 1.0 / s.dt;
        const auto d = butterworth_design(p.at("order").get<int>(),
                                          p.at("cutoff_fraction").get<double>() * fs, fs);
        return butterworth_apply(s, d, p.at("zero_phase").get<bool>());
    }
    if (name == "emd") {
        EmdParams ep;
        ep.max_imfs = p.at("max_imfs").get<std::size_t>();
        ep.sift_tolerance = p.at("sift_tolerance").get<double>();
        ep.max_sift_iters = p.at("max_sift_iters").get<std::size_t>();
        return emd_decompose(s, ep);
    }
    throw ConfigError("unknown filter '" + name + "'");
}

} // namespace lcf::filters
