#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcf/bench/harness.hpp"
#include "lcf/errors.hpp"
#include "lcf/forecast/checkpoint.hpp"
#include "lcf/forecast/model.hpp"
#include "lcf/tpe/tpe.hpp"

namespace lcf {

/// Everything a subcommand needs, in one structured file. Unknown keys are
/// rejected; defaults fill anything omitted; the effective (defaults-filled)
/// config is written next to every artifact so a run can be reproduced from
/// it alone.
struct PipelineConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "results";
    std::size_t threads = 1;
    bool quiet = false;

    // dataset block
    std::string dataset_path;          // empty = synthetic surrogate
    std::string dataset_column = "i_leak";
    std::string dataset_delimiter = ",";
    double dt_seconds = 1.0;
    std::size_t downsample_factor = 1;
    std::string downsample_method = "mean";
    std::size_t surrogate_length = 968;
    double surrogate_noise = 0.08;
    double surrogate_spike_prob = 0.01;

    // filter block
    std::string filter_name = "ewt";
    nlohmann::json filter_params = nlohmann::json::object();

    // model block
    forecast::ModelConfig model;

    // tpe block
    std::size_t tpe_n_trials = 25;
    double tpe_gamma_fraction = 0.25;
    std::size_t tpe_n_startup = 10;
    std::size_t tpe_n_candidates = 24;
    double tpe_val_fraction = 0.2;
    tpe::SearchSpace tpe_space; // defaults set below

    // experiment block
    std::string experiment = "filter_comparison";
    std::vector<std::size_t> horizons;
    std::size_t step = 5;
    std::size_t horizon = 60;
    std::size_t short_horizon = 5;
    std::size_t n_runs = 50;
    std::size_t n_seeds = 10;
    double test_fraction = 0.2;
    std::size_t max_train_windows = 256;
    std::size_t n_eval_windows = 32;
    std::size_t ar_order = 2;
    std::string run_label;

    // predict block
    std::string checkpoint_path;

    // fault block
    double fault_limit = 0.2;

    PipelineConfig() {
        // default hypertuning space
        tpe_space.dims = {
            {"batch_size", tpe::ParamKind::Integer, 10, 20},
            {"num_heads", tpe::ParamKind::Integer, 1, 8},
            {"learning_rate", tpe::ParamKind::LogReal, 1e-3, 1e-2},
            {"dropout", tpe::ParamKind::Real, 0.0, 0.7},
        };
    }
};

namespace detail_config {

inline std::string kind_to_string(tpe::ParamKind k) {
    switch (k) {
        case tpe::ParamKind::Integer: return "integer";
        case tpe::ParamKind::Real: return "real";
        case tpe::ParamKind::LogReal: return "log-real";
    }
    return "real";
}

inline tpe::ParamKind kind_from_string(const std::string& s) {
    if (s == "integer") return tpe::ParamKind::Integer;
    if (s == "real") return tpe::ParamKind::Real;
    if (s == "log-real") return tpe::ParamKind::LogReal;
    throw ConfigError("unknown parameter kind '" + s + "' (integer|real|log-real)");
}

/// Reject any user key that the reference object does not carry, recursing
/// into nested objects. Collects every violation before throwing.
inline void check_unknown_keys(const nlohmann::json& user, const nlohmann::json& ref,
                               const std::string& prefix, std::vector<std::string>& bad) {
    if (!user.is_object()) return;
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!ref.is_object() || !ref.contains(it.key())) {
            bad.push_back(path);
            continue;
        }
        if (it.value().is_object() && prefix != "filter")
            check_unknown_keys(it.value(), ref.at(it.key()), path, bad);
    }
}

} // namespace detail_config

inline nlohmann::json config_to_json(const PipelineConfig& c) {
    nlohmann::json space = nlohmann::json::array();
    for (const auto& d : c.tpe_space.dims)
        space.push_back({{"name", d.name},
                         {"kind", detail_config::kind_to_string(d.kind)},
                         {"lo", d.lo},
                         {"hi", d.hi}});
    return nlohmann::json{
        {"seed", c.seed},
        {"out_dir", c.out_dir},
        {"threads", c.threads},
        {"dataset",
         {{"path", c.dataset_path},
          {"column", c.dataset_column},
          {"delimiter", c.dataset_delimiter},
          {"dt_seconds", c.dt_seconds},
          {"downsample_factor", c.downsample_factor},
          {"downsample_method", c.downsample_method},
          {"surrogate",
           {{"length", c.surrogate_length},
            {"noise", c.surrogate_noise},
            {"spike_prob", c.surrogate_spike_prob}}}}},
        {"filter", {{"name", c.filter_name}, {"params", c.filter_params}}},
        {"model", forecast::config_to_json(c.model)},
        {"tpe",
         {{"n_trials", c.tpe_n_trials},
          {"gamma_fraction", c.tpe_gamma_fraction},
          {"n_startup", c.tpe_n_startup},
          {"n_candidates", c.tpe_n_candidates},
          {"val_fraction", c.tpe_val_fraction},
          {"space", space}}},
        {"experiment",
         {{"name", c.experiment},
          {"horizons", c.horizons},
          {"step", c.step},
          {"horizon", c.horizon},
          {"short_horizon", c.short_horizon},
          {"n_runs", c.n_runs},
          {"n_seeds", c.n_seeds},
          {"test_fraction", c.test_fraction},
          {"max_train_windows", c.max_train_windows},
          {"n_eval_windows", c.n_eval_windows},
          {"ar_order", c.ar_order},
          {"run_label", c.run_label}}},
        {"predict", {{"checkpoint", c.checkpoint_path}}},
        {"fault", {{"limit_amperes", c.fault_limit}}},
    };
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig c;
    std::vector<std::string> bad;
    detail_config::check_unknown_keys(j, config_to_json(c), "", bad);
    // filter.params keys are validated by the filter bank itself
    if (j.contains("filter") && j.at("filter").is_object()) {
        std::vector<std::string> fbad;
        nlohmann::json fref = {{"name", ""}, {"params", nlohmann::json::object()}};
        detail_config::check_unknown_keys(j.at("filter"), fref, "filter", fbad);
        bad.insert(bad.end(), fbad.begin(), fbad.end());
    }
    if (!bad.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& b : bad) msg += " " + b;
        throw ConfigError(msg);
    }

    auto get = [&](const char* block, const char* key, auto& field) {
        if (j.contains(block) && j.at(block).contains(key))
            field = j.at(block).at(key).template get<std::decay_t<decltype(field)>>();
    };

    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();

    get("dataset", "path", c.dataset_path);
    get("dataset", "column", c.dataset_column);
    get("dataset", "delimiter", c.dataset_delimiter);
    get("dataset", "dt_seconds", c.dt_seconds);
    get("dataset", "downsample_factor", c.downsample_factor);
    get("dataset", "downsample_method", c.downsample_method);
    if (j.contains("dataset") && j.at("dataset").contains("surrogate")) {
        const auto& s = j.at("dataset").at("surrogate");
        if (s.contains("length")) c.surrogate_length = s.at("length").get<std::size_t>();
        if (s.contains("noise")) c.surrogate_noise = s.at("noise").get<double>();
        if (s.contains("spike_prob")) c.surrogate_spike_prob = s.at("spike_prob").get<double>();
    }
    if (c.dataset_delimiter.size() != 1)
        throw ConfigError("dataset.delimiter must be a single character");

    get("filter", "name", c.filter_name);
    if (j.contains("filter") && j.at("filter").contains("params"))
        c.filter_params = j.at("filter").at("params");

    if (j.contains("model")) {
        nlohmann::json m = forecast::config_to_json(c.model);
        for (auto it = j.at("model").begin(); it != j.at("model").end(); ++it)
            m[it.key()] = it.value();
        c.model = forecast::config_from_json(m);
    }

    get("tpe", "n_trials", c.tpe_n_trials);
    get("tpe", "gamma_fraction", c.tpe_gamma_fraction);
    get("tpe", "n_startup", c.tpe_n_startup);
    get("tpe", "n_candidates", c.tpe_n_candidates);
    get("tpe", "val_fraction", c.tpe_val_fraction);
    if (j.contains("tpe") && j.at("tpe").contains("space")) {
        c.tpe_space.dims.clear();
        for (const auto& dj : j.at("tpe").at("space")) {
            tpe::ParamSpec d;
            d.name = dj.at("name").get<std::string>();
            d.kind = detail_config::kind_from_string(dj.at("kind").get<std::string>());
            d.lo = dj.at("lo").get<double>();
            d.hi = dj.at("hi").get<double>();
            c.tpe_space.dims.push_back(d);
        }
        c.tpe_space.validate();
    }
    if (!(c.tpe_gamma_fraction > 0.0 && c.tpe_gamma_fraction < 1.0))
        throw ConfigError("tpe.gamma_fraction must be in (0,1)");

    get("experiment", "name", c.experiment);
    get("experiment", "horizons", c.horizons);
    get("experiment", "step", c.step);
    get("experiment", "horizon", c.horizon);
    get("experiment", "short_horizon", c.short_horizon);
    get("experiment", "n_runs", c.n_runs);
    get("experiment", "n_seeds", c.n_seeds);
    get("experiment", "test_fraction", c.test_fraction);
    get("experiment", "max_train_windows", c.max_train_windows);
    get("experiment", "n_eval_windows", c.n_eval_windows);
    get("experiment", "ar_order", c.ar_order);
    get("experiment", "run_label", c.run_label);

    get("predict", "checkpoint", c.checkpoint_path);
    get("fault", "limit_amperes", c.fault_limit);
    if (!(c.fault_limit > 0.0)) throw ConfigError("fault.limit_amperes must be > 0");
    return c;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config value error in " + path + ": " + e.what());
    }
}

/// Bench-harness view of the pipeline config.
inline bench::ExperimentConfig to_experiment_config(const PipelineConfig& c) {
    bench::ExperimentConfig e;
    e.experiment = c.experiment;
    e.dataset_path = c.dataset_path;
    e.dataset_column = c.dataset_column;
    e.dataset_delimiter = c.dataset_delimiter[0];
    e.dt_seconds = c.dt_seconds;
    e.downsample_factor = c.downsample_factor;
    e.downsample_method = c.downsample_method;
    e.surrogate_length = c.surrogate_length;
    e.surrogate_noise = c.surrogate_noise;
    e.surrogate_spike_prob = c.surrogate_spike_prob;
    e.filter = c.filter_name;
    e.filter_params = c.filter_params;
    e.model = c.model;
    e.horizons = c.horizons;
    e.step = c.step;
    e.horizon = c.horizon;
    e.short_horizon = c.short_horizon;
    e.n_runs = c.n_runs;
    e.n_seeds = c.n_seeds;
    e.seed_base = c.seed;
    e.test_fraction = c.test_fraction;
    e.max_train_windows = c.max_train_windows;
    e.n_eval_windows = c.n_eval_windows;
    e.ar_order = c.ar_order;
    e.threads = c.threads;
    e.out_dir = c.out_dir;
    e.run_label = c.run_label;
    return e;
}

} // namespace lcf
