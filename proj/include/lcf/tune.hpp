#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lcf/bench/harness.hpp"
#include "lcf/bench/svg.hpp"
#include "lcf/config.hpp"
#include "lcf/errors.hpp"
#include "lcf/forecast/train.hpp"
#include "lcf/tpe/importance.hpp"
#include "lcf/tpe/tpe.hpp"

namespace lcf {

/// Apply one named hyperparameter to a model config. The tuned embed_dim is
/// snapped up to a multiple of num_heads after all dimensions are applied.
inline void apply_hyperparameter(forecast::ModelConfig& m, const std::string& name,
                                 double value) {
    if (name == "batch_size") m.batch_size = static_cast<std::size_t>(value);
    else if (name == "num_heads") m.num_heads = static_cast<std::size_t>(value);
    else if (name == "learning_rate") m.learning_rate = value;
    else if (name == "dropout") m.dropout = value;
    else if (name == "epochs") m.epochs = static_cast<std::size_t>(value);
    else if (name == "embed_dim") m.embed_dim = static_cast<std::size_t>(value);
    else if (name == "reg_lambda") m.reg_lambda = value;
    else
        throw ConfigError("tune: unsupported hyperparameter '" + name + "'");
}

inline forecast::ModelConfig configured_model(const forecast::ModelConfig& base,
                                              const tpe::SearchSpace& space,
                                              const std::vector<double>& x) {
    forecast::ModelConfig m = base;
    for (std::size_t d = 0; d < space.size(); ++d)
        apply_hyperparameter(m, space.dims[d].name, x[d]);
    m.embed_dim = forecast::snap_embed_dim(m.embed_dim, m.num_heads);
    return m;
}

struct TuneResult {
    tpe::StudyResult study;
    forecast::ModelConfig best_model;
    tpe::ImportanceReport importance;
    std::filesystem::path dir;
};

/// Hypertune the forecaster with the tree-structured Parzen estimator.
///
/// The objective is validation RMSE: the test split is left untouched, a
/// validation tail is carved off the training region, and each trial trains
/// a fresh model with the proposed hyperparameters.
inline TuneResult run_tune(const PipelineConfig& cfg) {
    cfg.tpe_space.validate();
    const auto ecfg = to_experiment_config(cfg);
    const TimeSeries series = bench::load_dataset(ecfg);
    const auto filtered =
        filters::apply_filter(series, cfg.filter_name, cfg.filter_params).filtered;

    const std::size_t n = filtered.size();
    const std::size_t test_len =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.test_fraction));
    const std::size_t train_len = n - test_len;
    if (train_len < 4 * (cfg.model.input_size + cfg.model.horizon))
        throw ConfigError("tune: training region too short for a validation split");
    std::vector<double> train_part(filtered.begin(),
                                   filtered.begin() + static_cast<std::ptrdiff_t>(train_len));

    tpe::Objective objective = [&](const std::vector<double>& x, std::uint64_t seed) {
        forecast::ModelConfig m = configured_model(cfg.model, cfg.tpe_space, x);
        m.seed = seed;
        auto pl = bench::detail_bench::prepare_windows(
            train_part, m.input_size, m.horizon, cfg.tpe_val_fraction,
            cfg.max_train_windows, cfg.n_eval_windows, seed);
        auto mp = forecast::init_model(m);
        forecast::train(mp, pl.train_windows);
        const auto report = bench::detail_bench::evaluate_windows(
            pl.eval_windows,
            [&](const Window& w) { return forecast::predict_horizon(mp, w.input); });
        return report.rmse;
    };

    // timing wrapper so each trial records its wall time
    tpe::TpeState proto;
    proto.gamma_fraction = cfg.tpe_gamma_fraction;
    proto.n_startup = cfg.tpe_n_startup;
    proto.n_candidates = cfg.tpe_n_candidates;

    std::vector<double> wall_times;
    tpe::Objective timed = [&](const std::vector<double>& x, std::uint64_t seed) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const double y = objective(x, seed);
            wall_times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            return y;
        } catch (...) {
            wall_times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            throw;
        }
    };

    TuneResult res;
    res.study = tpe::optimize(timed, cfg.tpe_space, cfg.tpe_n_trials, cfg.seed, proto);
    for (std::size_t i = 0; i < res.study.state.history.size() && i < wall_times.size(); ++i)
        res.study.state.history[i].wall_time_s = wall_times[i];
    res.best_model = configured_model(cfg.model, cfg.tpe_space, res.study.best().x);
    if (res.study.state.complete_indices().size() >= 10)
        res.importance = tpe::importance(res.study.state);

    // artifacts
    const std::string label =
        cfg.run_label.empty() ? bench::detail_bench::utc_timestamp() : cfg.run_label;
    res.dir = std::filesystem::path(cfg.out_dir) / "tune" / label;
    std::filesystem::create_directories(res.dir);

    std::ofstream hist(res.dir / "history.jsonl");
    for (const auto& t : res.study.state.history) {
        nlohmann::json params = nlohmann::json::object();
        for (std::size_t d = 0; d < cfg.tpe_space.size(); ++d)
            params[cfg.tpe_space.dims[d].name] = t.x[d];
        nlohmann::json line{
            {"params", params},
            {"value", t.status == tpe::TrialStatus::Complete ? nlohmann::json(t.y)
                                                             : nlohmann::json()},
            {"seed", t.seed},
            {"wall_time_s", t.wall_time_s},
            {"status", t.status == tpe::TrialStatus::Complete ? "complete" : "failed"},
        };
        hist << line.dump() << "\n";
    }
    hist.close();

    {
        nlohmann::json best{
            {"value", res.study.best().y},
            {"model", forecast::config_to_json(res.best_model)},
            {"params", nlohmann::json::object()},
        };
        for (std::size_t d = 0; d < cfg.tpe_space.size(); ++d)
            best["params"][cfg.tpe_space.dims[d].name] = res.study.best().x[d];
        if (!res.importance.fractions.empty()) {
            best["importance"] = res.importance.fractions;
            best["importance_degenerate"] = res.importance.degenerate;
        }
        std::ofstream bf(res.dir / "best_config.json");
        bf << best.dump(2) << "\n";
    }

    {
        std::ofstream tcsv(res.dir / "trials.csv");
        tcsv.precision(17);
        tcsv << "trial";
        for (const auto& d : cfg.tpe_space.dims) tcsv << "," << d.name;
        tcsv << ",value,status\n";
        for (std::size_t i = 0; i < res.study.state.history.size(); ++i) {
            const auto& t = res.study.state.history[i];
            tcsv << i;
            for (double x : t.x) tcsv << "," << x;
            tcsv << ",";
            if (t.status == tpe::TrialStatus::Complete) tcsv << t.y;
            tcsv << "," << (t.status == tpe::TrialStatus::Complete ? "complete" : "failed")
                 << "\n";
        }
    }

    bench::SvgSeries sv;
    sv.label = "trial value";
    sv.scatter = true;
    for (std::size_t i = 0; i < res.study.state.history.size(); ++i) {
        const auto& t = res.study.state.history[i];
        if (t.status == tpe::TrialStatus::Complete) {
            sv.xs.push_back(static_cast<double>(i));
            sv.ys.push_back(t.y);
        }
    }
    bench::write_svg((res.dir / "plot.svg").string(), "Objective per trial", {sv}, true);
    return res;
}

} // namespace lcf
