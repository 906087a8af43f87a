// lcf - leakage-current forecasting toolkit command line.
//
// Subcommands:
//   decompose  filter a series and emit the component CSV
//   train      fit one model, emit checkpoint + metrics
//   tune       TPE hyperparameter study, emit history + best config
//   bench      run one of the four benchmark experiments
//   predict    load a checkpoint, forecast, report the fault-alarm step
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcf/bench/harness.hpp"
#include "lcf/config.hpp"
#include "lcf/csv.hpp"
#include "lcf/errors.hpp"
#include "lcf/forecast/checkpoint.hpp"
#include "lcf/forecast/train.hpp"
#include "lcf/tune.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_override;
    std::string seed_override;
    std::string threads_override;
    bool quiet = false;
};

lcf::PipelineConfig effective_config(const CliOptions& opt) {
    lcf::PipelineConfig cfg =
        opt.config_path.empty() ? lcf::PipelineConfig{} : lcf::load_config(opt.config_path);
    // environment overrides output dir and thread count only
    if (const char* env_out = std::getenv("LCF_OUT")) cfg.out_dir = env_out;
    if (const char* env_thr = std::getenv("LCF_THREADS"))
        cfg.threads = static_cast<std::size_t>(std::stoull(env_thr));
    if (!opt.out_override.empty()) cfg.out_dir = opt.out_override;
    if (!opt.seed_override.empty()) cfg.seed = std::stoull(opt.seed_override);
    if (!opt.threads_override.empty()) cfg.threads = std::stoull(opt.threads_override);
    cfg.quiet = opt.quiet;
    return cfg;
}

fs::path make_run_dir(const lcf::PipelineConfig& cfg, const std::string& sub) {
    const std::string label =
        cfg.run_label.empty() ? lcf::bench::detail_bench::utc_timestamp() : cfg.run_label;
    fs::path dir = fs::path(cfg.out_dir) / sub / label;
    fs::create_directories(dir);
    return dir;
}

void write_effective_config(const lcf::PipelineConfig& cfg, const fs::path& dir) {
    std::ofstream out(dir / "effective_config.json");
    out << lcf::config_to_json(cfg).dump(2) << "\n";
}

int cmd_decompose(const lcf::PipelineConfig& cfg) {
    const auto series = lcf::bench::load_dataset(lcf::to_experiment_config(cfg));
    const auto result = lcf::filters::apply_filter(series, cfg.filter_name, cfg.filter_params);
    const fs::path dir = make_run_dir(cfg, "decompose");
    result.write_csv((dir / "components.csv").string(), series.values);
    write_effective_config(cfg, dir);
    if (!cfg.quiet)
        std::cout << "decompose: filter=" << cfg.filter_name
                  << " components=" << result.seasonals.size() + 2
                  << " reconstruction_error=" << result.reconstruction_error(series.values)
                  << "\n          -> " << (dir / "components.csv").string() << "\n";
    return 0;
}

int cmd_train(const lcf::PipelineConfig& cfg) {
    const auto ecfg = lcf::to_experiment_config(cfg);
    const auto series = lcf::bench::load_dataset(ecfg);
    auto pl = lcf::bench::detail_bench::prepare_pipeline(
        series, cfg.filter_name, cfg.filter_params, cfg.model.input_size, cfg.model.horizon,
        cfg.test_fraction, cfg.max_train_windows, cfg.n_eval_windows, cfg.seed);

    lcf::forecast::ModelConfig mc = cfg.model;
    mc.seed = cfg.seed;
    auto mp = lcf::forecast::init_model(mc);
    const auto result = lcf::forecast::train(mp, pl.train_windows);
    const auto report = lcf::bench::detail_bench::evaluate_windows(
        pl.eval_windows,
        [&](const lcf::Window& w) { return lcf::forecast::predict_horizon(mp, w.input); });

    const fs::path dir = make_run_dir(cfg, "train");
    lcf::forecast::save_checkpoint(mp, (dir / "checkpoint.json").string());
    {
        std::ofstream mf(dir / "metrics.csv");
        mf << lcf::metrics::metrics_csv_header() << "\n"
           << lcf::metrics::to_csv_row(report) << "\n";
    }
    {
        std::vector<double> epochs(result.loss_curve.size());
        std::iota(epochs.begin(), epochs.end(), 0.0);
        lcf::csv::write_columns((dir / "loss_curve.csv").string(), {"epoch", "loss"},
                                {epochs, result.loss_curve});
    }
    write_effective_config(cfg, dir);
    if (!cfg.quiet)
        std::cout << "train: filter=" << cfg.filter_name << " test RMSE=" << report.rmse
                  << " final loss=" << result.loss_curve.back() << "\n       -> "
                  << (dir / "checkpoint.json").string() << "\n";
    return 0;
}

int cmd_tune(const lcf::PipelineConfig& cfg) {
    const auto res = lcf::run_tune(cfg);
    write_effective_config(cfg, res.dir);
    if (!cfg.quiet) {
        std::cout << "tune: " << cfg.tpe_n_trials << " trials, best value "
                  << res.study.best().y << "\n      best:";
        for (std::size_t d = 0; d < cfg.tpe_space.size(); ++d)
            std::cout << " " << cfg.tpe_space.dims[d].name << "=" << res.study.best().x[d];
        std::cout << "\n      -> " << res.dir.string() << "\n";
    }
    return 0;
}

int cmd_bench(const lcf::PipelineConfig& cfg) {
    const auto ecfg = lcf::to_experiment_config(cfg);
    lcf::bench::ExperimentOutput out;
    if (cfg.experiment == "filter_comparison") {
        out = lcf::bench::filter_comparison(ecfg);
    } else if (cfg.experiment == "horizon_sweep") {
        out = lcf::bench::horizon_sweep(ecfg);
    } else if (cfg.experiment == "statistical_study") {
        out = lcf::bench::statistical_study(ecfg).first;
    } else if (cfg.experiment == "baseline_benchmark") {
        out = lcf::bench::baseline_benchmark(ecfg);
    } else {
        throw lcf::ConfigError("unknown experiment '" + cfg.experiment +
                               "' (filter_comparison|horizon_sweep|statistical_study|"
                               "baseline_benchmark)");
    }
    write_effective_config(cfg, out.dir);
    if (!cfg.quiet) {
        std::size_t failed = 0;
        for (const auto& r : out.records)
            if (!r.error.empty()) ++failed;
        std::cout << "bench: " << cfg.experiment << " " << out.records.size() << " runs ("
                  << failed << " failed)\n       -> " << out.dir.string() << "\n";
    }
    return 0;
}

int cmd_predict(const lcf::PipelineConfig& cfg) {
    if (cfg.checkpoint_path.empty())
        throw lcf::ConfigError("predict: set predict.checkpoint in the config");
    const auto mp = lcf::forecast::load_checkpoint(cfg.checkpoint_path);
    const auto series = lcf::bench::load_dataset(lcf::to_experiment_config(cfg));
    const auto filtered =
        lcf::filters::apply_filter(series, cfg.filter_name, cfg.filter_params).filtered;
    if (filtered.size() < mp.cfg.input_size)
        throw lcf::DataError("predict: series shorter than the model input size");
    const std::vector<double> tail(filtered.end() - static_cast<std::ptrdiff_t>(mp.cfg.input_size),
                                   filtered.end());
    const auto forecast = lcf::forecast::predict_horizon(mp, tail);
    const auto alarm = lcf::fault_alarm(forecast, lcf::FaultThreshold{cfg.fault_limit});

    const fs::path dir = make_run_dir(cfg, "predict");
    {
        std::vector<double> steps(forecast.size());
        std::iota(steps.begin(), steps.end(), 0.0);
        lcf::csv::write_columns((dir / "forecast.csv").string(), {"step", "forecast"},
                                {steps, forecast});
    }
    {
        nlohmann::json rep{
            {"limit_amperes", cfg.fault_limit},
            {"first_crossing_step",
             alarm ? nlohmann::json(*alarm) : nlohmann::json()},
            {"horizon", forecast.size()},
        };
        std::ofstream rf(dir / "fault_report.json");
        rf << rep.dump(2) << "\n";
    }
    write_effective_config(cfg, dir);
    if (!cfg.quiet) {
        std::cout << "predict: horizon=" << forecast.size();
        if (alarm)
            std::cout << " first crossing of " << cfg.fault_limit << " A at step " << *alarm;
        else
            std::cout << " no crossing of " << cfg.fault_limit << " A";
        std::cout << "\n         -> " << dir.string() << "\n";
    }
    return 0;
}

void emit_error(const std::string& type, const std::string& message) {
    nlohmann::json err{{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lcf - leakage-current forecasting toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // accept the global flags after the subcommand too

    CliOptions opt;
    app.add_option("--config", opt.config_path, "Pipeline config file (JSON)");
    app.add_option("--seed", opt.seed_override, "Root seed override");
    app.add_option("--out", opt.out_override, "Output directory override");
    app.add_option("--threads", opt.threads_override, "Worker pool size override");
    app.add_flag("--quiet", opt.quiet, "Suppress progress output");

    auto* sc_decompose = app.add_subcommand("decompose", "Filter a series, emit component CSV");
    auto* sc_train = app.add_subcommand("train", "Fit one model, emit checkpoint + metrics");
    auto* sc_tune = app.add_subcommand("tune", "TPE study, emit history + best config");
    auto* sc_bench = app.add_subcommand("bench", "Run a benchmark experiment");
    auto* sc_predict = app.add_subcommand("predict", "Forecast from a checkpoint");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        emit_error("config", e.what());
        return 2;
    }

    try {
        const lcf::PipelineConfig cfg = effective_config(opt);
        if (sc_decompose->parsed()) return cmd_decompose(cfg);
        if (sc_train->parsed()) return cmd_train(cfg);
        if (sc_tune->parsed()) return cmd_tune(cfg);
        if (sc_bench->parsed()) return cmd_bench(cfg);
        if (sc_predict->parsed()) return cmd_predict(cfg);
        emit_error("config", "no subcommand given");
        return 2;
    } catch (const lcf::ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const lcf::DataError& e) {
        emit_error("data", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 4;
    }
}
