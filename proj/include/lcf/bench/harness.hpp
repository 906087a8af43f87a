#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lcf/bench/surrogate.hpp"
#include "lcf/bench/svg.hpp"
#include "lcf/csv.hpp"
#include "lcf/errors.hpp"
#include "lcf/filters/filter_bank.hpp"
#include "lcf/forecast/baselines.hpp"
#include "lcf/forecast/train.hpp"
#include "lcf/metrics.hpp"
#include "lcf/rng.hpp"
#include "lcf/time_series.hpp"

namespace lcf::bench {

/// Settings shared by the four experiments. Horizon-specific experiments
/// override `model.horizon`; everything else applies as-is.
struct ExperimentConfig {
    std::string experiment = "filter_comparison";
    /// Empty path = seeded synthetic surrogate (documented in the README).
    std::string dataset_path;
    std::string dataset_column = "i_leak";
    char dataset_delimiter = ',';
    double dt_seconds = 1.0;
    std::size_t downsample_factor = 1;
    std::string downsample_method = "mean";
    std::size_t surrogate_length = 968;
    double surrogate_noise = 0.08;
    double surrogate_spike_prob = 0.01;

    std::string filter = "ewt";
    nlohmann::json filter_params = nlohmann::json::object();

    forecast::ModelConfig model;

    std::vector<std::size_t> horizons;   // horizon_sweep grid; empty = 5..60 step `step`
    std::size_t step = 5;
    std::size_t horizon = 60;            // fixed-horizon experiments
    std::size_t short_horizon = 5;       // baseline benchmark pair
    std::size_t n_runs = 50;             // statistical study
    std::size_t n_seeds = 10;            // seed-averaging for comparative tables
    std::uint64_t seed_base = 1;
    double test_fraction = 0.2;
    /// Desk-scale caps: training windows per run and sampled eval windows.
    std::size_t max_train_windows = 256;
    std::size_t n_eval_windows = 32;
    std::size_t ar_order = 2;
    std::size_t threads = 1;
    std::string out_dir = "results";
    /// Fixed run directory name; empty = UTC timestamp.
    std::string run_label;

    void validate() const {
        if (n_runs < 1) throw ConfigError("ExperimentConfig: n_runs must be >= 1");
        if (n_seeds < 1) throw ConfigError("ExperimentConfig: n_seeds must be >= 1");
        if (!horizons.empty())
            for (std::size_t i = 1; i < horizons.size(); ++i)
                if (horizons[i] <= horizons[i - 1])
                    throw ConfigError("ExperimentConfig: horizons must be increasing");
        if (!(test_fraction > 0.0 && test_fraction < 1.0))
            throw ConfigError("ExperimentConfig: test_fraction must be in (0,1)");
    }
};

/// One training/evaluation run, keyed by (experiment, method, horizon, seed).
struct RunRecord {
    std::string experiment;
    std::string method;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
    metrics::MetricsReport report;
    double wall_time_s = 0.0;
    std::string error; // empty = success

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"experiment", experiment}, {"method", method},   {"horizon", horizon},
            {"seed", seed},             {"rmse", report.rmse}, {"mae", report.mae},
            {"mape", report.mape},      {"smape", report.smape}, {"n", report.n},
            {"wall_time_s", wall_time_s}, {"error", error},
        };
    }
};

namespace detail_bench {

/// Windowed data for one filtered pipeline: training windows from the train
/// region, evaluation windows whose targets lie in the test region.
struct Pipeline {
    std::vector<double> filtered;
    std::size_t train_len = 0;
    std::vector<Window> train_windows;
    std::vector<Window> eval_windows;
};

inline Pipeline prepare_windows(std::vector<double> filtered, std::size_t input_size,
                                std::size_t horizon, double test_fraction,
                                std::size_t max_train, std::size_t n_eval,
                                std::uint64_t seed) {
    Pipeline pl;
    pl.filtered = std::move(filtered);
    const std::size_t n = pl.filtered.size();
    const std::size_t test_len =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction));
    if (test_len < horizon) throw ConfigError("prepare_pipeline: test split shorter than horizon");
    pl.train_len = n - test_len;
    if (pl.train_len < input_size + horizon)
        throw ConfigError("prepare_pipeline: train split too short");

    // train: windows fully inside [0, train_len)
    for (std::size_t start = 0; start + input_size + horizon <= pl.train_len; ++start) {
        Window w;
        w.input.assign(pl.filtered.begin() + static_cast<std::ptrdiff_t>(start),
                       pl.filtered.begin() + static_cast<std::ptrdiff_t>(start + input_size));
        w.target.assign(pl.filtered.begin() + static_cast<std::ptrdiff_t>(start + input_size),
                        pl.filtered.begin() +
                            static_cast<std::ptrdiff_t>(start + input_size + horizon));
        pl.train_windows.push_back(std::move(w));
    }
    // eval: targets fully inside [train_len, n); inputs may reach back
    std::vector<Window> eval_all;
    const std::size_t first_start = pl.train_len >= input_size ? pl.train_len - input_size : 0;
    for (std::size_t start = first_start; start + input_size + horizon <= n; ++start) {
        if (start + input_size < pl.train_len) continue;
        Window w;
        w.input.assign(pl.filtered.begin() + static_cast<std::ptrdiff_t>(start),
                       pl.filtered.begin() + static_cast<std::ptrdiff_t>(start + input_size));
        w.target.assign(pl.filtered.begin() + static_cast<std::ptrdiff_t>(start + input_size),
                        pl.filtered.begin() +
                            static_cast<std::ptrdiff_t>(start + input_size + horizon));
        eval_all.push_back(std::move(w));
    }
    if (pl.train_windows.empty() || eval_all.empty())
        throw ConfigError("prepare_pipeline: no feasible windows");

    // seeded subsampling: the Monte Carlo element of the protocol
    auto sample = [&](std::vector<Window>& pool, std::size_t want, std::uint64_t stream) {
        if (pool.size() <= want) return;
        auto rng = make_rng(derive_seed(seed, stream));
        std::vector<std::size_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(want);
        std::sort(idx.begin(), idx.end());
        std::vector<Window> keep;
        keep.reserve(want);
        for (std::size_t i : idx) keep.push_back(std::move(pool[i]));
        pool = std::move(keep);
    };
    sample(pl.train_windows, max_train, 0x11A1);
    pl.eval_windows = std::move(eval_all);
    sample(pl.eval_windows, n_eval, 0x11A2);
    return pl;
}

inline Pipeline prepare_pipeline(const TimeSeries& series, const std::string& filter,
                                 const nlohmann::json& filter_params, std::size_t input_size,
                                 std::size_t horizon, double test_fraction,
                                 std::size_t max_train, std::size_t n_eval,
                                 std::uint64_t seed) {
    return prepare_windows(filters::apply_filter(series, filter, filter_params).filtered,
                           input_size, horizon, test_fraction, max_train, n_eval, seed);
}

/// Pool actuals and forecasts over all eval windows into one report.
template <typename ForecastFn>
inline metrics::MetricsReport evaluate_windows(const std::vector<Window>& eval_windows,
                                               ForecastFn&& fn) {
    std::vector<double> actual, pred;
    for (const auto& w : eval_windows) {
        const auto f = fn(w);
        actual.insert(actual.end(), w.target.begin(), w.target.end());
        pred.insert(pred.end(), f.begin(), f.end());
    }
    return metrics::evaluate(actual, pred);
}

/// Run jobs on a small worker pool; results land in caller-indexed slots so
/// aggregation stays order-independent.
inline void parallel_for(std::size_t n_jobs, std::size_t threads,
                         const std::function<void(std::size_t)>& job) {
    threads = std::max<std::size_t>(1, std::min(threads, n_jobs));
    if (threads == 1) {
        for (std::size_t i = 0; i < n_jobs; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_jobs) return;
                job(i);
            }
        });
    for (auto& th : pool) th.join();
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02d%02d-%02d%02d%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

} // namespace detail_bench

/// Load the configured dataset, or generate the surrogate when no path is
/// given, then apply the configured downsampling.
inline TimeSeries load_dataset(const ExperimentConfig& cfg) {
    TimeSeries s = cfg.dataset_path.empty()
                       ? make_surrogate(cfg.surrogate_length, cfg.seed_base,
                                        cfg.surrogate_noise, cfg.surrogate_spike_prob)
                       : csv::ingest_csv(cfg.dataset_path, cfg.dataset_column,
                                         cfg.dataset_delimiter, cfg.dt_seconds);
    if (cfg.downsample_factor > 1) {
        const auto method = cfg.downsample_method == "decimate" ? DownsampleMethod::Decimate
                                                                : DownsampleMethod::Mean;
        s = downsample(s, cfg.downsample_factor, method);
    }
    return s;
}

/// Train the configured model on one filtered pipeline and evaluate it on
/// the sampled test windows. Timing covers training plus testing.
inline RunRecord run_once(const ExperimentConfig& cfg, const TimeSeries& series,
                          const std::string& filter_name, const nlohmann::json& filter_params,
                          std::size_t horizon, std::uint64_t seed) {
    RunRecord rec;
    rec.experiment = cfg.experiment;
    rec.method = filter_name;
    rec.horizon = horizon;
    rec.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto pl = detail_bench::prepare_pipeline(series, filter_name, filter_params,
                                                 cfg.model.input_size, horizon,
                                                 cfg.test_fraction, cfg.max_train_windows,
                                                 cfg.n_eval_windows, seed);
        forecast::ModelConfig mc = cfg.model;
        mc.horizon = horizon;
        mc.seed = seed;
        auto mp = forecast::init_model(mc);
        forecast::train(mp, pl.train_windows);
        rec.report = detail_bench::evaluate_windows(
            pl.eval_windows,
            [&](const Window& w) { return forecast::predict_horizon(mp, w.input); });
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Where one experiment's artifacts land.
struct ExperimentOutput {
    std::vector<RunRecord> records;
    std::filesystem::path dir;
};

namespace detail_bench {

inline std::filesystem::path make_out_dir(const ExperimentConfig& cfg) {
    const std::string label = cfg.run_label.empty() ? utc_timestamp() : cfg.run_label;
    std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / cfg.experiment / label;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_records(const std::filesystem::path& dir,
                          const std::vector<RunRecord>& records) {
    std::ofstream out(dir / "records.jsonl");
    if (!out) throw DataError("cannot write records.jsonl in " + dir.string());
    for (const auto& r : records) out << r.to_json().dump() << "\n";
}

struct Aggregate {
    double rmse = 0, mae = 0, mape = 0, smape = 0, time = 0;
    double rmse_median = 0;
    std::size_t count = 0;
};

inline Aggregate aggregate(const std::vector<const RunRecord*>& rs) {
    Aggregate a;
    std::vector<double> rmses;
    for (const auto* r : rs) {
        if (!r->error.empty()) continue;
        a.rmse += r->report.rmse;
        a.mae += r->report.mae;
        a.mape += r->report.mape;
        a.smape += r->report.smape;
        a.time += r->wall_time_s;
        rmses.push_back(r->report.rmse);
        ++a.count;
    }
    if (a.count > 0) {
        const double inv = 1.0 / static_cast<double>(a.count);
        a.rmse *= inv; a.mae *= inv; a.mape *= inv; a.smape *= inv; a.time *= inv;
        std::sort(rmses.begin(), rmses.end());
        a.rmse_median = rmses.size() % 2 == 1
                            ? rmses[rmses.size() / 2]
                            : 0.5 * (rmses[rmses.size() / 2 - 1] + rmses[rmses.size() / 2]);
    }
    return a;
}

} // namespace detail_bench

/// Identically configured model on the raw series and on each filter's
/// output at a fixed horizon, seed-averaged, with best-per-column markers.
inline ExperimentOutput filter_comparison(const ExperimentConfig& cfg,
                                          const std::vector<std::string>& which = {}) {
    cfg.validate();
    const TimeSeries series = load_dataset(cfg);
    std::vector<std::string> names = which.empty() ? filters::filter_names() : which;

    std::vector<RunRecord> records(names.size() * cfg.n_seeds);
    detail_bench::parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
        const std::size_t fi = i / cfg.n_seeds;
        const std::size_t si = i % cfg.n_seeds;
        const nlohmann::json params = names[fi] == cfg.filter
                                          ? cfg.filter_params
                                          : nlohmann::json(nlohmann::json::object());
        records[i] = run_once(cfg, series, names[fi], params, cfg.horizon,
                              cfg.seed_base + si);
    });

    ExperimentOutput out;
    out.records = std::move(records);
    out.dir = detail_bench::make_out_dir(cfg);
    detail_bench::write_records(out.dir, out.records);

    // aggregate table with best-per-column markers
    std::vector<detail_bench::Aggregate> aggs(names.size());
    for (std::size_t fi = 0; fi < names.size(); ++fi) {
        std::vector<const RunRecord*> rs;
        for (std::size_t si = 0; si < cfg.n_seeds; ++si)
            rs.push_back(&out.records[fi * cfg.n_seeds + si]);
        aggs[fi] = detail_bench::aggregate(rs);
    }
    auto best_of = [&](auto field) {
        std::size_t best = names.size();
        for (std::size_t fi = 0; fi < names.size(); ++fi) {
            if (aggs[fi].count == 0) continue;
            if (best == names.size() || field(aggs[fi]) < field(aggs[best])) best = fi;
        }
        return best;
    };
    const std::size_t b_rmse = best_of([](const auto& a) { return a.rmse; });
    const std::size_t b_mae = best_of([](const auto& a) { return a.mae; });
    const std::size_t b_mape = best_of([](const auto& a) { return a.mape; });
    const std::size_t b_smape = best_of([](const auto& a) { return a.smape; });

    std::ofstream tab(out.dir / "table.csv");
    tab.precision(10);
    tab << "filter,rmse,mae,mape,smape,mean_time_s,runs_ok,best\n";
    for (std::size_t fi = 0; fi < names.size(); ++fi) {
        const auto& a = aggs[fi];
        std::string best;
        if (fi == b_rmse) best += "rmse ";
        if (fi == b_mae) best += "mae ";
        if (fi == b_mape) best += "mape ";
        if (fi == b_smape) best += "smape";
        tab << names[fi] << "," << a.rmse << "," << a.mae << "," << a.mape << ","
            << a.smape << "," << a.time << "," << a.count << ","
            << csv::quote_field(best) << "\n";
    }
    tab.close();

    SvgSeries sv;
    sv.label = "mean RMSE";
    sv.scatter = true;
    for (std::size_t fi = 0; fi < names.size(); ++fi) {
        sv.xs.push_back(static_cast<double>(fi));
        sv.ys.push_back(aggs[fi].rmse);
    }
    write_svg((out.dir / "plot.svg").string(), "Model error per input filter", {sv}, true);
    return out;
}

/// Independent training/evaluation per horizon over the grid
/// {step, 2*step, ...} (default 5..60), seed-averaged, with a
/// metric-vs-horizon table and plot. Infeasible horizons are skipped.
inline ExperimentOutput horizon_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const TimeSeries series = load_dataset(cfg);
    std::vector<std::size_t> horizons = cfg.horizons;
    if (horizons.empty())
        for (std::size_t h = cfg.step; h <= 60; h += cfg.step) horizons.push_back(h);

    std::vector<std::size_t> feasible;
    std::vector<std::string> notices;
    for (std::size_t h : horizons) {
        if (h >= 1 && h <= series.size() / 4)
            feasible.push_back(h);
        else
            notices.push_back("horizon " + std::to_string(h) + " skipped (infeasible)");
    }

    std::vector<RunRecord> records(feasible.size() * cfg.n_seeds);
    detail_bench::parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
        const std::size_t hi = i / cfg.n_seeds;
        const std::size_t si = i % cfg.n_seeds;
        records[i] = run_once(cfg, series, cfg.filter, cfg.filter_params, feasible[hi],
                              cfg.seed_base + si);
    });

    ExperimentOutput out;
    out.records = std::move(records);
    out.dir = detail_bench::make_out_dir(cfg);
    detail_bench::write_records(out.dir, out.records);
    if (!notices.empty()) {
        std::ofstream nf(out.dir / "notices.txt");
        for (const auto& n : notices) nf << n << "\n";
    }

    std::ofstream tab(out.dir / "table.csv");
    tab.precision(10);
    tab << "horizon,rmse,rmse_median,mae,mape,smape,mean_time_s,runs_ok\n";
    SvgSeries line_mean, line_med;
    line_mean.label = "mean RMSE";
    line_med.label = "median RMSE";
    for (std::size_t hi = 0; hi < feasible.size(); ++hi) {
        std::vector<const RunRecord*> rs;
        for (std::size_t si = 0; si < cfg.n_seeds; ++si)
            rs.push_back(&out.records[hi * cfg.n_seeds + si]);
        const auto a = detail_bench::aggregate(rs);
        tab << feasible[hi] << "," << a.rmse << "," << a.rmse_median << "," << a.mae << ","
            << a.mape << "," << a.smape << "," << a.time << "," << a.count << "\n";
        line_mean.xs.push_back(static_cast<double>(feasible[hi]));
        line_mean.ys.push_back(a.rmse);
        line_med.xs.push_back(static_cast<double>(feasible[hi]));
        line_med.ys.push_back(a.rmse_median);
    }
    tab.close();
    write_svg((out.dir / "plot.svg").string(), "Error vs forecast horizon",
              {line_mean, line_med}, true);
    return out;
}

/// Summary of the statistical study: eleven statistics per metric column.
struct StudySummary {
    std::map<std::string, metrics::StatsSummary> per_metric;
    std::size_t completed = 0;
    std::size_t failed = 0;
};

/// n_runs trainings differing only by seed; summarize() over each metric
/// column. Raw per-run records are persisted alongside the summary.
inline std::pair<ExperimentOutput, StudySummary>
statistical_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.n_runs < 2) throw ConfigError("statistical_study: n_runs must be >= 2");
    const TimeSeries series = load_dataset(cfg);

    std::vector<RunRecord> records(cfg.n_runs);
    detail_bench::parallel_for(cfg.n_runs, cfg.threads, [&](std::size_t i) {
        records[i] = run_once(cfg, series, cfg.filter, cfg.filter_params, cfg.horizon,
                              cfg.seed_base + i);
    });

    ExperimentOutput out;
    out.records = std::move(records);
    out.dir = detail_bench::make_out_dir(cfg);
    detail_bench::write_records(out.dir, out.records);

    StudySummary sum;
    std::map<std::string, std::vector<double>> cols;
    for (const auto& r : out.records) {
        if (!r.error.empty()) {
            ++sum.failed;
            continue;
        }
        ++sum.completed;
        cols["rmse"].push_back(r.report.rmse);
        cols["mae"].push_back(r.report.mae);
        cols["mape"].push_back(r.report.mape);
        cols["smape"].push_back(r.report.smape);
    }
    if (sum.completed >= 2)
        for (auto& [name, vals] : cols) sum.per_metric[name] = metrics::summarize(vals);

    std::ofstream tab(out.dir / "table.csv");
    tab.precision(10);
    tab << "statistic,rmse,mae,mape,smape\n";
    const std::vector<std::pair<std::string, double metrics::StatsSummary::*>> rows = {
        {"mean", &metrics::StatsSummary::mean},
        {"median", &metrics::StatsSummary::median},
        {"mode", &metrics::StatsSummary::mode},
        {"range", &metrics::StatsSummary::range},
        {"std_dev", &metrics::StatsSummary::std_dev},
        {"p25", &metrics::StatsSummary::p25},
        {"p50", &metrics::StatsSummary::p50},
        {"p75", &metrics::StatsSummary::p75},
        {"iqr", &metrics::StatsSummary::iqr},
        {"skewness", &metrics::StatsSummary::skewness},
        {"kurtosis", &metrics::StatsSummary::kurtosis},
    };
    for (const auto& [label, member] : rows) {
        tab << label;
        for (const char* m : {"rmse", "mae", "mape", "smape"}) {
            tab << ",";
            if (sum.per_metric.count(m)) tab << sum.per_metric.at(m).*member;
        }
        tab << "\n";
    }
    tab << "completed_runs," << sum.completed << ",,,\n";
    tab.close();

    SvgSeries sv;
    sv.label = "per-run RMSE";
    sv.scatter = true;
    for (std::size_t i = 0; i < out.records.size(); ++i)
        if (out.records[i].error.empty()) {
            sv.xs.push_back(static_cast<double>(i));
            sv.ys.push_back(out.records[i].report.rmse);
        }
    write_svg((out.dir / "plot.svg").string(), "Per-seed RMSE across runs", {sv}, true);
    return {std::move(out), std::move(sum)};
}

/// The attention model against the naive and autoregressive baselines at the
/// short and medium horizons, same filter/split/metrics for every method.
inline ExperimentOutput baseline_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();
    const TimeSeries series = load_dataset(cfg);
    const std::vector<std::size_t> horizons{cfg.short_horizon, cfg.horizon};
    const std::vector<std::string> methods{"model", "naive", "ar"};

    struct Job { std::size_t hi, mi, si; };
    std::vector<Job> jobs;
    for (std::size_t hi = 0; hi < horizons.size(); ++hi)
        for (std::size_t mi = 0; mi < methods.size(); ++mi)
            for (std::size_t si = 0; si < cfg.n_seeds; ++si) jobs.push_back({hi, mi, si});

    std::vector<RunRecord> records(jobs.size());
    detail_bench::parallel_for(jobs.size(), cfg.threads, [&](std::size_t ji) {
        const Job& j = jobs[ji];
        const std::size_t h = horizons[j.hi];
        const std::uint64_t seed = cfg.seed_base + j.si;
        if (methods[j.mi] == "model") {
            records[ji] = run_once(cfg, series, cfg.filter, cfg.filter_params, h, seed);
            records[ji].method = "model";
            return;
        }
        RunRecord rec;
        rec.experiment = cfg.experiment;
        rec.method = methods[j.mi];
        rec.horizon = h;
        rec.seed = seed;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto pl = detail_bench::prepare_pipeline(
                series, cfg.filter, cfg.filter_params, cfg.model.input_size, h,
                cfg.test_fraction, cfg.max_train_windows, cfg.n_eval_windows, seed);
            if (methods[j.mi] == "naive") {
                rec.report = detail_bench::evaluate_windows(pl.eval_windows, [&](const Window& w) {
                    return forecast::naive_baseline(w.input, h);
                });
            } else {
                const std::vector<double> train_part(
                    pl.filtered.begin(),
                    pl.filtered.begin() + static_cast<std::ptrdiff_t>(pl.train_len));
                const auto beta = forecast::ar_fit(train_part, cfg.ar_order);
                rec.report = detail_bench::evaluate_windows(pl.eval_windows, [&](const Window& w) {
                    std::vector<double> hist = w.input;
                    std::vector<double> f;
                    for (std::size_t step = 0; step < h; ++step) {
                        double next = beta[0];
                        for (std::size_t k = 1; k < beta.size(); ++k)
                            next += beta[k] * hist[hist.size() - k];
                        f.push_back(next);
                        hist.push_back(next);
                    }
                    return f;
                });
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        rec.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        records[ji] = std::move(rec);
    });

    ExperimentOutput out;
    out.records = std::move(records);
    out.dir = detail_bench::make_out_dir(cfg);
    detail_bench::write_records(out.dir, out.records);

    std::ofstream tab(out.dir / "table.csv");
    tab.precision(10);
    tab << "horizon,method,rmse,mae,mape,smape,mean_time_s,runs_ok,best\n";
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
        std::vector<detail_bench::Aggregate> aggs(methods.size());
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            std::vector<const RunRecord*> rs;
            for (std::size_t ji = 0; ji < jobs.size(); ++ji)
                if (jobs[ji].hi == hi && jobs[ji].mi == mi) rs.push_back(&out.records[ji]);
            aggs[mi] = detail_bench::aggregate(rs);
        }
        // best per metric; ties broken by mean wall time
        auto best_of = [&](auto field) {
            std::size_t best = methods.size();
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                if (aggs[mi].count == 0) continue;
                if (best == methods.size() || field(aggs[mi]) < field(aggs[best]) ||
                    (field(aggs[mi]) == field(aggs[best]) && aggs[mi].time < aggs[best].time))
                    best = mi;
            }
            return best;
        };
        const std::size_t b_rmse = best_of([](const auto& a) { return a.rmse; });
        const std::size_t b_mae = best_of([](const auto& a) { return a.mae; });
        const std::size_t b_mape = best_of([](const auto& a) { return a.mape; });
        const std::size_t b_smape = best_of([](const auto& a) { return a.smape; });
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const auto& a = aggs[mi];
            std::string best;
            if (mi == b_rmse) best += "rmse ";
            if (mi == b_mae) best += "mae ";
            if (mi == b_mape) best += "mape ";
            if (mi == b_smape) best += "smape";
            tab << horizons[hi] << "," << methods[mi] << "," << a.rmse << "," << a.mae
                << "," << a.mape << "," << a.smape << "," << a.time << "," << a.count << ","
                << csv::quote_field(best) << "\n";
        }
    }
    tab.close();

    std::vector<SvgSeries> series_plot;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        SvgSeries sv;
        sv.label = methods[mi];
        for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
            std::vector<const RunRecord*> rs;
            for (std::size_t ji = 0; ji < jobs.size(); ++ji)
                if (jobs[ji].hi == hi && jobs[ji].mi == mi) rs.push_back(&out.records[ji]);
            const auto a = detail_bench::aggregate(rs);
            if (a.count > 0) {
                sv.xs.push_back(static_cast<double>(horizons[hi]));
                sv.ys.push_back(a.rmse);
            }
        }
        series_plot.push_back(std::move(sv));
    }
    write_svg((out.dir / "plot.svg").string(), "Baseline comparison", series_plot, true);
    return out;
}

} // namespace lcf::bench
