// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lcf/bench/harness.hpp"
#include "lcf/bench/surrogate.hpp"
#include "lcf/config.hpp"
#include "lcf/filters/filter_bank.hpp"
#include "lcf/forecast/attention.hpp"
#include "lcf/forecast/train.hpp"
#include "lcf/metrics.hpp"
#include "lcf/rng.hpp"
#include "lcf/tpe/tpe.hpp"

using namespace lcf;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

void report(int criterion, const std::string& label, bool pass, const std::string& detail,
            double elapsed_s = -1.0, double budget_s = -1.0) {
    bool ok = pass;
    std::string timing;
    if (budget_s > 0.0) {
        ok = ok && elapsed_s < budget_s;
        char buf[64];
        std::snprintf(buf, sizeof buf, " [%.1fs < %.0fs]", elapsed_s, budget_s);
        timing = buf;
    }
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%s)%s\n", ok ? "PASS" : "FAIL", criterion,
                label.c_str(), detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

std::size_t hw_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 4 : std::min<unsigned>(n, 8);
}

bench::ExperimentConfig desk_scale_config() {
    bench::ExperimentConfig cfg;
    cfg.model.embed_dim = 16;
    cfg.model.num_heads = 2;
    cfg.model.input_size = 20;
    cfg.model.epochs = 60;
    cfg.model.batch_size = 16;
    cfg.model.dropout = 0.1;
    cfg.model.learning_rate = 5e-3;
    cfg.max_train_windows = 192;
    cfg.n_eval_windows = 24;
    cfg.n_seeds = 10;
    cfg.threads = hw_threads();
    cfg.out_dir = (fs::temp_directory_path() / "lcf_acceptance").string();
    return cfg;
}

// --- criterion 1 -----------------------------------------------------------

void criterion_1() {
    Timer timer;
    auto rng = make_rng(1001);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> len_dist(256, 1024);
    double worst = 0.0;
    bool pass = true;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = len_dist(rng);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i);
            v[i] = 0.5 + 0.002 * t + 0.4 * std::sin(2 * 3.14159265358979 * t / 12.0) +
                   0.2 * std::sin(2 * 3.14159265358979 * t / 24.0) + 0.15 * g(rng);
        }
        const TimeSeries s(v);
        const auto r_stl = filters::stl_decompose(s, 12);
        const auto r_mstl = filters::mstl_decompose(s, {12, 24});
        filters::EwtBank bank;
        bank.modes = 3;
        const auto r_ewt = filters::ewt_decompose(s, bank);
        const auto r_emd = filters::emd_decompose(s);
        for (const auto* r : {&r_stl, &r_mstl, &r_ewt, &r_emd})
            worst = std::max(worst, r->reconstruction_error(v));
        pass = pass && worst <= 1e-8;
    }
    char d[96];
    std::snprintf(d, sizeof d, "max relative error %.2e <= 1e-8, 20 signals", worst);
    report(1, "additive reconstruction for STL/MSTL/EWT/EMD", pass, d, timer.seconds(), 30.0);
}

// --- criterion 2 -----------------------------------------------------------

void criterion_2() {
    double worst_dc = 0.0, worst_cut = 0.0;
    for (int order = 1; order <= 6; ++order)
        for (int c = 1; c <= 10; ++c) {
            const double fc = 0.04 * static_cast<double>(c);
            const auto d = filters::butterworth_design(order, fc, 1.0);
            worst_dc = std::max(worst_dc, std::fabs(d.magnitude(0.0) - 1.0));
            worst_cut = std::max(
                worst_cut,
                std::fabs(d.magnitude(2.0 * 3.14159265358979323846 * fc) - 1.0 / std::sqrt(2.0)));
        }
    const bool pass = worst_dc < 1e-9 && worst_cut < 1e-6;
    char d[96];
    std::snprintf(d, sizeof d, "max |DC-1| %.2e, max |cut-1/sqrt2| %.2e", worst_dc, worst_cut);
    report(2, "Butterworth DC gain and half-power cutoff, orders 1-6 x 10 cutoffs", pass, d);
}

// --- criterion 3 -----------------------------------------------------------

void criterion_3() {
    auto rng = make_rng(1003);
    std::normal_distribution<double> noise(0.0, 0.05);
    const std::size_t n = 200;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = 0.3 + 0.01 * static_cast<double>(i) + noise(rng);
    const TimeSeries s(v);

    const auto lo = filters::hp_filter(s, filters::HpParams{1e-12});
    double worst_lo = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst_lo = std::max(worst_lo, std::fabs(lo.trend[i] - v[i]));

    const auto hi = filters::hp_filter(s, filters::HpParams{1e12});
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x; sy += v[i]; sxx += x * x; sxy += x * v[i];
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double inter = (sy - slope * sx) / nn;
    double worst_hi = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst_hi = std::max(worst_hi,
                            std::fabs(hi.trend[i] - (inter + slope * static_cast<double>(i))));

    const bool pass = worst_lo < 1e-6 && worst_hi < 1e-3;
    char d[96];
    std::snprintf(d, sizeof d, "lambda->0 err %.2e < 1e-6; lambda->inf vs OLS line %.2e < 1e-3",
                  worst_lo, worst_hi);
    report(3, "HP filter limits", pass, d);
}

// --- criterion 4 -----------------------------------------------------------

void criterion_4() {
    Timer timer;
    forecast::ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_heads = 2;
    cfg.input_size = 16;
    cfg.horizon = 4;
    cfg.dropout = 0.0;
    cfg.seed = 42;
    cfg.normalize = false;
    cfg.anchor_last = false;
    cfg.reg_lambda = 0.01;
    auto mp = forecast::init_model(cfg);

    auto rng = make_rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> window(cfg.input_size), target(cfg.horizon);
    for (auto& x : window) x = u(rng);
    for (auto& x : target) x = u(rng);

    const auto trace = forecast::forward(mp, window);
    const auto grads = forecast::loss_gradients(mp, trace, target, cfg.reg_lambda);
    std::vector<const forecast::Mat*> glist;
    grads.for_each([&](const char*, const forecast::Mat& m) { glist.push_back(&m); });

    const double eps = 1e-5;
    double worst = 0.0;
    std::size_t k = 0;
    mp.p.for_each([&](const char*, forecast::Mat& m) {
        const forecast::Mat* gm = glist[k++];
        for (std::size_t i = 0; i < m.v.size(); ++i) {
            const double orig = m.v[i];
            m.v[i] = orig + eps;
            const double lp = forecast::loss(forecast::forward(mp, window).prediction, target,
                                             mp, {cfg.reg_lambda});
            m.v[i] = orig - eps;
            const double lm = forecast::loss(forecast::forward(mp, window).prediction, target,
                                             mp, {cfg.reg_lambda});
            m.v[i] = orig;
            const double fd = (lp - lm) / (2.0 * eps);
            const double an = gm->v[i];
            worst = std::max(worst,
                             std::fabs(fd - an) / std::max({1e-6, std::fabs(fd), std::fabs(an)}));
        }
    });
    char d[96];
    std::snprintf(d, sizeof d, "worst relative error %.2e <= 1e-4 over all groups", worst);
    report(4, "gradients match central finite differences", worst <= 1e-4, d, timer.seconds(),
           60.0);
}

// --- criterion 5 -----------------------------------------------------------

// plain attention forward written as its own straight-line path
std::vector<double> plain_attention_reference(const forecast::ModelParams& mp,
                                              const std::vector<double>& window) {
    const auto& cfg = mp.cfg;
    const auto& p = mp.p;
    const std::size_t seq = cfg.seq_len(), d = cfg.embed_dim, heads = cfg.num_heads;
    const std::size_t dh = d / heads, f = cfg.ff_dim();

    std::vector<std::vector<double>> h(seq, std::vector<double>(d));
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c)
            h[i][c] = p.token_w.at(c, 0) * window[i] + p.token_b.at(0, c) + p.temporal.at(i, c);

    auto apply = [&](const forecast::Mat& w, const forecast::Mat& b,
                     const std::vector<std::vector<double>>& in) {
        std::vector<std::vector<double>> out(seq, std::vector<double>(w.rows));
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t r = 0; r < w.rows; ++r) {
                double acc = b.at(0, r);
                for (std::size_t c = 0; c < w.cols; ++c) acc += w.at(r, c) * in[i][c];
                out[i][r] = acc;
            }
        return out;
    };
    const auto q = apply(p.wq, p.bq, h), k = apply(p.wk, p.bk, h), v = apply(p.wv, p.bv, h);
    std::vector<std::vector<double>> ctx(seq, std::vector<double>(d, 0.0));
    for (std::size_t hd = 0; hd < heads; ++hd) {
        const std::size_t off = hd * dh;
        for (std::size_t i = 0; i < seq; ++i) {
            std::vector<double> sc(seq);
            double mx = -1e300;
            for (std::size_t j = 0; j < seq; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < dh; ++c) acc += q[i][off + c] * k[j][off + c];
                sc[j] = acc / std::sqrt(static_cast<double>(dh));
                mx = std::max(mx, sc[j]);
            }
            double sum = 0.0;
            for (auto& x : sc) { x = std::exp(x - mx); sum += x; }
            for (std::size_t c = 0; c < dh; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < seq; ++j) acc += (sc[j] / sum) * v[j][off + c];
                ctx[i][off + c] = acc;
            }
        }
    }
    const auto attn = apply(p.wo, p.bo, ctx);
    std::vector<std::vector<double>> resid(seq, std::vector<double>(d));
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) resid[i][c] = h[i][c] + attn[i][c];
    const auto z1 = apply(p.ff_w1, p.ff_b1, resid);
    std::vector<std::vector<double>> act(seq, std::vector<double>(f));
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < f; ++c) act[i][c] = std::max(0.0, z1[i][c]);
    const auto ff = apply(p.ff_w2, p.ff_b2, act);
    std::vector<double> pool(d, 0.0);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) pool[c] += ff[i][c] / static_cast<double>(seq);
    std::vector<double> pred(cfg.horizon);
    for (std::size_t o = 0; o < cfg.horizon; ++o) {
        double acc = p.readout_b.at(0, o);
        for (std::size_t c = 0; c < d; ++c) acc += p.readout_w.at(o, c) * pool[c];
        pred[o] = acc;
    }
    return pred;
}

void criterion_5() {
    forecast::ModelConfig cfg;
    cfg.embed_dim = 8;
    cfg.num_heads = 2;
    cfg.input_size = 16;
    cfg.horizon = 4;
    cfg.dropout = 0.0;
    cfg.seed = 17;
    cfg.normalize = false;
    cfg.anchor_last = false;
    cfg.gate_enabled = false; // gate output identically one
    auto mp = forecast::init_model(cfg);
    mp.p.time_bias.fill(0.0);

    auto rng = make_rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> window(cfg.input_size);
    for (auto& x : window) x = u(rng);

    const auto got = forecast::forward(mp, window).prediction;
    const auto want = plain_attention_reference(mp, window);
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        worst = std::max(worst, std::fabs(got[i] - want[i]));
    char d[96];
    std::snprintf(d, sizeof d, "max deviation %.2e <= 1e-10", worst);
    report(5, "W_T=0 and gate=1 reduce to reference attention", worst <= 1e-10, d);
}

// --- criterion 6 -----------------------------------------------------------

void criterion_6() {
    Timer timer;
    tpe::SearchSpace space;
    space.dims = {{"x", tpe::ParamKind::Real, 0.0, 1.0}};
    const tpe::Objective quad = [](const std::vector<double>& x, std::uint64_t) {
        return (x[0] - 0.3) * (x[0] - 0.3);
    };
    int wins = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto res = tpe::optimize(quad, space, 50, s);
        auto rng = make_rng(derive_seed(s, 999));
        std::uniform_real_distribution<double> u(0, 1);
        double best_rand = 1e300;
        for (int i = 0; i < 50; ++i) {
            const double x = u(rng);
            best_rand = std::min(best_rand, (x - 0.3) * (x - 0.3));
        }
        if (res.best().y <= best_rand) ++wins;
    }
    char d[64];
    std::snprintf(d, sizeof d, "TPE <= random in %d/20 paired seeds (need 16)", wins);
    report(6, "TPE efficacy on the quadratic", wins >= 16, d, timer.seconds(), 10.0);
}

// --- criterion 7 -----------------------------------------------------------

void criterion_7() {
    const auto r = metrics::evaluate({1.0, 2.0}, {2.0, 2.0});
    bool pass = std::fabs(r.rmse - std::sqrt(0.5)) < 1e-12 && std::fabs(r.mae - 0.5) < 1e-12 &&
                std::fabs(r.mape - 50.0) < 1e-12 && std::fabs(r.smape - 100.0 / 3.0) < 1e-12;

    auto rng = make_rng(1007);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(12), f(12);
        for (auto& x : a) x = u(rng);
        for (auto& x : f) x = u(rng);
        const double c = u(rng);
        std::vector<double> ac = a, fc = f;
        for (auto& x : ac) x *= c;
        for (auto& x : fc) x *= c;
        const auto r1 = metrics::evaluate(a, f), r2 = metrics::evaluate(ac, fc);
        worst = std::max({worst, std::fabs(r2.rmse - c * r1.rmse) / (c * r1.rmse),
                          std::fabs(r2.mae - c * r1.mae) / (c * r1.mae),
                          std::fabs(r2.mape - r1.mape) / r1.mape,
                          std::fabs(r2.smape - r1.smape) / r1.smape});
    }
    pass = pass && worst < 1e-12;
    char d[96];
    std::snprintf(d, sizeof d, "hand example exact; worst scale deviation %.2e", worst);
    report(7, "metric oracle and scale equivariance", pass, d);
}

// --- criteria 8 and 9 ------------------------------------------------------

void criterion_8() {
    Timer timer;
    auto cfg = desk_scale_config();
    cfg.experiment = "acceptance_filters";
    cfg.horizon = 60;
    cfg.run_label = "criterion8";
    const auto out = bench::filter_comparison(cfg, {"original", "ewt"});
    int wins = 0;
    double mean_orig = 0.0, mean_ewt = 0.0;
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
        const auto& o = out.records[s];
        const auto& e = out.records[cfg.n_seeds + s];
        if (o.error.empty() && e.error.empty() && e.report.rmse < o.report.rmse) ++wins;
        mean_orig += o.report.rmse / static_cast<double>(cfg.n_seeds);
        mean_ewt += e.report.rmse / static_cast<double>(cfg.n_seeds);
    }
    char d[128];
    std::snprintf(d, sizeof d, "EWT wins %d/10 (need 8); mean RMSE ewt %.2e vs original %.2e",
                  wins, mean_ewt, mean_orig);
    report(8, "EWT-filtered model beats unfiltered at horizon 60", wins >= 8, d,
           timer.seconds(), 600.0);
}

void criterion_9() {
    Timer timer;
    auto cfg = desk_scale_config();
    cfg.experiment = "acceptance_horizons";
    cfg.horizons = {5, 60};
    cfg.filter = "ewt";
    cfg.run_label = "criterion9";
    const auto out = bench::horizon_sweep(cfg);
    auto median_of = [&](std::size_t h) {
        std::vector<double> v;
        for (const auto& r : out.records)
            if (r.horizon == h && r.error.empty()) v.push_back(r.report.rmse);
        std::sort(v.begin(), v.end());
        return v.empty() ? 1e300
                         : (v.size() % 2 ? v[v.size() / 2]
                                         : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
    };
    const double m5 = median_of(5), m60 = median_of(60);
    char d[96];
    std::snprintf(d, sizeof d, "median RMSE h=5 %.2e < h=60 %.2e over 10 seeds", m5, m60);
    report(9, "shorter horizon forecasts better", m5 < m60, d, timer.seconds(), 600.0);
}

// --- criterion 10 ----------------------------------------------------------

void criterion_10() {
    Timer timer;
    auto cfg = desk_scale_config();
    cfg.experiment = "acceptance_stability";
    cfg.filter = "ewt";
    cfg.horizon = 20;
    cfg.model.epochs = 40;
    cfg.n_runs = 50;
    cfg.run_label = "criterion10";
    const auto [out, summary] = bench::statistical_study(cfg);

    bool pass = summary.completed == 50;
    for (const char* m : {"rmse", "mae", "mape", "smape"})
        pass = pass && summary.per_metric.count(m) == 1;
    // all eleven statistics are populated and internally consistent
    if (pass) {
        const auto& s = summary.per_metric.at("rmse");
        pass = pass && s.p25 <= s.p50 && s.p50 <= s.p75 &&
               std::fabs(s.iqr - (s.p75 - s.p25)) < 1e-12 && s.range >= 0.0 && s.std_dev >= 0.0;
    }

    // shape statistics validated on a seeded normal sample
    auto rng = make_rng(1010);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = n01(rng);
    const auto ns = metrics::summarize(xs);
    pass = pass && std::fabs(ns.skewness) < 0.1 && std::fabs(ns.kurtosis - 3.0) < 0.2;

    char d[128];
    std::snprintf(d, sizeof d,
                  "50/%zu runs complete; normal sample skew %.3f, kurtosis %.3f",
                  summary.completed + summary.failed, ns.skewness, ns.kurtosis);
    report(10, "fifty-seed statistical study emits the eleven statistics", pass, d,
           timer.seconds(), 600.0);
}

// --- criterion 11 ----------------------------------------------------------

void criterion_11() {
    Timer timer;
    auto cfg = desk_scale_config();
    cfg.experiment = "horizon_sweep";
    cfg.horizons = {5, 20};
    cfg.n_seeds = 2;
    cfg.model.epochs = 15;
    cfg.max_train_windows = 64;
    cfg.n_eval_windows = 8;
    cfg.run_label = "criterion11_a";

    // run once, persist the effective pipeline config, reload, run again
    PipelineConfig pcfg;
    pcfg.seed = cfg.seed_base;
    pcfg.experiment = cfg.experiment;
    pcfg.horizons = cfg.horizons;
    pcfg.n_seeds = cfg.n_seeds;
    pcfg.model = cfg.model;
    pcfg.filter_name = "ewt";
    pcfg.max_train_windows = cfg.max_train_windows;
    pcfg.n_eval_windows = cfg.n_eval_windows;
    pcfg.threads = cfg.threads;
    pcfg.out_dir = cfg.out_dir;
    pcfg.run_label = "criterion11_a";

    const auto out_a = bench::horizon_sweep(to_experiment_config(pcfg));
    const fs::path cfg_path = out_a.dir / "effective_config.json";
    {
        std::ofstream f(cfg_path);
        f << config_to_json(pcfg).dump(2) << "\n";
    }
    auto reloaded = load_config(cfg_path.string());
    reloaded.run_label = "criterion11_b";
    const auto out_b = bench::horizon_sweep(to_experiment_config(reloaded));

    bool pass = out_a.records.size() == out_b.records.size();
    if (pass)
        for (std::size_t i = 0; i < out_a.records.size(); ++i) {
            auto ja = out_a.records[i].to_json();
            auto jb = out_b.records[i].to_json();
            ja.erase("wall_time_s");
            jb.erase("wall_time_s");
            pass = pass && ja.dump() == jb.dump();
        }
    char d[96];
    std::snprintf(d, sizeof d, "%zu records identical after config round-trip",
                  out_a.records.size());
    report(11, "experiments replay bit-for-bit from the persisted config", pass, d,
           timer.seconds(), 600.0);
}

} // namespace

int main() {
    std::printf("acceptance suite (threads=%zu)\n", hw_threads());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0) {
        std::printf("ACCEPTANCE: all 11 criteria passed\n");
        return 0;
    }
    std::printf("ACCEPTANCE: %d criteria FAILED\n", g_failures);
    return 1;
}
