#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/forecast/attention.hpp"
#include "lcf/forecast/model.hpp"
#include "lcf/rng.hpp"
#include "lcf/time_series.hpp"

namespace lcf::forecast {

/// Squared-error data term plus lambda * ||T||^2 over the temporal table.
struct LossSpec {
    double reg_lambda = 0.0;
};

inline double data_loss(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size())
        throw ConfigError("loss: prediction/target length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        acc += e * e;
    }
    return acc;
}

inline double loss(const std::vector<double>& pred, const std::vector<double>& target,
                   const ModelParams& mp, const LossSpec& spec) {
    double reg = 0.0;
    for (double x : mp.p.temporal.v) reg += x * x;
    return data_loss(pred, target) + spec.reg_lambda * reg;
}

struct TrainResult {
    /// Mean training loss per epoch (normalized units when normalize is on).
    std::vector<double> loss_curve;
};

namespace detail_train {

struct AdamState {
    Gradients m, v;
    std::size_t step = 0;
};

inline void adam_step(ParamSet& p, const Gradients& g, AdamState& st, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++st.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.step));
    auto it_m = &st.m;
    auto it_v = &st.v;
    // walk the three sets in lockstep; layouts are identical by construction
    std::vector<Mat*> pm, gm, mm, vm;
    p.for_each([&](const char*, Mat& t) { pm.push_back(&t); });
    const_cast<Gradients&>(g).for_each([&](const char*, Mat& t) { gm.push_back(&t); });
    it_m->for_each([&](const char*, Mat& t) { mm.push_back(&t); });
    it_v->for_each([&](const char*, Mat& t) { vm.push_back(&t); });
    for (std::size_t k = 0; k < pm.size(); ++k) {
        for (std::size_t i = 0; i < pm[k]->v.size(); ++i) {
            const double gr = gm[k]->v[i];
            double& m1 = mm[k]->v[i];
            double& v2 = vm[k]->v[i];
            m1 = beta1 * m1 + (1.0 - beta1) * gr;
            v2 = beta2 * v2 + (1.0 - beta2) * gr * gr;
            const double mhat = m1 / bc1;
            const double vhat = v2 / bc2;
            pm[k]->v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

} // namespace detail_train

/// Gradients of the full loss (data term + temporal regularizer) for one
/// window, via the hand-written reverse pass.
inline Gradients loss_gradients(const ModelParams& mp, const ForwardTrace& trace,
                                const std::vector<double>& target, double reg_lambda) {
    std::vector<double> grad_pred(trace.prediction.size());
    for (std::size_t i = 0; i < grad_pred.size(); ++i)
        grad_pred[i] = 2.0 * (trace.prediction[i] - target[i]);
    Gradients g = backward(trace, mp, grad_pred);
    if (reg_lambda > 0.0)
        for (std::size_t i = 0; i < g.temporal.v.size(); ++i)
            g.temporal.v[i] += 2.0 * reg_lambda * mp.p.temporal.v[i];
    return g;
}

/// Mini-batch training with Adam moment accumulation (0.9 / 0.999).
///
/// If cfg.normalize is set, the min-max range of the training windows is
/// fitted first and stored on the params; training then runs in [0,1] units
/// and predict_horizon() denormalizes. Fully deterministic under cfg.seed.
/// Throws RuntimeFailure naming the epoch if the loss stops being finite.
inline TrainResult train(ModelParams& mp, const std::vector<Window>& windows) {
    const ModelConfig& cfg = mp.cfg;
    cfg.validate();
    if (windows.empty()) throw ConfigError("train: need at least one window");
    for (const auto& w : windows)
        if (w.input.size() != cfg.input_size || w.target.size() != cfg.horizon)
            throw ConfigError("train: window shape does not match config");

    // fit normalization on the training data only
    std::vector<Window> data = windows;
    if (cfg.normalize) {
        double lo = data.front().input.front(), hi = lo;
        for (const auto& w : data) {
            for (double x : w.input) { lo = std::min(lo, x); hi = std::max(hi, x); }
            for (double x : w.target) { lo = std::min(lo, x); hi = std::max(hi, x); }
        }
        mp.norm_lo = lo;
        mp.norm_hi = hi;
        for (auto& w : data) {
            for (double& x : w.input) x = mp.normalize_value(x);
            for (double& x : w.target) x = mp.normalize_value(x);
        }
    }
    if (cfg.anchor_last)
        for (auto& w : data)
            for (double& x : w.target) x -= w.input.back();

    detail_train::AdamState adam;
    adam.m = zeros_like(mp.p);
    adam.v = zeros_like(mp.p);

    TrainResult result;
    result.loss_curve.reserve(cfg.epochs);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    double reg = 0.0; // running ||T||^2, recomputed per batch below

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto shuffle_rng = make_rng(derive_seed(cfg.seed, 0x53480000ULL + epoch));
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        auto drop_rng = make_rng(derive_seed(cfg.seed, 0xD0000000ULL + epoch));

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_b = 1.0 / static_cast<double>(end - start);

            Gradients batch_g = zeros_like(mp.p);
            std::vector<Mat*> acc_list;
            batch_g.for_each([&](const char*, Mat& m) { acc_list.push_back(&m); });

            double batch_sse = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const Window& w = data[order[k]];
                const auto trace = forward(mp, w.input, true, &drop_rng);
                batch_sse += data_loss(trace.prediction, w.target);
                Gradients g = loss_gradients(mp, trace, w.target, 0.0);
                std::size_t ti = 0;
                g.for_each([&](const char*, Mat& m) {
                    Mat* acc = acc_list[ti++];
                    for (std::size_t i = 0; i < m.v.size(); ++i) acc->v[i] += inv_b * m.v[i];
                });
            }
            // temporal regularizer, once per batch
            reg = 0.0;
            for (double x : mp.p.temporal.v) reg += x * x;
            if (cfg.reg_lambda > 0.0)
                for (std::size_t i = 0; i < batch_g.temporal.v.size(); ++i)
                    batch_g.temporal.v[i] += 2.0 * cfg.reg_lambda * mp.p.temporal.v[i];

            const double batch_loss = batch_sse * inv_b + cfg.reg_lambda * reg;
            if (!std::isfinite(batch_loss))
                throw RuntimeFailure("train: loss diverged at epoch " +
                                     std::to_string(epoch));
            epoch_loss += batch_loss;
            ++n_batches;

            detail_train::adam_step(mp.p, batch_g, adam, cfg.learning_rate);
        }
        result.loss_curve.push_back(epoch_loss / static_cast<double>(n_batches));
    }
    if (!mp.p.all_finite())
        throw RuntimeFailure("train: non-finite parameters after training");
    return result;
}

/// Single inference-mode forward pass on the series tail, denormalizing if
/// normalization was fitted during training.
inline std::vector<double> predict_horizon(const ModelParams& mp,
                                           const std::vector<double>& tail) {
    if (tail.size() != mp.cfg.input_size)
        throw ConfigError("predict_horizon: tail length " + std::to_string(tail.size()) +
                          " != input_size " + std::to_string(mp.cfg.input_size));
    std::vector<double> in = tail;
    if (mp.cfg.normalize)
        for (double& x : in) x = mp.normalize_value(x);
    auto trace = forward(mp, in, false, nullptr);
    if (mp.cfg.anchor_last)
        for (double& x : trace.prediction) x += in.back();
    if (mp.cfg.normalize)
        for (double& x : trace.prediction) x = mp.denormalize_value(x);
    return trace.prediction;
}

} // namespace lcf::forecast
