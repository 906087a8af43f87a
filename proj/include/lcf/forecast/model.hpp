#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/rng.hpp"

namespace lcf::forecast {

/// Minimal row-major matrix. Vectors are 1 x n, scalars 1 x 1; keeping every
/// learnable tensor in this one shape makes the optimizer, the checkpoint
/// format, and the finite-difference harness uniform.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    std::size_t size() const { return v.size(); }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

/// Snap the embedding width up to the nearest multiple of `heads`.
inline std::size_t snap_embed_dim(std::size_t d, std::size_t heads) {
    if (heads == 0) throw ConfigError("snap_embed_dim: heads must be >= 1");
    return heads * ((d + heads - 1) / heads);
}

struct ModelConfig {
    std::size_t embed_dim = 32;
    std::size_t num_heads = 4;
    std::size_t input_size = 20;
    std::size_t horizon = 20;
    /// Samples per token; 1 = per-timestep scalar lift.
    std::size_t patch_len = 1;
    double dropout = 0.1;
    double learning_rate = 5e-3;
    std::size_t batch_size = 16;
    std::size_t epochs = 300;
    /// lambda multiplying the squared norm of the temporal embedding table.
    double reg_lambda = 1e-4;
    std::uint64_t seed = 0;
    /// Feed-forward hidden width as a multiple of embed_dim.
    double ff_mult = 2.0;
    /// Initial time bias: -alpha * |i - j| (recency prior), trained freely.
    double time_bias_alpha = 0.01;
    bool gate_enabled = true;
    /// Min-max normalize inputs/targets to [0,1] on the training data.
    bool normalize = true;
    /// Regress targets as offsets from the window's last input value and add
    /// it back at prediction time. Windows taken at different points of a
    /// trending series then share one scale, and forecasts extrapolate to
    /// levels the training split never reached.
    bool anchor_last = true;

    std::size_t seq_len() const { return input_size / patch_len; }
    std::size_t ff_dim() const {
        return std::max<std::size_t>(1, static_cast<std::size_t>(
            std::lround(ff_mult * static_cast<double>(embed_dim))));
    }

    void validate() const {
        if (embed_dim == 0 || num_heads == 0 || input_size == 0 || horizon == 0 ||
            batch_size == 0 || epochs == 0 || patch_len == 0)
            throw ConfigError("ModelConfig: sizes must be positive");
        if (embed_dim % num_heads != 0)
            throw ConfigError("ModelConfig: embed_dim " + std::to_string(embed_dim) +
                              " not divisible by num_heads " + std::to_string(num_heads));
        if (input_size % patch_len != 0)
            throw ConfigError("ModelConfig: input_size not divisible by patch_len");
        if (!(dropout >= 0.0 && dropout < 1.0))
            throw ConfigError("ModelConfig: dropout must be in [0,1)");
        if (!(learning_rate >= 0.0))
            throw ConfigError("ModelConfig: learning_rate must be >= 0");
        if (!(reg_lambda >= 0.0))
            throw ConfigError("ModelConfig: reg_lambda must be >= 0");
    }
};

/// Every learnable tensor of the model.
struct ParamSet {
    Mat token_w;   // d x patch_len
    Mat token_b;   // 1 x d
    Mat temporal;  // seq x d, the temporal embedding table T(t)
    Mat gate_w;    // 1 x d
    Mat gate_b;    // 1 x 1
    Mat wq, wk, wv, wo;  // d x d
    Mat bq, bk, bv, bo;  // 1 x d
    Mat time_bias; // seq x seq, W_T
    Mat ff_w1;     // f x d
    Mat ff_b1;     // 1 x f
    Mat ff_w2;     // d x f
    Mat ff_b2;     // 1 x d
    Mat readout_w; // horizon x d
    Mat readout_b; // 1 x horizon

    template <typename F>
    void for_each(F&& f) {
        f("token_w", token_w);   f("token_b", token_b);
        f("temporal", temporal);
        f("gate_w", gate_w);     f("gate_b", gate_b);
        f("wq", wq); f("wk", wk); f("wv", wv); f("wo", wo);
        f("bq", bq); f("bk", bk); f("bv", bv); f("bo", bo);
        f("time_bias", time_bias);
        f("ff_w1", ff_w1); f("ff_b1", ff_b1);
        f("ff_w2", ff_w2); f("ff_b2", ff_b2);
        f("readout_w", readout_w); f("readout_b", readout_b);
    }
    template <typename F>
    void for_each(F&& f) const {
        const_cast<ParamSet*>(this)->for_each(
            [&](const char* name, Mat& m) { f(name, const_cast<const Mat&>(m)); });
    }

    bool all_finite() const {
        bool ok = true;
        for_each([&](const char*, const Mat& m) { ok = ok && m.all_finite(); });
        return ok;
    }
};

/// Trained state: configuration, tensors, and the normalization fitted on
/// the training split (identity until train() runs with normalize on).
struct ModelParams {
    ModelConfig cfg;
    ParamSet p;
    double norm_lo = 0.0;
    double norm_hi = 1.0;

    double normalize_value(double x) const {
        const double span = norm_hi - norm_lo;
        return span > 0.0 ? (x - norm_lo) / span : x;
    }
    double denormalize_value(double x) const {
        const double span = norm_hi - norm_lo;
        return span > 0.0 ? x * span + norm_lo : x;
    }
};

/// Gradients share the tensor layout of the parameters.
using Gradients = ParamSet;

namespace detail_model {

inline Mat uniform_mat(std::size_t r, std::size_t c, double scale, std::mt19937_64& rng) {
    Mat m(r, c);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (double& x : m.v) x = dist(rng);
    return m;
}

} // namespace detail_model

/// Deterministic initialization from cfg.seed: scaled-uniform weights
/// (1/sqrt(fan_in)), small-random temporal table (0.01), zero biases,
/// recency-prior time bias.
inline ModelParams init_model(const ModelConfig& cfg) {
    cfg.validate();
    const std::size_t d = cfg.embed_dim;
    const std::size_t seq = cfg.seq_len();
    const std::size_t f = cfg.ff_dim();
    auto rng = make_rng(derive_seed(cfg.seed, 0x1000));

    ModelParams mp;
    mp.cfg = cfg;
    ParamSet& p = mp.p;
    using detail_model::uniform_mat;
    const double s_tok = 1.0 / std::sqrt(static_cast<double>(cfg.patch_len));
    const double s_d = 1.0 / std::sqrt(static_cast<double>(d));
    const double s_f = 1.0 / std::sqrt(static_cast<double>(f));

    p.token_w = uniform_mat(d, cfg.patch_len, s_tok, rng);
    p.token_b = Mat(1, d);
    p.temporal = uniform_mat(seq, d, 0.01, rng);
    p.gate_w = uniform_mat(1, d, s_d, rng);
    p.gate_b = Mat(1, 1);
    p.wq = uniform_mat(d, d, s_d, rng);
    p.wk = uniform_mat(d, d, s_d, rng);
    p.wv = uniform_mat(d, d, s_d, rng);
    p.wo = uniform_mat(d, d, s_d, rng);
    p.bq = Mat(1, d); p.bk = Mat(1, d); p.bv = Mat(1, d); p.bo = Mat(1, d);
    p.time_bias = Mat(seq, seq);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t j = 0; j < seq; ++j)
            p.time_bias.at(i, j) = -cfg.time_bias_alpha *
                                   std::fabs(static_cast<double>(i) - static_cast<double>(j));
    p.ff_w1 = uniform_mat(f, d, s_d, rng);
    p.ff_b1 = Mat(1, f);
    p.ff_w2 = uniform_mat(d, f, s_f, rng);
    p.ff_b2 = Mat(1, d);
    p.readout_w = uniform_mat(cfg.horizon, d, s_d, rng);
    p.readout_b = Mat(1, cfg.horizon);
    return mp;
}

inline Gradients zeros_like(const ParamSet& p) {
    Gradients g;
    g = p;
    g.for_each([](const char*, Mat& m) { m.fill(0.0); });
    return g;
}

/// Rows T(t_i) of the temporal table for the given positions.
inline Mat temporal_embed(const ModelParams& mp, const std::vector<std::size_t>& positions) {
    const std::size_t seq = mp.cfg.seq_len();
    Mat out(positions.size(), mp.cfg.embed_dim);
    for (std::size_t r = 0; r < positions.size(); ++r) {
        if (positions[r] >= seq)
            throw ConfigError("temporal_embed: position " + std::to_string(positions[r]) +
                              " out of range [0," + std::to_string(seq) + ")");
        for (std::size_t c = 0; c < mp.cfg.embed_dim; ++c)
            out.at(r, c) = mp.p.temporal.at(positions[r], c);
    }
    return out;
}

} // namespace lcf::forecast
