#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/forecast/model.hpp"

namespace lcf::forecast {

/// Per-layer activations retained for backpropagation and inspection.
/// `attn_probs` rows are the normalized attention weights (pre-dropout);
/// each row is non-negative and sums to one.
struct ForwardTrace {
    Mat tokens;        // seq x patch_len, raw (normalized) input patches
    Mat embedded;      // seq x d, token embedding + temporal embedding (h)
    std::vector<double> gate; // seq, G(t_i)
    Mat gated;         // seq x d, h' = G(t_i) * h_i
    Mat q, k, v;       // seq x d
    std::vector<Mat> attn_scores;  // per head, seq x seq (logits incl. time bias)
    std::vector<Mat> attn_probs;   // per head, softmax rows
    std::vector<Mat> attn_dropped; // per head, probs * dropout mask
    Mat attn_ctx;      // seq x d, concatenated head contexts
    Mat attn_out;      // seq x d, after output projection
    Mat resid;         // seq x d, gated + attn_out
    Mat ff_pre;        // seq x f, first linear output
    Mat ff_act;        // seq x f, relu(ff_pre) * dropout mask
    std::vector<double> ff_mask;   // seq*f dropout multipliers (empty if off)
    std::vector<std::vector<double>> attn_mask; // per head, seq*seq multipliers
    Mat ff_out;        // seq x d
    std::vector<double> pooled;     // d, mean over positions
    std::vector<double> prediction; // horizon
    bool training = false;
};

namespace detail_fwd {

inline void require_finite(const Mat& m, const char* layer) {
    if (!m.all_finite())
        throw RuntimeFailure(std::string("forward: non-finite activation in layer '") +
                             layer + "'");
}

} // namespace detail_fwd

/// Full forward pass.
///
/// Pipeline: token embed + temporal embed -> gate -> multi-head attention
/// with the additive time bias inside the softmax -> residual add ->
/// feed-forward -> mean-pool -> readout of `horizon` values. Dropout (on
/// attention weights and feed-forward activations) is active only when
/// `training` is set and draws from `rng`.
inline ForwardTrace forward(const ModelParams& mp, const std::vector<double>& window,
                            bool training = false, std::mt19937_64* rng = nullptr) {
    const ModelConfig& cfg = mp.cfg;
    if (window.size() != cfg.input_size)
        throw ConfigError("forward: window length " + std::to_string(window.size()) +
                          " != input_size " + std::to_string(cfg.input_size));
    const std::size_t seq = cfg.seq_len();
    const std::size_t d = cfg.embed_dim;
    const std::size_t heads = cfg.num_heads;
    const std::size_t dh = d / heads;
    const std::size_t f = cfg.ff_dim();
    const std::size_t q_len = cfg.patch_len;
    const ParamSet& p = mp.p;
    const bool drop_on = training && cfg.dropout > 0.0;
    if (drop_on && rng == nullptr)
        throw ConfigError("forward: training-mode dropout needs an rng");

    ForwardTrace t;
    t.training = training;

    // tokens: contiguous patches of the window
    t.tokens = Mat(seq, q_len);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t j = 0; j < q_len; ++j)
            t.tokens.at(i, j) = window[i * q_len + j];

    // h_i = E(x_i) + T(t_i)
    t.embedded = Mat(seq, d);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            double acc = p.token_b.at(0, c) + p.temporal.at(i, c);
            for (std::size_t j = 0; j < q_len; ++j)
                acc += p.token_w.at(c, j) * t.tokens.at(i, j);
            t.embedded.at(i, c) = acc;
        }

    // h'_i = G(t_i) * h_i with G = sigmoid(gate_w . T(t_i) + gate_b)
    t.gate.assign(seq, 1.0);
    t.gated = t.embedded;
    if (cfg.gate_enabled) {
        for (std::size_t i = 0; i < seq; ++i) {
            double a = p.gate_b.at(0, 0);
            for (std::size_t c = 0; c < d; ++c)
                a += p.gate_w.at(0, c) * p.temporal.at(i, c);
            const double g = 1.0 / (1.0 + std::exp(-a));
            t.gate[i] = g;
            for (std::size_t c = 0; c < d; ++c) t.gated.at(i, c) = g * t.embedded.at(i, c);
        }
    }

    // projections
    auto project = [&](const Mat& w, const Mat& b) {
        Mat out(seq, d);
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                double acc = b.at(0, c);
                for (std::size_t e = 0; e < d; ++e) acc += w.at(c, e) * t.gated.at(i, e);
                out.at(i, c) = acc;
            }
        return out;
    };
    t.q = project(p.wq, p.bq);
    t.k = project(p.wk, p.bk);
    t.v = project(p.wv, p.bv);

    // per-head time-aware attention: softmax(Q K^T / sqrt(dh) + W_T) V
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    t.attn_scores.assign(heads, Mat(seq, seq));
    t.attn_probs.assign(heads, Mat(seq, seq));
    t.attn_dropped.assign(heads, Mat(seq, seq));
    t.attn_mask.assign(heads, {});
    t.attn_ctx = Mat(seq, d);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double keep = 1.0 - cfg.dropout;

    for (std::size_t hd = 0; hd < heads; ++hd) {
        const std::size_t off = hd * dh;
        Mat& scores = t.attn_scores[hd];
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t j = 0; j < seq; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < dh; ++c)
                    acc += t.q.at(i, off + c) * t.k.at(j, off + c);
                scores.at(i, j) = acc * inv_sqrt + p.time_bias.at(i, j);
            }
        // row-wise softmax (max-shifted)
        Mat& probs = t.attn_probs[hd];
        for (std::size_t i = 0; i < seq; ++i) {
            double mx = scores.at(i, 0);
            for (std::size_t j = 1; j < seq; ++j) mx = std::max(mx, scores.at(i, j));
            double sum = 0.0;
            for (std::size_t j = 0; j < seq; ++j) {
                const double e = std::exp(scores.at(i, j) - mx);
                probs.at(i, j) = e;
                sum += e;
            }
            for (std::size_t j = 0; j < seq; ++j) probs.at(i, j) /= sum;
        }
        // dropout on attention weights
        Mat& dropped = t.attn_dropped[hd];
        if (drop_on) {
            auto& mask = t.attn_mask[hd];
            mask.assign(seq * seq, 1.0);
            for (std::size_t idx = 0; idx < seq * seq; ++idx)
                mask[idx] = (unit(*rng) < cfg.dropout) ? 0.0 : 1.0 / keep;
            for (std::size_t idx = 0; idx < seq * seq; ++idx)
                dropped.v[idx] = probs.v[idx] * mask[idx];
        } else {
            dropped = probs;
        }
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t c = 0; c < dh; ++c) {
                double acc = 0.0;
                for (std::size_t j = 0; j < seq; ++j)
                    acc += dropped.at(i, j) * t.v.at(j, off + c);
                t.attn_ctx.at(i, off + c) = acc;
            }
    }

    // output projection + residual
    t.attn_out = Mat(seq, d);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            double acc = p.bo.at(0, c);
            for (std::size_t e = 0; e < d; ++e) acc += p.wo.at(c, e) * t.attn_ctx.at(i, e);
            t.attn_out.at(i, c) = acc;
        }
    detail_fwd::require_finite(t.attn_out, "attention");

    t.resid = Mat(seq, d);
    for (std::size_t idx = 0; idx < seq * d; ++idx)
        t.resid.v[idx] = t.gated.v[idx] + t.attn_out.v[idx];

    // feed-forward with relu and dropout
    t.ff_pre = Mat(seq, f);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < f; ++c) {
            double acc = p.ff_b1.at(0, c);
            for (std::size_t e = 0; e < d; ++e) acc += p.ff_w1.at(c, e) * t.resid.at(i, e);
            t.ff_pre.at(i, c) = acc;
        }
    t.ff_act = Mat(seq, f);
    if (drop_on) {
        t.ff_mask.assign(seq * f, 1.0);
        for (std::size_t idx = 0; idx < seq * f; ++idx)
            t.ff_mask[idx] = (unit(*rng) < cfg.dropout) ? 0.0 : 1.0 / keep;
    }
    for (std::size_t idx = 0; idx < seq * f; ++idx) {
        double a = t.ff_pre.v[idx] > 0.0 ? t.ff_pre.v[idx] : 0.0;
        if (drop_on) a *= t.ff_mask[idx];
        t.ff_act.v[idx] = a;
    }
    t.ff_out = Mat(seq, d);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            double acc = p.ff_b2.at(0, c);
            for (std::size_t e = 0; e < f; ++e) acc += p.ff_w2.at(c, e) * t.ff_act.at(i, e);
            t.ff_out.at(i, c) = acc;
        }
    detail_fwd::require_finite(t.ff_out, "feed-forward");

    // mean-pool and readout
    t.pooled.assign(d, 0.0);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) t.pooled[c] += t.ff_out.at(i, c);
    for (std::size_t c = 0; c < d; ++c) t.pooled[c] /= static_cast<double>(seq);

    t.prediction.assign(cfg.horizon, 0.0);
    for (std::size_t o = 0; o < cfg.horizon; ++o) {
        double acc = p.readout_b.at(0, o);
        for (std::size_t c = 0; c < d; ++c) acc += p.readout_w.at(o, c) * t.pooled[c];
        t.prediction[o] = acc;
        if (!std::isfinite(acc))
            throw RuntimeFailure("forward: non-finite activation in layer 'readout'");
    }
    return t;
}

/// Exact reverse-mode gradients for every parameter, given the upstream
/// gradient of the loss with respect to the prediction. The regularizer
/// term is NOT included here; loss_gradients() adds it.
inline Gradients backward(const ForwardTrace& t, const ModelParams& mp,
                          const std::vector<double>& grad_pred) {
    const ModelConfig& cfg = mp.cfg;
    if (grad_pred.size() != cfg.horizon)
        throw ConfigError("backward: grad length != horizon");
    if (t.prediction.size() != cfg.horizon || t.embedded.rows != cfg.seq_len())
        throw ConfigError("backward: trace does not match params");
    const std::size_t seq = cfg.seq_len();
    const std::size_t d = cfg.embed_dim;
    const std::size_t heads = cfg.num_heads;
    const std::size_t dh = d / heads;
    const std::size_t f = cfg.ff_dim();
    const std::size_t q_len = cfg.patch_len;
    const ParamSet& p = mp.p;
    const bool drop_on = t.training && cfg.dropout > 0.0 && !t.ff_mask.empty();

    Gradients g = zeros_like(p);

    // readout
    std::vector<double> d_pool(d, 0.0);
    for (std::size_t o = 0; o < cfg.horizon; ++o) {
        g.readout_b.at(0, o) += grad_pred[o];
        for (std::size_t c = 0; c < d; ++c) {
            g.readout_w.at(o, c) += grad_pred[o] * t.pooled[c];
            d_pool[c] += p.readout_w.at(o, c) * grad_pred[o];
        }
    }

    // mean-pool
    Mat d_ff_out(seq, d);
    const double inv_seq = 1.0 / static_cast<double>(seq);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) d_ff_out.at(i, c) = d_pool[c] * inv_seq;

    // feed-forward second linear
    Mat d_ff_act(seq, f);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double gd = d_ff_out.at(i, c);
            g.ff_b2.at(0, c) += gd;
            for (std::size_t e = 0; e < f; ++e) {
                g.ff_w2.at(c, e) += gd * t.ff_act.at(i, e);
            }
        }
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t e = 0; e < f; ++e) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) acc += p.ff_w2.at(c, e) * d_ff_out.at(i, c);
            d_ff_act.at(i, e) = acc;
        }

    // dropout and relu
    Mat d_ff_pre(seq, f);
    for (std::size_t idx = 0; idx < seq * f; ++idx) {
        double gd = d_ff_act.v[idx];
        if (drop_on) gd *= t.ff_mask[idx];
        d_ff_pre.v[idx] = t.ff_pre.v[idx] > 0.0 ? gd : 0.0;
    }

    // feed-forward first linear
    Mat d_resid(seq, d);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < f; ++c) {
            const double gd = d_ff_pre.at(i, c);
            if (gd == 0.0) continue;
            g.ff_b1.at(0, c) += gd;
            for (std::size_t e = 0; e < d; ++e) g.ff_w1.at(c, e) += gd * t.resid.at(i, e);
        }
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t e = 0; e < d; ++e) {
            double acc = 0.0;
            for (std::size_t c = 0; c < f; ++c) acc += p.ff_w1.at(c, e) * d_ff_pre.at(i, c);
            d_resid.at(i, e) = acc;
        }

    // residual: resid = gated + attn_out
    Mat d_gated = d_resid;
    Mat d_attn_out = d_resid;

    // output projection
    Mat d_ctx(seq, d);
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double gd = d_attn_out.at(i, c);
            g.bo.at(0, c) += gd;
            for (std::size_t e = 0; e < d; ++e) g.wo.at(c, e) += gd * t.attn_ctx.at(i, e);
        }
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t e = 0; e < d; ++e) {
            double acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) acc += p.wo.at(c, e) * d_attn_out.at(i, c);
            d_ctx.at(i, e) = acc;
        }

    // attention heads
    Mat d_q(seq, d), d_k(seq, d), d_v(seq, d);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    for (std::size_t hd = 0; hd < heads; ++hd) {
        const std::size_t off = hd * dh;
        const Mat& dropped = t.attn_dropped[hd];
        const Mat& probs = t.attn_probs[hd];

        // ctx = dropped * V_head
        Mat d_dropped(seq, seq);
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t j = 0; j < seq; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < dh; ++c)
                    acc += d_ctx.at(i, off + c) * t.v.at(j, off + c);
                d_dropped.at(i, j) = acc;
            }
        for (std::size_t j = 0; j < seq; ++j)
            for (std::size_t c = 0; c < dh; ++c) {
                double acc = 0.0;
                for (std::size_t i = 0; i < seq; ++i)
                    acc += dropped.at(i, j) * d_ctx.at(i, off + c);
                d_v.at(j, off + c) += acc;
            }

        // dropout mask
        Mat d_probs = d_dropped;
        if (drop_on && !t.attn_mask[hd].empty())
            for (std::size_t idx = 0; idx < seq * seq; ++idx)
                d_probs.v[idx] *= t.attn_mask[hd][idx];

        // softmax rows: ds = p .* (dp - sum(dp .* p))
        Mat d_scores(seq, seq);
        for (std::size_t i = 0; i < seq; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < seq; ++j) dot += d_probs.at(i, j) * probs.at(i, j);
            for (std::size_t j = 0; j < seq; ++j)
                d_scores.at(i, j) = probs.at(i, j) * (d_probs.at(i, j) - dot);
        }

        // scores = Q K^T / sqrt(dh) + W_T
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t j = 0; j < seq; ++j) {
                const double gd = d_scores.at(i, j);
                g.time_bias.at(i, j) += gd;
                for (std::size_t c = 0; c < dh; ++c) {
                    d_q.at(i, off + c) += gd * t.k.at(j, off + c) * inv_sqrt;
                    d_k.at(j, off + c) += gd * t.q.at(i, off + c) * inv_sqrt;
                }
            }
    }

    // projections: X = gated * W^T + b
    auto unproject = [&](const Mat& w, const Mat& dx, Mat& gw, Mat& gb, Mat& d_in) {
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                const double gd = dx.at(i, c);
                if (gd == 0.0) continue;
                gb.at(0, c) += gd;
                for (std::size_t e = 0; e < d; ++e) gw.at(c, e) += gd * t.gated.at(i, e);
            }
        for (std::size_t i = 0; i < seq; ++i)
            for (std::size_t e = 0; e < d; ++e) {
                double acc = 0.0;
                for (std::size_t c = 0; c < d; ++c) acc += w.at(c, e) * dx.at(i, c);
                d_in.at(i, e) += acc;
            }
    };
    unproject(p.wq, d_q, g.wq, g.bq, d_gated);
    unproject(p.wk, d_k, g.wk, g.bk, d_gated);
    unproject(p.wv, d_v, g.wv, g.bv, d_gated);

    // gate: h' = g_i * h_i, g_i = sigmoid(gate_w . T_i + gate_b)
    Mat d_embedded(seq, d);
    for (std::size_t i = 0; i < seq; ++i) {
        const double gi = t.gate[i];
        double d_gi = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            d_embedded.at(i, c) = d_gated.at(i, c) * gi;
            d_gi += d_gated.at(i, c) * t.embedded.at(i, c);
        }
        if (cfg.gate_enabled) {
            const double d_a = d_gi * gi * (1.0 - gi);
            g.gate_b.at(0, 0) += d_a;
            for (std::size_t c = 0; c < d; ++c) {
                g.gate_w.at(0, c) += d_a * p.temporal.at(i, c);
                g.temporal.at(i, c) += d_a * p.gate_w.at(0, c);
            }
        }
    }

    // h_i = token_w x_i + token_b + T_i
    for (std::size_t i = 0; i < seq; ++i)
        for (std::size_t c = 0; c < d; ++c) {
            const double gd = d_embedded.at(i, c);
            g.temporal.at(i, c) += gd;
            g.token_b.at(0, c) += gd;
            for (std::size_t j = 0; j < q_len; ++j)
                g.token_w.at(c, j) += gd * t.tokens.at(i, j);
        }

    return g;
}

} // namespace lcf::forecast
