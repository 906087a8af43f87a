#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lcf/errors.hpp"
#include "lcf/rng.hpp"

namespace lcf::tpe {

enum class ParamKind { Integer, Real, LogReal };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::Real;
    double lo = 0.0;
    double hi = 1.0;

    void validate() const {
        if (!(lo < hi)) throw ConfigError("ParamSpec '" + name + "': lo must be < hi");
        if (kind == ParamKind::LogReal && !(lo > 0.0))
            throw ConfigError("ParamSpec '" + name + "': log-real bounds must be positive");
        if (kind == ParamKind::Integer &&
            (std::floor(lo) != lo || std::floor(hi) != hi))
            throw ConfigError("ParamSpec '" + name + "': integer bounds must be integral");
    }

    /// Map to the domain the KDE works in (log for log-real).
    double transform(double x) const { return kind == ParamKind::LogReal ? std::log(x) : x; }
    double untransform(double u) const { return kind == ParamKind::LogReal ? std::exp(u) : u; }

    double clamp_round(double x) const {
        x = std::clamp(x, lo, hi);
        if (kind == ParamKind::Integer) x = std::clamp(std::round(x), lo, hi);
        return x;
    }
};

struct SearchSpace {
    std::vector<ParamSpec> dims;

    void validate() const {
        if (dims.empty()) throw ConfigError("SearchSpace: empty space");
        for (const auto& d : dims) d.validate();
    }
    std::size_t size() const { return dims.size(); }
};

enum class TrialStatus { Complete, Failed };

struct Trial {
    std::vector<double> x; // aligned with SearchSpace::dims
    double y = 0.0;
    std::uint64_t seed = 0;
    TrialStatus status = TrialStatus::Complete;
    double wall_time_s = 0.0;
};

/// Weighted Gaussian kernel density, weights normalized to sum one.
/// At a single point x0 queried at x0 this is 1/(bw*sqrt(2*pi)).
inline double kde_eval(const std::vector<double>& points, const std::vector<double>& weights,
                       double bandwidth, double x) {
    if (points.empty()) throw ConfigError("kde_eval: need at least one point");
    if (!(bandwidth > 0.0)) throw ConfigError("kde_eval: bandwidth must be > 0");
    if (weights.size() != points.size())
        throw ConfigError("kde_eval: points/weights size mismatch");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    const double inv_norm = 1.0 / (bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = (x - points[i]) / bandwidth;
        acc += (weights[i] / wsum) * std::exp(-0.5 * u * u) * inv_norm;
    }
    return acc;
}

namespace detail_tpe {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace detail_tpe

/// Same kernel sum with each component renormalized by its mass inside
/// [lo, hi] (truncation correction for bounded domains).
inline double kde_eval_truncated(const std::vector<double>& points,
                                 const std::vector<double>& weights, double bandwidth,
                                 double lo, double hi, double x) {
    if (points.empty()) throw ConfigError("kde_eval_truncated: need at least one point");
    if (!(bandwidth > 0.0)) throw ConfigError("kde_eval_truncated: bandwidth must be > 0");
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    const double inv_norm = 1.0 / (bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = (x - points[i]) / bandwidth;
        const double mass = detail_tpe::normal_cdf((hi - points[i]) / bandwidth) -
                            detail_tpe::normal_cdf((lo - points[i]) / bandwidth);
        const double m = std::max(mass, 1e-12);
        acc += (weights[i] / wsum) * std::exp(-0.5 * u * u) * inv_norm / m;
    }
    return acc;
}

/// Trial history plus the split/surrogate settings of the optimizer.
struct TpeState {
    SearchSpace space;
    std::vector<Trial> history;
    /// Quantile of observed objective values separating good from bad.
    double gamma_fraction = 0.25;
    /// Uniform random trials before the surrogate takes over.
    std::size_t n_startup = 10;
    /// Candidates drawn from l(x) per suggestion.
    std::size_t n_candidates = 24;
    /// Weight of the wide prior kernel mixed into both densities; keeps the
    /// sampler exploring instead of collapsing onto the first good cluster.
    double prior_weight = 1.0;
    /// Per-dimension kernel bandwidths, recomputed on observe().
    std::vector<double> bw_good, bw_bad;

    std::vector<std::size_t> complete_indices() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < history.size(); ++i)
            if (history[i].status == TrialStatus::Complete) idx.push_back(i);
        return idx;
    }
};

/// Partition the complete trials into the gamma-quantile best ("good") and
/// the rest ("bad"). |good| = floor(gamma * n) clamped to [1, n-1]; ties are
/// broken by trial order, so with all-equal objectives the earliest trial is
/// the good one. The two sets are disjoint and exhaustive.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
gamma_split(const TpeState& state) {
    auto idx = state.complete_indices();
    const std::size_t n = idx.size();
    if (n < 2) throw ConfigError("gamma_split: need at least 2 complete trials");
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return state.history[a].y < state.history[b].y;
    });
    std::size_t n_good = static_cast<std::size_t>(
        std::floor(state.gamma_fraction * static_cast<double>(n)));
    n_good = std::clamp<std::size_t>(n_good, 1, n - 1);
    std::vector<std::size_t> good(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_good));
    std::vector<std::size_t> bad(idx.begin() + static_cast<std::ptrdiff_t>(n_good), idx.end());
    return {std::move(good), std::move(bad)};
}

namespace detail_tpe {

/// Scott-style bandwidth over the given sample (in the transformed domain).
/// Clipped from below by range/min(100, m+1): a cluster of near-identical
/// good trials would otherwise collapse the density into a spike and the
/// ratio argmax would stop exploring around it.
inline double scott_bandwidth(const std::vector<double>& xs, double range) {
    const double m = static_cast<double>(xs.size());
    const double clip_lo = range / std::min(100.0, m + 1.0);
    if (xs.size() < 2) return std::max(0.25 * range, clip_lo);
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (m - 1.0);
    const double sigma = std::sqrt(var);
    const double bw = sigma > 0.0 ? sigma * std::pow(m, -0.2) : 0.0;
    return std::min(std::max(bw, clip_lo), range);
}

inline std::vector<double> transformed_column(const TpeState& st,
                                              const std::vector<std::size_t>& rows,
                                              std::size_t dim) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(st.space.dims[dim].transform(st.history[r].x[dim]));
    return out;
}

} // namespace detail_tpe

/// Append a finished trial and refresh the per-dimension bandwidths from the
/// new gamma split.
inline void observe(TpeState& state, const Trial& trial) {
    if (trial.x.size() != state.space.size())
        throw ConfigError("observe: trial dimension mismatch");
    for (std::size_t d = 0; d < state.space.size(); ++d) {
        const auto& spec = state.space.dims[d];
        if (trial.x[d] < spec.lo || trial.x[d] > spec.hi)
            throw ConfigError("observe: x out of bounds for '" + spec.name + "'");
    }
    if (trial.status == TrialStatus::Complete && !std::isfinite(trial.y))
        throw ConfigError("observe: complete trial must have finite objective");
    state.history.push_back(trial);

    if (state.complete_indices().size() >= 2) {
        const auto [good, bad] = gamma_split(state);
        state.bw_good.resize(state.space.size());
        state.bw_bad.resize(state.space.size());
        for (std::size_t d = 0; d < state.space.size(); ++d) {
            const auto& spec = state.space.dims[d];
            const double range = spec.transform(spec.hi) - spec.transform(spec.lo);
            state.bw_good[d] =
                detail_tpe::scott_bandwidth(detail_tpe::transformed_column(state, good, d), range);
            state.bw_bad[d] =
                detail_tpe::scott_bandwidth(detail_tpe::transformed_column(state, bad, d), range);
        }
    }
}

/// Propose the next configuration.
///
/// During startup the space is sampled uniformly (log dimensions in the log
/// domain). Afterwards `n_candidates` draws come from the good-trial density
/// l per dimension; each candidate is scored by sum_d log l(x_d) - log g(x_d)
/// and the maximizer of the density ratio wins. Integers are snapped at the
/// end. Always returns an in-bounds point.
inline std::vector<double> suggest(const TpeState& state, std::mt19937_64& rng) {
    state.space.validate();
    const std::size_t ndim = state.space.size();
    std::vector<double> out(ndim);

    const auto complete = state.complete_indices();
    const bool startup = complete.size() < state.n_startup || complete.size() < 2;
    if (startup) {
        for (std::size_t d = 0; d < ndim; ++d) {
            const auto& spec = state.space.dims[d];
            std::uniform_real_distribution<double> u(spec.transform(spec.lo),
                                                     spec.transform(spec.hi));
            out[d] = spec.clamp_round(spec.untransform(u(rng)));
        }
        return out;
    }

    const auto [good, bad] = gamma_split(state);
    std::vector<std::vector<double>> good_cols(ndim), bad_cols(ndim);
    for (std::size_t d = 0; d < ndim; ++d) {
        good_cols[d] = detail_tpe::transformed_column(state, good, d);
        bad_cols[d] = detail_tpe::transformed_column(state, bad, d);
    }
    const std::vector<double> w_good(good.size(), 1.0), w_bad(bad.size(), 1.0);

    // data-kernel mass vs prior mass in each mixture
    const double pg = state.prior_weight /
                      (static_cast<double>(good.size()) + state.prior_weight);
    const double pb = state.prior_weight /
                      (static_cast<double>(bad.size()) + state.prior_weight);

    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<double> best(ndim);
    std::uniform_int_distribution<std::size_t> pick(0, good.size() - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t c = 0; c < state.n_candidates; ++c) {
        std::vector<double> cand(ndim);
        double score = 0.0;
        for (std::size_t d = 0; d < ndim; ++d) {
            const auto& spec = state.space.dims[d];
            const double t_lo = spec.transform(spec.lo), t_hi = spec.transform(spec.hi);
            const double range = t_hi - t_lo;
            const double mid = 0.5 * (t_lo + t_hi);
            const double bw = state.bw_good[d];
            // draw from the l mixture: a good-trial kernel or the wide prior
            double u = 0.0;
            bool ok = false;
            for (int tries = 0; tries < 64 && !ok; ++tries) {
                if (unit(rng) < pg)
                    u = mid + range * gauss(rng);
                else
                    u = good_cols[d][pick(rng)] + bw * gauss(rng);
                ok = (u >= t_lo && u <= t_hi);
            }
            if (!ok) u = std::clamp(u, t_lo, t_hi);

            const std::vector<double> prior_pt{mid}, prior_w{1.0};
            const double prior = kde_eval_truncated(prior_pt, prior_w, range, t_lo, t_hi, u);
            const double l = (1.0 - pg) * kde_eval_truncated(good_cols[d], w_good, bw,
                                                             t_lo, t_hi, u) +
                             pg * prior;
            const double g = (1.0 - pb) * kde_eval_truncated(bad_cols[d], w_bad,
                                                             state.bw_bad[d], t_lo, t_hi, u) +
                             pb * prior;
            score += std::log(std::max(l, 1e-300)) - std::log(std::max(g, 1e-300));
            cand[d] = spec.clamp_round(spec.untransform(u));
        }
        if (score > best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

/// Objective: maps a configuration (aligned with the space) and a
/// per-trial seed to a value to minimize. Throwing marks the trial failed.
using Objective =
    std::function<double(const std::vector<double>& x, std::uint64_t seed)>;

struct StudyResult {
    TpeState state;
    std::size_t best_index = 0;

    const Trial& best() const { return state.history[best_index]; }
};

/// suggest -> evaluate -> observe loop, deterministic under `seed` for a
/// deterministic objective. Objective failures are recorded as failed trials
/// and the loop continues.
inline StudyResult optimize(const Objective& objective, const SearchSpace& space,
                            std::size_t n_trials, std::uint64_t seed,
                            const TpeState& proto = {}) {
    if (n_trials < 1) throw ConfigError("optimize: n_trials must be >= 1");
    space.validate();
    StudyResult res;
    res.state = proto;
    res.state.space = space;
    res.state.history.clear();
    auto rng = make_rng(derive_seed(seed, 0x7BE));

    double best_y = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_trials; ++i) {
        Trial t;
        t.x = suggest(res.state, rng);
        t.seed = derive_seed(seed, 0x7BE00 + i);
        try {
            t.y = objective(t.x, t.seed);
            t.status = std::isfinite(t.y) ? TrialStatus::Complete : TrialStatus::Failed;
        } catch (const std::exception&) {
            t.status = TrialStatus::Failed;
            t.y = std::numeric_limits<double>::quiet_NaN();
        }
        if (t.status == TrialStatus::Failed) {
            // keep it in the history without disturbing the split
            res.state.history.push_back(t);
        } else {
            observe(res.state, t);
            if (t.y < best_y) {
                best_y = t.y;
                res.best_index = res.state.history.size() - 1;
            }
        }
    }
    if (!std::isfinite(best_y))
        throw RuntimeFailure("optimize: every trial failed");
    return res;
}

} // namespace lcf::tpe
