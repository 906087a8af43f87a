#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcf/errors.hpp"

namespace lcf {

/// Uniformly sampled real-valued sequence.
///
/// `values` holds one sample per step; `dt` is the sample period in seconds,
/// `t0` the timestamp offset of the first sample. `unit` is a free-form label
/// ("A" for leakage current, "" after normalization).
struct TimeSeries {
    std::vector<double> values;
    double t0 = 0.0;
    double dt = 1.0;
    std::string unit;

    TimeSeries() = default;
    TimeSeries(std::vector<double> v, double t0_ = 0.0, double dt_ = 1.0,
               std::string unit_ = {})
        : values(std::move(v)), t0(t0_), dt(dt_), unit(std::move(unit_)) {
        validate();
    }

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (values.empty())
            throw DataError("TimeSeries: values must be non-empty");
        if (!(dt > 0.0))
            throw DataError("TimeSeries: dt must be > 0");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!std::isfinite(values[i]))
                throw DataError("TimeSeries: non-finite value at index " +
                                std::to_string(i));
    }
};

/// Lag-window / horizon / split proportions for supervised windowing.
struct SplitSpec {
    std::size_t input_size = 20;
    std::size_t horizon = 20;
    double test_fraction = 0.2;

    void validate(std::size_t series_len) const {
        if (input_size == 0) throw ConfigError("SplitSpec: input_size must be positive");
        if (horizon == 0) throw ConfigError("SplitSpec: horizon must be positive");
        if (!(test_fraction > 0.0 && test_fraction < 1.0))
            throw ConfigError("SplitSpec: test_fraction must be in (0,1)");
        if (input_size + horizon > series_len)
            throw ConfigError("SplitSpec: input_size + horizon exceeds series length");
    }
};

/// Leakage-current alarm level in amperes.
struct FaultThreshold {
    double limit = 0.2;

    void validate() const {
        if (!(limit > 0.0)) throw ConfigError("FaultThreshold: limit must be > 0");
    }
};

enum class DownsampleMethod { Mean, Decimate };

/// Reduce the sample rate by an integer factor.
///
/// `Mean` averages each block of `factor` samples; `Decimate` keeps the first
/// sample of each block. Trailing samples that do not fill a block are
/// dropped so dt stays uniform. dt' = dt * factor.
inline TimeSeries downsample(const TimeSeries& s, std::size_t factor,
                             DownsampleMethod method = DownsampleMethod::Mean) {
    if (factor == 0) throw ConfigError("downsample: factor must be >= 1");
    if (factor > s.size())
        throw ConfigError("downsample: factor " + std::to_string(factor) +
                          " exceeds series length " + std::to_string(s.size()));
    if (factor == 1) return s;

    const std::size_t out_len = s.size() / factor;
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) {
        if (method == DownsampleMethod::Mean) {
            double acc = 0.0;
            for (std::size_t j = 0; j < factor; ++j) acc += s.values[i * factor + j];
            out[i] = acc / static_cast<double>(factor);
        } else {
            out[i] = s.values[i * factor];
        }
    }
    return TimeSeries(std::move(out), s.t0, s.dt * static_cast<double>(factor), s.unit);
}

/// Contiguous chronological split. Test length = floor(len * test_fraction),
/// remainder goes to train; no shuffling.
inline std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries& s,
                                                          const SplitSpec& spec) {
    spec.validate(s.size());
    const std::size_t n = s.size();
    std::size_t test_len = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * spec.test_fraction));
    if (test_len < spec.horizon)
        throw ConfigError("train_test_split: test split shorter than horizon");
    const std::size_t train_len = n - test_len;
    if (train_len < spec.input_size + spec.horizon)
        throw ConfigError("train_test_split: train split too short for windowing");

    std::vector<double> train(s.values.begin(),
                              s.values.begin() + static_cast<std::ptrdiff_t>(train_len));
    std::vector<double> test(s.values.begin() + static_cast<std::ptrdiff_t>(train_len),
                             s.values.end());
    TimeSeries tr(std::move(train), s.t0, s.dt, s.unit);
    TimeSeries te(std::move(test), s.t0 + static_cast<double>(train_len) * s.dt, s.dt,
                  s.unit);
    return {std::move(tr), std::move(te)};
}

/// One supervised example: `input` feeds the model, `target` is what it
/// should emit.
struct Window {
    std::vector<double> input;
    std::vector<double> target;
};

/// All maximal overlapping (input, target) pairs at stride 1.
/// Count = len - input_size - horizon + 1.
inline std::vector<Window> make_windows(const std::vector<double>& values,
                                        std::size_t input_size, std::size_t horizon) {
    if (input_size == 0 || horizon == 0)
        throw ConfigError("make_windows: input_size and horizon must be positive");
    if (input_size + horizon > values.size())
        throw ConfigError("make_windows: series too short for input_size + horizon");
    const std::size_t count = values.size() - input_size - horizon + 1;
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Window w;
        w.input.assign(values.begin() + static_cast<std::ptrdiff_t>(i),
                       values.begin() + static_cast<std::ptrdiff_t>(i + input_size));
        w.target.assign(values.begin() + static_cast<std::ptrdiff_t>(i + input_size),
                        values.begin() + static_cast<std::ptrdiff_t>(i + input_size + horizon));
        out.push_back(std::move(w));
    }
    return out;
}

inline std::vector<Window> make_windows(const TimeSeries& s, std::size_t input_size,
                                        std::size_t horizon) {
    return make_windows(s.values, input_size, horizon);
}

/// Index of the first forecast step strictly exceeding the limit, if any.
inline std::optional<std::size_t> fault_alarm(const std::vector<double>& forecast,
                                              const FaultThreshold& thr) {
    thr.validate();
    if (forecast.empty()) throw ConfigError("fault_alarm: forecast must be non-empty");
    for (std::size_t i = 0; i < forecast.size(); ++i)
        if (forecast[i] > thr.limit) return i;
    return std::nullopt;
}

} // namespace lcf
