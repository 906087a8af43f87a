#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "lcf/errors.hpp"
#include "lcf/forecast/model.hpp"

namespace lcf::forecast {

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json config_to_json(const ModelConfig& c) {
    return nlohmann::json{
        {"embed_dim", c.embed_dim},       {"num_heads", c.num_heads},
        {"input_size", c.input_size},     {"horizon", c.horizon},
        {"patch_len", c.patch_len},       {"dropout", c.dropout},
        {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
        {"epochs", c.epochs},             {"reg_lambda", c.reg_lambda},
        {"seed", c.seed},                 {"ff_mult", c.ff_mult},
        {"time_bias_alpha", c.time_bias_alpha}, {"gate_enabled", c.gate_enabled}, {"anchor_last", c.anchor_last},
        {"normalize", c.normalize},
    };
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.num_heads = j.at("num_heads").get<std::size_t>();
    c.input_size = j.at("input_size").get<std::size_t>();
    c.horizon = j.at("horizon").get<std::size_t>();
    c.patch_len = j.at("patch_len").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.reg_lambda = j.at("reg_lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.ff_mult = j.at("ff_mult").get<double>();
    c.time_bias_alpha = j.at("time_bias_alpha").get<double>();
    c.gate_enabled = j.at("gate_enabled").get<bool>();
    c.normalize = j.at("normalize").get<bool>();
    c.anchor_last = j.at("anchor_last").get<bool>();
    c.validate();
    return c;
}

/// Versioned JSON checkpoint: header, config, normalization, and a shape
/// table with row-major tensor values.
inline void save_checkpoint(const ModelParams& mp, const std::string& path) {
    nlohmann::json tensors = nlohmann::json::object();
    mp.p.for_each([&](const char* name, const Mat& m) {
        tensors[name] = {{"shape", {m.rows, m.cols}}, {"data", m.v}};
    });
    nlohmann::json j{
        {"format", "lcf-checkpoint"},
        {"version", kCheckpointVersion},
        {"config", config_to_json(mp.cfg)},
        {"norm", {{"lo", mp.norm_lo}, {"hi", mp.norm_hi}}},
        {"tensors", tensors},
    };
    std::ofstream out(path);
    if (!out) throw DataError("save_checkpoint: cannot write " + path);
    out << j.dump(2) << "\n";
}

inline ModelParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_checkpoint: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("load_checkpoint: bad JSON in " + path + ": " + e.what());
    }
    if (j.value("format", "") != "lcf-checkpoint")
        throw DataError("load_checkpoint: not a checkpoint file: " + path);
    if (j.value("version", -1) != kCheckpointVersion)
        throw ConfigError("load_checkpoint: checkpoint version mismatch in " + path +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");

    ModelParams mp = init_model(config_from_json(j.at("config")));
    mp.norm_lo = j.at("norm").at("lo").get<double>();
    mp.norm_hi = j.at("norm").at("hi").get<double>();
    const auto& tensors = j.at("tensors");
    mp.p.for_each([&](const char* name, Mat& m) {
        const auto& tj = tensors.at(name);
        const auto shape = tj.at("shape").get<std::vector<std::size_t>>();
        if (shape.size() != 2 || shape[0] != m.rows || shape[1] != m.cols)
            throw ConfigError(std::string("load_checkpoint: shape mismatch for tensor '") +
                              name + "'");
        m.v = tj.at("data").get<std::vector<double>>();
        if (m.v.size() != m.rows * m.cols)
            throw ConfigError(std::string("load_checkpoint: data size mismatch for '") +
                              name + "'");
    });
    return mp;
}

} // namespace lcf::forecast
