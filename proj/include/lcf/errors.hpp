#pragma once

#include <stdexcept>
#include <string>

namespace lcf {

/// Invalid configuration: bad keys, out-of-range values, infeasible shapes.
/// Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Problems with input data: missing files, unparsable cells, bad columns.
/// Maps to CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Failures during computation: divergence, non-finite activations, etc.
/// Maps to CLI exit code 4.
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lcf
