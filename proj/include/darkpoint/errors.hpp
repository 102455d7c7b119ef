#pragma once

#include <stdexcept>
#include <string>

namespace darkpoint {

/// Invalid parameters, malformed values or infeasible configurations.
/// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failures (unreadable / unwritable paths). CLI exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed on-disk payloads (bad magic, version, truncation). CLI exit code 3.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace darkpoint
