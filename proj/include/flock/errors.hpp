#pragma once

#include <stdexcept>
#include <string>

namespace flock {

/// Bad CLI invocation (unknown flag, missing argument). Exit code 1.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration (unknown key, range violation, bad schedule). Exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric breakdown at run time (non-finite state or weights). Exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// I/O failure writing the output bundle. Exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flock
