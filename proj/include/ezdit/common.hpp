#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ezdit {

// Runtime failure inside the numeric/training stack (exit code 2 from the CLI).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed configs, invalid flags, schema violations
// (exit code 1 from the CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <typename... Args>
std::string cat(Args&&... args) {
    std::ostringstream oss;
    (oss << ... << std::forward<Args>(args));
    return oss.str();
}

} // namespace detail

template <typename... Args>
[[noreturn]] void fail(Args&&... args) {
    throw Error(detail::cat(std::forward<Args>(args)...));
}

template <typename... Args>
[[noreturn]] void fail_config(Args&&... args) {
    throw ConfigError(detail::cat(std::forward<Args>(args)...));
}

template <typename... Args>
void require(bool cond, Args&&... args) {
    if (!cond) {
        fail(std::forward<Args>(args)...);
    }
}

} // namespace ezdit
