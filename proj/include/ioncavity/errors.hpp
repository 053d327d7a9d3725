#pragma once

#include <stdexcept>
#include <string>

namespace ioncavity {

// Bad configuration input (unknown key, non-positive parameter, malformed file).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge within its iteration cap.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A least-squares fit could not produce a usable result.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ioncavity
