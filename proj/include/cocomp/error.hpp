#pragma once

#include <stdexcept>
#include <string>

namespace cocomp {

// Invalid parameters or malformed input (bad durations, negative rates,
// unparsable files, missing configuration fields).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// The requested offload or partition cannot meet the deadline.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine failed to converge within its budget.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cocomp
