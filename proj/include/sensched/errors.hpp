#ifndef SENSCHED_ERRORS_HPP
#define SENSCHED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sensched {

// Error taxonomy mirrored by the CLI exit codes (see tools/).

/// Malformed inputs: bad dimensions, schema violations, invalid options.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// No binary schedule satisfies the budget constraint.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Singular or indefinite matrices, non-converging iterations.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Problem exceeds a hard enumeration guard.
struct size_error : std::runtime_error {
    explicit size_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sensched

#endif
