#pragma once

#include <stdexcept>
#include <string>

namespace atv {

/// Thrown when the variance recursion produces sigma^2_t <= 0, which
/// signals an infeasible parameter point during optimization.
struct NonPositiveVariance : std::runtime_error {
    explicit NonPositiveVariance(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when the auxiliary-regression design matrix is numerically
/// rank deficient and the LM statistic is undefined.
struct RankDeficientRegressors : std::runtime_error {
    explicit RankDeficientRegressors(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a user-supplied starting point violates the constraint set.
struct InfeasibleStart : std::runtime_error {
    explicit InfeasibleStart(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptySeries : std::runtime_error {
    explicit EmptySeries(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonPositivePrice : std::runtime_error {
    explicit NonPositivePrice(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateQuantiles : std::runtime_error {
    explicit DegenerateQuantiles(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace atv
