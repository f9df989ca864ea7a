#pragma once

#include <stdexcept>
#include <string>

namespace bimo {

// A channel parameterization that carries no information (e.g. crossover
// probability outside (0, 1/2)), so LLRs or capacities are undefined.
struct DegenerateChannel : std::domain_error {
    explicit DegenerateChannel(const std::string& msg) : std::domain_error(msg) {}
};

// Root finding asked for a value outside the reachable range of the map.
struct TargetUnreachable : std::domain_error {
    explicit TargetUnreachable(const std::string& msg) : std::domain_error(msg) {}
};

// Randomized code construction exhausted its retry budget.
struct ConstructionFailed : std::runtime_error {
    explicit ConstructionFailed(const std::string& msg) : std::runtime_error(msg) {}
};

// A bit/LLR sequence does not match the length the code requires.
struct LengthMismatch : std::invalid_argument {
    explicit LengthMismatch(const std::string& msg) : std::invalid_argument(msg) {}
};

// Bad command line.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bimo
