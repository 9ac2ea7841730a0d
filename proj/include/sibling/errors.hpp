#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace sibling {

// Invalid parameters, malformed config, or a request outside an engine's domain.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Asymptotic expansions are refused below their applicability threshold.
struct DomainTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The simulator's hard draw cap was hit (pathological probability vectors).
struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Panel doubling exhausted its budget; carries the best value seen.
struct NonConvergence : std::runtime_error {
    double best_value;
    double error_estimate;
    NonConvergence(const std::string& msg, double v, double e)
        : std::runtime_error(msg), best_value(v), error_estimate(e) {}
};

// A certified series tail could not be brought under tolerance within budget.
struct TailBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sibling
