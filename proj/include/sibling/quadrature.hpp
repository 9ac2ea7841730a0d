#pragma once
#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

#include "sibling/families.hpp"

namespace sibling::quadrature {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_panel_doublings = 16;
    int nodes_per_panel = 64;
    int threads = 0;  // 0 = auto (SIBLING_THREADS / hardware)
};

struct ExpectationResult {
    double value = 0.0;
    double error_estimate = 0.0;  // delta of the last panel refinement
    std::int64_t nodes_used = 0;
    std::chrono::duration<double> elapsed{0.0};
};

// Shared survival factor S(t) = sum_i ln(1 - e^{-p_i t}). Stable near t = 0
// (never -inf for t > 0 in double range).
double log_survival_sum(const families::ProbVector& p, double t);

// Expected unfilled slots in album j when the main collector finishes:
// sum_k int_0^inf p_k e^{-p_k t} (p_k t)^{j-1}/(j-1)! prod_{i != k}(1 - e^{-p_i t}) dt.
// Evaluated at O(N) per quadrature node via the shared survival log-sum.
// Throws NonConvergence (carrying the best value) if doubling exhausts budget.
ExpectationResult expected_unfilled(const families::ProbVector& p, int j,
                                    const QuadratureConfig& cfg = {});

// Same expectation through the x = e^{-t} change of variables on (0,1),
// exposed so the two parameterizations can cross-check each other.
// Requires p_min large enough that the x-space mass stays representable
// (long-double range); throws ConfigError otherwise.
ExpectationResult expected_unfilled_on_unit_interval(const families::ProbVector& p, int j,
                                                     const QuadratureConfig& cfg = {});

namespace detail {

// Gauss-Legendre rule on [-1, 1], cached per order.
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// Panel-doubling driver: integrates f over the edges produced by
// make_edges(panel_count), doubling panel_count until two successive
// refinements differ by at most max(rel|v|, abs). Per-panel values are
// combined in panel order, so results are schedule-independent.
struct PanelOutcome {
    double value = 0.0;
    double delta = 0.0;
    std::int64_t evals = 0;
    bool converged = false;
};
PanelOutcome integrate_doubling(const std::function<double(double)>& f,
                                const std::function<std::vector<double>(int)>& make_edges,
                                int initial_panels, const QuadratureConfig& cfg);

}  // namespace detail

}  // namespace sibling::quadrature
