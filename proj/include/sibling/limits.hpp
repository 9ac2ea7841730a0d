#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sibling/families.hpp"
#include "sibling/quadrature.hpp"

namespace sibling::limits {

enum class SAtRadius { Finite, Infinite, NotApplicable };

struct GrowthProfile {
    double x_alpha = 1.0;                   // radius of convergence of sum x^{a_k}
    SAtRadius s_at_x_alpha = SAtRadius::NotApplicable;
    double s_value = 0.0;                   // when Finite
    std::optional<double> counting_exponent_nu;  // analytic nu with A*(m) = O(m^nu)
};

// Radius x_alpha = exp(-limsup (ln k)/a_k), analytic per family kind:
// Linear/Power/Geometric/Factorial -> 1; LogGrowth/LogLogGrowth -> 1/e.
// Rejects decaying families and Explicit lists.
double x_alpha(const families::FamilySpec& spec);
GrowthProfile growth_profile(const families::FamilySpec& spec);

struct TailSum {
    double value = 0.0;
    double tail_bound = 0.0;   // certified bound on the omitted tail
    std::uint64_t terms = 0;   // series terms consumed
};

// S(x) = sum_k x^{a_k}, for 0 < x < x_alpha, truncated with a certified tail
// <= tol. The log family is evaluated through an Euler-Maclaurin accelerated
// path (direct summation converges too slowly near the radius).
TailSum tail_sum_S(const families::FamilySpec& spec, double x, double tol);

// F(x) = prod_k (1 - x^{a_k}) in (0,1), via exp of the truncated log-sum.
TailSum survival_product_F(const families::FamilySpec& spec, double x, double tol);

// L(x; j) = sum_k a_k^j x^{a_k} / (1 - x^{a_k}).
TailSum lambert_weight_L(const families::FamilySpec& spec, double x, int j, double tol);

struct LimitIntegralResult {
    bool divergent = false;
    double value = 0.0;
    std::uint64_t truncation_k = 0;  // largest series truncation used
    double tail_bound = 0.0;         // domain truncation + series tails
    double quad_error = 0.0;         // panel refinement delta
    std::vector<double> witness;     // divergence witness partial sums (when divergent)
};

// Limiting expectation I(alpha; j) =
//   1/(j-1)! * int_{-ln x_alpha}^inf L(e^{-t}; j) F(e^{-t}) t^{j-1} dt.
// Runs the divergence diagnostic first and reports Divergent (with witness
// partial sums) when it fires; never diverges silently.
LimitIntegralResult limit_integral_I(const families::FamilySpec& spec, int j,
                                     const quadrature::QuadratureConfig& cfg = {});

// Power-series coefficients of the Lambert series sum_m m^j A(m) x^m/(1-x^m):
// A_L(n) = sum_{d | n} d^j A(d). Exact integers; throws on uint64 overflow.
std::vector<std::uint64_t> lambert_coefficients(
    const std::map<std::uint64_t, std::uint64_t>& A, std::uint64_t n_max, int j);

struct Diagnostic {
    enum class Verdict { FiniteByCountingBound, DivergentByWitness, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    double nu_hat = 0.0;                  // fitted counting exponent (Finite verdict)
    std::vector<double> witness_partials; // cumulative witness sums (Divergent verdict)
    std::string note;
};

// Finiteness diagnostic for lim_N E[U_j^N]:
//  - fits log A*(m) against log m; a stabilizing slope nu certifies a finite
//    limit through the divisor-sum counting bound;
//  - otherwise, when x_alpha < 1 and S(x_alpha) < inf, examines the witness
//    sum_k a_k^{j-1} e^{-a_k (-ln x_alpha)} over doubling windows; sustained
//    growth is diagnosed (not proven) divergence;
//  - otherwise Inconclusive, a legitimate verdict.
Diagnostic finiteness_diagnostic(const families::FamilySpec& spec, int j,
                                 std::uint64_t horizon = 1ULL << 22);

}  // namespace sibling::limits
