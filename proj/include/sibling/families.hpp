#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sibling::families {

enum class FamilyKind {
    Equal,              // a_k = 1
    ZipfDecay,          // a_k = 1/k^p, p > 0
    StretchedExpDecay,  // a_k = exp(-p k^q), p > 0, q in (0,1)
    Linear,             // a_k = k
    Power,              // a_k = k^p, p > 0
    GeometricGrowth,    // a_k = e^{pk}, p > 0
    LogGrowth,          // a_k = ln k, k >= 3
    LogLogGrowth,       // a_k = ln(k (ln k)^c), c > 0, k >= 3
    Factorial,          // a_k = k!
    Explicit,           // user-supplied positive list
};

// Declarative description of a coupon-weight sequence. Instances are
// immutable after construction and safe to share across threads.
struct FamilySpec {
    FamilyKind kind = FamilyKind::Equal;
    double p = 0.0;       // exponent / rate (Zipf, StretchedExp, Power, Geometric)
    double q = 0.0;       // inner exponent of StretchedExp, in (0,1)
    double c = 0.0;       // log-correction strength of LogLogGrowth
    long start_index = 1;
    std::vector<double> values;  // Explicit only

    static FamilySpec equal();
    static FamilySpec zipf(double p, long start = 1);
    static FamilySpec stretched_exp(double p, double q, long start = 1);
    static FamilySpec linear(long start = 1);
    static FamilySpec power(double p, long start = 1);
    static FamilySpec geometric(double p, long start = 1);
    static FamilySpec log_growth(long start = 3);
    static FamilySpec log_log_growth(double c, long start = 3);
    static FamilySpec factorial(long start = 1);
    static FamilySpec explicit_list(std::vector<double> values);

    static FamilySpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    bool decaying() const;  // a_k -> 0
    bool growing() const;   // a_k -> infinity
    std::string name() const;
};

// ln a_k at absolute index k (k >= spec.start_index). Defined for every
// family at every N, including ones whose linear weights overflow double.
double log_weight(const FamilySpec& spec, long k);

// [a_start, ..., a_{start+N-1}]. Rejects N that would overflow double
// (Factorial beyond 170!, Geometric beyond e^709).
std::vector<double> weights(const FamilySpec& spec, std::size_t N);
std::vector<double> log_weights(const FamilySpec& spec, std::size_t N);

// Normalized coupon probabilities p_k = a_k / A_N.
struct ProbVector {
    std::vector<double> p;
    std::size_t size() const { return p.size(); }
    // Validates: nonempty, all entries > 0, sum within 1e-12 of 1.
    static ProbVector checked(std::vector<double> p);
};

ProbVector normalize(const std::vector<double>& w);
// Stable log-sum-exp path for weights given as ln a_k.
ProbVector normalize_log(const std::vector<double>& log_w);
// Convenience: weights -> probabilities, routing through the log path when
// any |ln a_k| > 600.
ProbVector probabilities(const FamilySpec& spec, std::size_t N);

}  // namespace sibling::families
