#pragma once
#include <memory>
#include <string>

namespace sibling::exact {

// Arbitrary-precision rational, always in lowest terms with positive
// denominator. Thin value wrapper over GMP, kept out of this header.
class Rational {
public:
    Rational();                    // 0
    Rational(long n);              // n/1
    Rational(long n, long d);
    Rational(const Rational&);
    Rational(Rational&&) noexcept;
    Rational& operator=(const Rational&);
    Rational& operator=(Rational&&) noexcept;
    ~Rational();

    Rational operator+(const Rational&) const;
    Rational operator-(const Rational&) const;
    Rational operator*(const Rational&) const;
    Rational operator/(const Rational&) const;
    bool operator==(const Rational&) const;
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational&) const;
    bool operator>(const Rational& o) const { return o < *this; }

    double to_double() const;  // within 1 ulp
    std::string numerator() const;
    std::string denominator() const;
    std::string str() const;  // "num/den" ("num" when den == 1)

    struct Impl;
    explicit Rational(std::unique_ptr<Impl>);
    const Impl& impl() const { return *impl_; }

private:
    std::unique_ptr<Impl> impl_;
};

enum class Formula { Harmonic, Recursion, AlternatingSum, TwoTypes, ThreeTypes, MeanT, VarU2 };

struct ExactResult {
    Rational value;
    double as_float;
    Formula formula;
};

// H_N = sum_{m=1}^N 1/m, exact (binary splitting; fine up to N ~ 1e6).
Rational harmonic(long N);

// Second-order harmonic sum_{m=1}^N 1/m^2, exact.
Rational harmonic2(long N);

// Average unfilled slots in album j under equal coupon probabilities:
// j = 2 gives H_N; j >= 3 iterates the averaging recursion
// E_j(N) = sum_{m<=N} E_{j-1}(m)/m. Exact.
Rational hyperharmonic(long N, int j);

// Closed alternating form sum_{k=1}^N C(N,k) (-1)^{k+1} / k^{j-1}. Kept
// rational-only: the floating-point version cancels catastrophically for
// N beyond ~25, so this is a validation route, capped at N <= 200.
Rational alternating_sum(long N, int j);

// Expected draws for the main collector to complete: N * H_N.
Rational mean_T_equal(long N);

// Variance of the first sibling's unfilled count under equal probabilities:
// 4 * sum_{m<=N} H_m/m - 3 H_N - H_N^2. Exact.
Rational variance_u2_equal(long N);

// Two coupon types: 2 - p1^j - p2^j.
double two_types(double p1, int j);

// Three coupon types, second album:
// 3 + sum p_i^2 - sum_{i<l} (p_i^2 + p_l^2)/(p_i + p_l)^2.
double three_types_j2(double p1, double p2, double p3);

ExactResult harmonic_result(long N);
ExactResult hyperharmonic_result(long N, int j);
ExactResult alternating_sum_result(long N, int j);
ExactResult mean_T_result(long N);
ExactResult variance_u2_result(long N);

}  // namespace sibling::exact
