#pragma once
#include "sibling/families.hpp"

namespace sibling::asymptotics {

// Euler-Mascheroni constant (20 significant digits).
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Decaying family with closed-form f and f' for a_k = 1/f(k). Only kinds
// whose f meets the expansion's regularity conditions are admitted:
// ZipfDecay (f = x^p) and StretchedExpDecay (f = exp(p x^q)).
struct SmoothFamily {
    families::FamilyKind kind;
    double p = 0.0;
    double q = 0.0;

    static SmoothFamily from_spec(const families::FamilySpec& spec);
    // ln(f(N)/f'(N)): Zipf -> ln(N/p); StretchedExp -> (1-q) ln N - ln(pq)
    double log_A(double N) const;
};

struct ExpansionTerms {
    double delta = 0.0;
    int j = 2;
    double term0 = 0.0, term1 = 0.0, term2 = 0.0;
    double value = 0.0;  // term0 + term1 + term2
};

// Small parameter delta = 1/ln(f(N)/f'(N)). Throws DomainTooSmall when
// f(N)/f'(N) <= 1.
double delta(const SmoothFamily& fam, double N);

// Three-term expansion of the expected unfilled count:
//   j  = 2: (1/d)[1 + d ln d + (gamma - 1) d]
//   j >= 3: (1/((j-1)! d^{j-1}))[1 + (j-1) d ln d + ((j-1) gamma - 2) d]
// Refused (DomainTooSmall) unless delta < 1/2. Remainder is O(d^2 ln^2 d)
// relative to the leading factor.
ExpansionTerms theorem_expansion(const SmoothFamily& fam, double N, int j);

// Leading term ln(f(N)/f'(N))^{j-1} / (j-1)!.
double leading_term(const SmoothFamily& fam, double N, int j);

// Equal-probability leading term (ln N)^{j-1} / (j-1)!.
double equal_leading(double N, int j);

// Zipf expansion written in the delta-free ln N form:
//   j  = 2: ln N - ln ln N + (gamma - 1 - ln p)
//   j >= 3: (ln N)^{j-1}/(j-1)! - (ln N)^{j-2} ln ln N/(j-2)!
//           + [(j-1)(gamma - ln p) - 2]/(j-1)! (ln N)^{j-2}
// The first two terms carry no p dependence.
ExpansionTerms zipf_log_form(double p, double N, int j);

}  // namespace sibling::asymptotics
