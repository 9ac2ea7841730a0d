#include "sibling/asymptotics.hpp"

#include <cmath>

#include "sibling/errors.hpp"

namespace sibling::asymptotics {

namespace {
double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}
}  // namespace

SmoothFamily SmoothFamily::from_spec(const families::FamilySpec& spec) {
    using families::FamilyKind;
    if (spec.kind == FamilyKind::ZipfDecay)
        return SmoothFamily{FamilyKind::ZipfDecay, spec.p, 0.0};
    if (spec.kind == FamilyKind::StretchedExpDecay)
        return SmoothFamily{FamilyKind::StretchedExpDecay, spec.p, spec.q};
    throw ConfigError("asymptotics: only zipf and stretched_exp families are admitted");
}

double SmoothFamily::log_A(double N) const {
    using families::FamilyKind;
    if (kind == FamilyKind::ZipfDecay) return std::log(N) - std::log(p);
    return (1.0 - q) * std::log(N) - std::log(p * q);
}

double delta(const SmoothFamily& fam, double N) {
    if (!(N >= 1)) throw ConfigError("delta: N must be >= 1");
    const double la = fam.log_A(N);
    if (!(la > 0))
        throw DomainTooSmall("delta: f(N)/f'(N) <= 1; N too small for the expansion");
    return 1.0 / la;
}

ExpansionTerms theorem_expansion(const SmoothFamily& fam, double N, int j) {
    if (j < 2) throw ConfigError("theorem_expansion: j must be >= 2");
    const double d = delta(fam, N);
    if (!(d < 0.5))
        throw DomainTooSmall("theorem_expansion: delta >= 1/2; expansion not meaningful");
    ExpansionTerms out;
    out.delta = d;
    out.j = j;
    const double lead = 1.0 / (factorial(j - 1) * std::pow(d, j - 1));
    out.term0 = lead;
    out.term1 = lead * (j - 1) * d * std::log(d);
    if (j == 2)
        out.term2 = lead * (kEulerGamma - 1.0) * d;
    else
        out.term2 = lead * ((j - 1) * kEulerGamma - 2.0) * d;
    out.value = out.term0 + out.term1 + out.term2;
    return out;
}

double leading_term(const SmoothFamily& fam, double N, int j) {
    if (j < 2) throw ConfigError("leading_term: j must be >= 2");
    const double la = fam.log_A(N);
    if (!(la > 0)) throw DomainTooSmall("leading_term: f(N)/f'(N) <= 1");
    return std::pow(la, j - 1) / factorial(j - 1);
}

double equal_leading(double N, int j) {
    if (!(N >= 2)) throw ConfigError("equal_leading: N must be >= 2");
    if (j < 2) throw ConfigError("equal_leading: j must be >= 2");
    return std::pow(std::log(N), j - 1) / factorial(j - 1);
}

ExpansionTerms zipf_log_form(double p, double N, int j) {
    if (!(p > 0)) throw ConfigError("zipf_log_form: p must be positive");
    if (j < 2) throw ConfigError("zipf_log_form: j must be >= 2");
    const double lnN = std::log(N);
    if (!(lnN > 1.0)) throw DomainTooSmall("zipf_log_form: N too small");
    const double lnlnN = std::log(lnN);
    ExpansionTerms out;
    out.delta = 1.0 / (lnN - std::log(p));
    out.j = j;
    if (j == 2) {
        out.term0 = lnN;
        out.term1 = -lnlnN;
        out.term2 = kEulerGamma - 1.0 - std::log(p);
    } else {
        out.term0 = std::pow(lnN, j - 1) / factorial(j - 1);
        out.term1 = -std::pow(lnN, j - 2) * lnlnN / factorial(j - 2);
        out.term2 = ((j - 1) * (kEulerGamma - std::log(p)) - 2.0) / factorial(j - 1) *
                    std::pow(lnN, j - 2);
    }
    out.value = out.term0 + out.term1 + out.term2;
    return out;
}

}  // namespace sibling::asymptotics
