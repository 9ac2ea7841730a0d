#include "sibling/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "sibling/errors.hpp"

namespace sibling::limits {

using families::FamilyKind;
using families::FamilySpec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kTermCap = 1ULL << 26;

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

bool growing_analytic(const FamilySpec& spec) {
    return spec.growing();  // Explicit excluded by FamilySpec::growing()
}

double t0_of(const FamilySpec& spec) {
    return (spec.kind == FamilyKind::LogGrowth || spec.kind == FamilyKind::LogLogGrowth) ? 1.0
                                                                                         : 0.0;
}

double log_a(const FamilySpec& spec, std::uint64_t k) {
    return families::log_weight(spec, (long)k);
}

double a_of(const FamilySpec& spec, std::uint64_t k) {
    const double la = log_a(spec, k);
    return la > 709.0 ? kInf : std::exp(la);
}

// ln(1 - e^{-z}) for z > 0, stable at both ends.
double log1mexp(double z) {
    return z > 0.6931471805599453 ? std::log1p(-std::exp(-z)) : std::log(-std::expm1(-z));
}

// ---------------------------------------------------------------------------
// Certified geometric/integral tail bounds for sum_{k > K} e^{-t a_k}.
// K is the last absolute index already included.
// ---------------------------------------------------------------------------
double tail_S_bound(const FamilySpec& spec, double t, std::uint64_t K) {
    switch (spec.kind) {
        case FamilyKind::Linear:
            return std::exp(-t * (double)(K + 1)) / -std::expm1(-t);
        case FamilyKind::Power: {
            // k^p >= (K+1)^p (1 + p ln(k/(K+1))) turns the tail into a power law
            const double a1 = std::pow((double)(K + 1), spec.p);
            const double beta = t * spec.p * a1;
            if (beta <= 1.0) return kInf;
            return std::exp(-t * a1) * (1.0 + (double)(K + 1) / (beta - 1.0));
        }
        case FamilyKind::GeometricGrowth:
        case FamilyKind::Factorial: {
            // increments are nondecreasing: one-step ratio dominates the tail
            const double la1 = log_a(spec, K + 1);
            if (t * std::exp(std::min(la1, 709.0)) > 745.0) return 0.0;
            const double a1 = std::exp(la1);
            const double a2 = a_of(spec, K + 2);
            const double r = std::exp(-t * (a2 - a1));
            return std::exp(-t * a1) / (1.0 - r);
        }
        case FamilyKind::LogLogGrowth: {
            // terms are k^{-t} (ln k)^{-ct}, decreasing; integral comparison
            if (t <= 1.0) return kInf;
            const double lnK = std::log((double)K);
            const double ln_tail =
                -spec.c * t * std::log(lnK) + (1.0 - t) * lnK - std::log(t - 1.0);
            return std::exp(ln_tail);
        }
        default:
            return kInf;  // LogGrowth goes through the accelerated path
    }
}

struct SumResult {
    double value = 0.0;
    double tail = 0.0;
    std::uint64_t terms = 0;
    bool floored = false;  // logF early exit fired
};

SumResult S_direct(const FamilySpec& spec, double t, double abs_tol, double rel_tol) {
    SumResult r;
    std::uint64_t k = (std::uint64_t)spec.start_index;
    for (;;) {
        for (int b = 0; b < 32; ++b, ++k) {
            const double z = t * a_of(spec, k);
            if (z < 745.0) r.value += std::exp(-z);
            ++r.terms;
        }
        r.tail = tail_S_bound(spec, t, k - 1);
        if (r.tail <= abs_tol + rel_tol * r.value) return r;
        if (r.terms >= kTermCap)
            throw TailBudgetExceeded("tail_sum_S: truncation budget exhausted");
    }
}

SumResult logF_direct(const FamilySpec& spec, double t, double abs_tol, double rel_tol,
                      double floor_at) {
    SumResult r;
    std::uint64_t k = (std::uint64_t)spec.start_index;
    for (;;) {
        for (int b = 0; b < 32; ++b, ++k) {
            const double z = t * a_of(spec, k);
            if (z < 745.0) r.value += log1mexp(z);
            ++r.terms;
            if (r.value < floor_at) {
                r.floored = true;
                return r;
            }
        }
        const double ts = tail_S_bound(spec, t, k - 1);
        const double z1 = t * a_of(spec, k);
        r.tail = ts / -std::expm1(-std::min(z1, 745.0));
        if (r.tail <= abs_tol + rel_tol * std::abs(r.value)) return r;
        if (r.terms >= kTermCap)
            throw TailBudgetExceeded("survival_product_F: truncation budget exhausted");
    }
}

SumResult L_direct(const FamilySpec& spec, double t, int j, double abs_tol, double rel_tol) {
    SumResult r;
    const double t0 = t0_of(spec);
    const double eps = 0.5 * (t - t0);
    const double c0 = 0.5 * (t + t0);
    const double denom_min = -std::expm1(-t * a_of(spec, (std::uint64_t)spec.start_index));
    std::uint64_t k = (std::uint64_t)spec.start_index;
    for (;;) {
        for (int b = 0; b < 32; ++b, ++k) {
            const double la = log_a(spec, k);
            const double a = la > 709.0 ? kInf : std::exp(la);
            const double z = t * a;
            if (z < 745.0) {
                const double denom = -std::expm1(-z);
                r.value += std::exp(j * la - z) / denom;
            } else {
                const double lt = j * la - z;  // 1/(1 - x^a) ~ 1 here
                if (lt > -745.0) r.value += std::exp(lt);
            }
            ++r.terms;
        }
        // split e^{-t a} = (a^j e^{-eps a}) e^{-c0 a}; the bracket is
        // decreasing once a >= j/eps, the rest is an S-tail at rate c0
        const double la1 = log_a(spec, k);
        const double a1 = la1 > 709.0 ? kInf : std::exp(la1);
        if (a1 * eps < (double)j) continue;
        const double sup = std::exp(std::min(700.0, j * la1 - eps * a1));
        r.tail = sup * tail_S_bound(spec, c0, k - 1) / denom_min;
        if (r.tail <= abs_tol + rel_tol * r.value) return r;
        if (r.terms >= kTermCap)
            throw TailBudgetExceeded("lambert_weight_L: truncation budget exhausted");
    }
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin acceleration for the log family: direct summation of
// sum_k (ln k)^j k^{-s} converges hopelessly slowly as s -> 1+, while the
// tail integral has the exact closed form Gamma(j+1, (s-1) ln a)/(s-1)^{j+1}.
// ---------------------------------------------------------------------------
struct EmResult {
    double value = 0.0;
    double err = 0.0;
    std::uint64_t terms = 0;
};

double upper_gamma_int(int j, double y) {
    // Gamma(j+1, y) = j! e^{-y} sum_{i<=j} y^i / i!
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    double s = 0.0, term = 1.0;
    for (int i = 0; i <= j; ++i) {
        s += term;
        term *= y / (i + 1);
    }
    return fact * std::exp(-y) * s;
}

EmResult em_logpow(int j, double s, std::uint64_t kmin, double tol) {
    require(s > 1.0, "em_logpow: requires s > 1");
    for (std::uint64_t a = std::max<std::uint64_t>(kmin, 256); a <= 1ULL << 14; a *= 4) {
        EmResult r;
        for (std::uint64_t k = kmin; k < a; ++k) {
            const double lnk = std::log((double)k);
            double term = std::exp(-s * lnk);
            for (int i = 0; i < j; ++i) term *= lnk;
            r.value += term;
        }
        r.terms = a - kmin;
        const double lna = std::log((double)a);
        const double y = (s - 1.0) * lna;
        const double integral = upper_gamma_int(j, y) / std::pow(s - 1.0, j + 1);
        // derivatives of g(u) = (ln u)^j u^{-s}: coefficient recurrence in w = ln u
        std::vector<double> c((std::size_t)j + 1, 0.0);
        c[(std::size_t)j] = 1.0;
        double ga = 0.0, g1 = 0.0, g3 = 0.0, g5 = 0.0, g7 = 0.0;
        const auto eval = [&](int rdr) {
            double pw = 0.0, wp = 1.0;
            for (std::size_t qd = 0; qd < c.size(); ++qd) {
                pw += c[qd] * wp;
                wp *= lna;
            }
            return pw * std::exp(-(s + rdr) * lna);
        };
        ga = eval(0);
        for (int rd = 0; rd < 8; ++rd) {
            std::vector<double> nc(c.size(), 0.0);
            for (std::size_t qd = 0; qd + 1 < c.size(); ++qd)
                nc[qd] = (double)(qd + 1) * c[qd + 1];
            for (std::size_t qd = 0; qd < c.size(); ++qd) nc[qd] -= (s + rd) * c[qd];
            c = std::move(nc);
            if (rd == 0) g1 = eval(1);
            if (rd == 2) g3 = eval(3);
            if (rd == 4) g5 = eval(5);
            if (rd == 6) g7 = eval(7);
        }
        r.value += integral + 0.5 * ga - g1 / 12.0 + g3 / 720.0 - g5 / 30240.0;
        r.err = std::abs(g7) / 1209600.0;
        if (r.err <= tol) return r;
    }
    throw TailBudgetExceeded("em_logpow: requested tolerance unattainable");
}

// sum_{k>=kmin} 1/(k (ln k)^c) for c > 1, same scheme with real log powers.
EmResult em_recip_logpow(double cexp, std::uint64_t kmin) {
    const std::uint64_t a = std::max<std::uint64_t>(kmin, 512);
    EmResult r;
    for (std::uint64_t k = kmin; k < a; ++k) {
        const double lnk = std::log((double)k);
        r.value += std::exp(-std::log((double)k) - cexp * std::log(lnk));
    }
    r.terms = a - kmin;
    const double lna = std::log((double)a);
    const double integral = std::pow(lna, 1.0 - cexp) / (cexp - 1.0);
    // g(u) = u^{-1} (ln u)^{-c}; derivatives as {coef, power-of-ln} term lists
    struct Term {
        double coef;
        double wq;
    };
    std::vector<Term> terms{{1.0, -cexp}};
    int rd = 0;
    const auto eval = [&](int r_) {
        double s = 0.0;
        for (const Term& tm : terms) s += tm.coef * std::pow(lna, tm.wq);
        return s * std::exp(-(1.0 + r_) * lna);
    };
    const double gav = eval(0);
    double g1 = 0, g3 = 0, g5 = 0, g7 = 0;
    for (rd = 0; rd < 8; ++rd) {
        std::vector<Term> next;
        next.reserve(terms.size() * 2);
        for (const Term& tm : terms) {
            if (tm.coef * tm.wq != 0.0) next.push_back({tm.coef * tm.wq, tm.wq - 1.0});
            next.push_back({-(1.0 + rd) * tm.coef, tm.wq});
        }
        terms = std::move(next);
        if (rd == 0) g1 = eval(1);
        if (rd == 2) g3 = eval(3);
        if (rd == 4) g5 = eval(5);
        if (rd == 6) g7 = eval(7);
    }
    r.value += integral + 0.5 * gav - g1 / 12.0 + g3 / 720.0 - g5 / 30240.0;
    r.err = std::abs(g7) / 1209600.0;
    return r;
}

// m-series assembly for the log family (Lambert expansion in k^{-mt}).
SumResult S_log(const FamilySpec& spec, double t, double tol) {
    const EmResult em = em_logpow(0, t, (std::uint64_t)spec.start_index, tol * 0.5);
    return SumResult{em.value, em.err, em.terms, false};
}

SumResult L_log(const FamilySpec& spec, double t, int j, double abs_tol, double rel_tol) {
    const double rho = std::exp(-t * std::log((double)spec.start_index));
    SumResult r;
    for (int m = 1; m <= 4000; ++m) {
        const EmResult em = em_logpow(j, m * t, (std::uint64_t)spec.start_index, 1e-16 * (1 + std::abs(r.value)));
        r.value += em.value;
        r.tail += em.err;
        r.terms = std::max(r.terms, em.terms);
        const double momentum = em.value * rho / (1.0 - rho);
        if (momentum <= abs_tol + rel_tol * r.value) {
            r.tail += momentum;
            return r;
        }
    }
    throw TailBudgetExceeded("lambert_weight_L: log-family series did not settle");
}

SumResult logF_log(const FamilySpec& spec, double t, double abs_tol, double rel_tol) {
    const double rho = std::exp(-t * std::log((double)spec.start_index));
    SumResult r;
    for (int m = 1; m <= 4000; ++m) {
        const EmResult em = em_logpow(0, m * t, (std::uint64_t)spec.start_index, 1e-16);
        r.value -= em.value / m;
        r.tail += em.err / m;
        r.terms = std::max(r.terms, em.terms);
        const double momentum = em.value * rho / ((1.0 - rho) * (m + 1));
        if (momentum <= abs_tol + rel_tol * std::abs(r.value)) {
            r.tail += momentum;
            return r;
        }
    }
    throw TailBudgetExceeded("survival_product_F: log-family series did not settle");
}

// Dispatchers over the two evaluation paths.
SumResult eval_S(const FamilySpec& spec, double t, double abs_tol, double rel_tol) {
    if (spec.kind == FamilyKind::LogGrowth) return S_log(spec, t, abs_tol + rel_tol);
    return S_direct(spec, t, abs_tol, rel_tol);
}
SumResult eval_logF(const FamilySpec& spec, double t, double abs_tol, double rel_tol,
                    double floor_at) {
    if (spec.kind == FamilyKind::LogGrowth) return logF_log(spec, t, abs_tol, rel_tol);
    return logF_direct(spec, t, abs_tol, rel_tol, floor_at);
}
SumResult eval_L(const FamilySpec& spec, double t, int j, double abs_tol, double rel_tol) {
    if (spec.kind == FamilyKind::LogGrowth) return L_log(spec, t, j, abs_tol, rel_tol);
    return L_direct(spec, t, j, abs_tol, rel_tol);
}

double checked_t(const FamilySpec& spec, double x) {
    require(growing_analytic(spec), "limits: requires a growing family with analytic radius");
    require(x > 0.0, "limits: x must be positive");
    const double xa = x_alpha(spec);
    require(x < xa, "limits: x must lie strictly below x_alpha");
    return -std::log(x);
}

void atomic_max(std::atomic<double>& slot, double v) {
    double cur = slot.load(std::memory_order_relaxed);
    while (v > cur && !slot.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
    }
}

}  // namespace

double x_alpha(const FamilySpec& spec) {
    switch (spec.kind) {
        case FamilyKind::Linear:
        case FamilyKind::Power:
        case FamilyKind::GeometricGrowth:
        case FamilyKind::Factorial:
            return 1.0;
        case FamilyKind::LogGrowth:
        case FamilyKind::LogLogGrowth:
            return std::exp(-1.0);
        case FamilyKind::Explicit:
            throw ConfigError("x_alpha: no analytic radius for explicit lists");
        default:
            throw ConfigError("x_alpha: requires a growing family");
    }
}

GrowthProfile growth_profile(const FamilySpec& spec) {
    GrowthProfile g;
    g.x_alpha = x_alpha(spec);
    switch (spec.kind) {
        case FamilyKind::Linear:
            g.counting_exponent_nu = 1.0;
            g.s_at_x_alpha = SAtRadius::Infinite;
            break;
        case FamilyKind::Power:
            g.counting_exponent_nu = 1.0 / spec.p;
            g.s_at_x_alpha = SAtRadius::Infinite;
            break;
        case FamilyKind::GeometricGrowth:
        case FamilyKind::Factorial:
            g.s_at_x_alpha = SAtRadius::Infinite;  // x_alpha = 1, S(1) = inf
            break;
        case FamilyKind::LogGrowth:
            g.s_at_x_alpha = SAtRadius::Infinite;  // sum 1/k
            break;
        case FamilyKind::LogLogGrowth:
            if (spec.c > 1.0) {
                g.s_at_x_alpha = SAtRadius::Finite;
                g.s_value = em_recip_logpow(spec.c, (std::uint64_t)spec.start_index).value;
            } else {
                g.s_at_x_alpha = SAtRadius::Infinite;
            }
            break;
        default:
            break;
    }
    return g;
}

TailSum tail_sum_S(const FamilySpec& spec, double x, double tol) {
    require(tol > 0.0, "tail_sum_S: tol must be positive");
    const double t = checked_t(spec, x);
    const SumResult r = eval_S(spec, t, tol, 0.0);
    return TailSum{r.value, r.tail, r.terms};
}

TailSum survival_product_F(const FamilySpec& spec, double x, double tol) {
    require(tol > 0.0, "survival_product_F: tol must be positive");
    const double t = checked_t(spec, x);
    const SumResult r = eval_logF(spec, t, tol, 0.0, -5000.0);
    const double F = std::exp(r.value);
    return TailSum{F, F * std::abs(std::expm1(r.tail)), r.terms};
}

TailSum lambert_weight_L(const FamilySpec& spec, double x, int j, double tol) {
    require(tol > 0.0, "lambert_weight_L: tol must be positive");
    require(j >= 2, "lambert_weight_L: j must be >= 2");
    const double t = checked_t(spec, x);
    const SumResult r = eval_L(spec, t, j, tol, 0.0);
    return TailSum{r.value, r.tail, r.terms};
}

std::vector<std::uint64_t> lambert_coefficients(
    const std::map<std::uint64_t, std::uint64_t>& A, std::uint64_t n_max, int j) {
    require(j >= 0, "lambert_coefficients: j must be >= 0");
    require(n_max >= 1, "lambert_coefficients: n_max must be >= 1");
    std::vector<std::uint64_t> out(n_max, 0);
    for (const auto& [d, cnt] : A) {
        if (d < 1 || d > n_max || cnt == 0) continue;
        std::uint64_t dj = 1;
        for (int i = 0; i < j; ++i)
            if (__builtin_mul_overflow(dj, d, &dj))
                throw ConfigError("lambert_coefficients: d^j overflows 64 bits");
        std::uint64_t add;
        if (__builtin_mul_overflow(dj, cnt, &add))
            throw ConfigError("lambert_coefficients: coefficient overflows 64 bits");
        for (std::uint64_t n = d; n <= n_max; n += d)
            if (__builtin_add_overflow(out[n - 1], add, &out[n - 1]))
                throw ConfigError("lambert_coefficients: coefficient overflows 64 bits");
    }
    return out;
}

namespace {

// Smooth (un-floored) count of indices with a_k <= m, in log form.
double log_count_below(const FamilySpec& spec, double m) {
    const double start = (double)spec.start_index;
    switch (spec.kind) {
        case FamilyKind::Linear: {
            const double cnt = m - start + 1.0;
            return cnt >= 1.0 ? std::log(cnt) : -kInf;
        }
        case FamilyKind::Power: {
            const double cnt = std::pow(m, 1.0 / spec.p) - start + 1.0;
            return cnt >= 1.0 ? std::log(cnt) : -kInf;
        }
        case FamilyKind::GeometricGrowth: {
            const double cnt = std::log(m) / spec.p - start + 1.0;
            return cnt >= 1.0 ? std::log(cnt) : -kInf;
        }
        case FamilyKind::Factorial: {
            // continuous inverse of lgamma(k+1) = ln m
            const double lnm = std::log(m);
            double k = 2.0;
            for (int it = 0; it < 80; ++it) {
                const double f = std::lgamma(k + 1.0) - lnm;
                const double dk = f / std::log(k + 1.0);  // d lgamma ~ ln k
                k -= dk;
                if (k < 1.0) k = 1.0;
                if (std::abs(dk) < 1e-12) break;
            }
            const double cnt = k - start + 1.0;
            return cnt >= 1.0 ? std::log(cnt) : -kInf;
        }
        case FamilyKind::LogGrowth: {
            // count = e^m - start + 1
            if (m > 700.0) return m;
            const double cnt = std::exp(m) - start + 1.0;
            return cnt >= 1.0 ? std::log(cnt) : -kInf;
        }
        case FamilyKind::LogLogGrowth: {
            // solve w + c ln w = m for w = ln k*
            double w = std::max(1.0, m - spec.c * std::log(std::max(m, 2.0)));
            for (int it = 0; it < 80; ++it) {
                const double f = w + spec.c * std::log(w) - m;
                const double dw = f / (1.0 + spec.c / w);
                w -= dw;
                if (w < 1e-9) w = 1e-9;
                if (std::abs(dw) < 1e-12) break;
            }
            return w;  // ln(count) ~ w
        }
        case FamilyKind::Explicit: {
            std::size_t cnt = 0;
            for (double v : spec.values)
                if (v <= m) ++cnt;
            return cnt >= 1 ? std::log((double)cnt) : -kInf;
        }
        default:
            return -kInf;
    }
}

}  // namespace

Diagnostic finiteness_diagnostic(const FamilySpec& spec, int j, std::uint64_t horizon) {
    require(j >= 2, "finiteness_diagnostic: j must be >= 2");
    require(spec.growing() || spec.kind == FamilyKind::Explicit,
            "finiteness_diagnostic: requires a growing family");
    Diagnostic d;

    // Route 1: counting-exponent fit. A stabilizing slope of log A*(m) vs
    // log m gives A*(m) = O(m^nu) and certifies a finite limit.
    double mcap = (double)std::max<std::uint64_t>(horizon, 4096);
    if (spec.kind == FamilyKind::Explicit)
        mcap = *std::max_element(spec.values.begin(), spec.values.end()) * 0.5;
    const int pts = 9;
    std::vector<double> lnm(pts), lnc(pts);
    bool usable = mcap > 16.0;
    for (int i = 0; i < pts && usable; ++i) {
        const double frac = (4.0 + i) / 12.0;
        lnm[(std::size_t)i] = frac * std::log(mcap);
        lnc[(std::size_t)i] = log_count_below(spec, std::exp(lnm[(std::size_t)i]));
        if (!std::isfinite(lnc[(std::size_t)i])) usable = false;
    }
    if (usable) {
        std::vector<double> slope(pts - 1);
        for (int i = 0; i + 1 < pts; ++i)
            slope[(std::size_t)i] = (lnc[(std::size_t)i + 1] - lnc[(std::size_t)i]) /
                                    (lnm[(std::size_t)i + 1] - lnm[(std::size_t)i]);
        const auto last4 = std::vector<double>(slope.end() - 4, slope.end());
        const auto [mn, mx] = std::minmax_element(last4.begin(), last4.end());
        if (*mx - *mn <= 0.05 && std::abs(*mx) <= 100.0) {
            d.verdict = Diagnostic::Verdict::FiniteByCountingBound;
            d.nu_hat = 0.25 * (last4[0] + last4[1] + last4[2] + last4[3]);
            d.note = "counting exponent stabilized";
            return d;
        }
    }

    // Route 2: divergence witness. Needs x_alpha < 1 with S(x_alpha) finite so
    // the survival product stays bounded away from 0 on the integration range.
    if (spec.growing()) {
        const GrowthProfile g = growth_profile(spec);
        if (g.x_alpha < 1.0 && g.s_at_x_alpha == SAtRadius::Finite) {
            const double t0 = -std::log(g.x_alpha);
            std::vector<double> lw_i, lw_v;
            double cum = 0.0;
            for (int i = 4; (1ULL << (i + 1)) <= horizon; ++i) {
                double w = 0.0;
                for (std::uint64_t k = std::max<std::uint64_t>((std::uint64_t)spec.start_index,
                                                               1ULL << i);
                     k < (1ULL << (i + 1)); ++k) {
                    const double la = log_a(spec, k);
                    const double a = std::exp(la);
                    w += std::exp((j - 1) * la - a * t0);
                }
                cum += w;
                d.witness_partials.push_back(cum);
                if (w > 0.0) {
                    lw_i.push_back(std::log((double)i));
                    lw_v.push_back(std::log(w));
                }
            }
            const std::size_t nw = lw_i.size();
            if (nw >= 8) {
                const std::size_t half = nw / 2;
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                const double cnt = (double)(nw - half);
                for (std::size_t i = half; i < nw; ++i) {
                    sx += lw_i[i];
                    sy += lw_v[i];
                    sxx += lw_i[i] * lw_i[i];
                    sxy += lw_i[i] * lw_v[i];
                }
                const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
                if (slope >= -1.15) {
                    d.verdict = Diagnostic::Verdict::DivergentByWitness;
                    d.note = "witness window sums decay no faster than 1/i (diagnosed, not proven)";
                    return d;
                }
                d.note = "witness windows decay summably";
            }
        }
    }
    d.verdict = Diagnostic::Verdict::Inconclusive;
    if (d.note.empty()) d.note = "no route reached a verdict";
    return d;
}

LimitIntegralResult limit_integral_I(const FamilySpec& spec, int j,
                                     const quadrature::QuadratureConfig& cfg) {
    require(j >= 2, "limit_integral_I: j must be >= 2");
    require(growing_analytic(spec), "limit_integral_I: requires a growing family");
    LimitIntegralResult out;

    const Diagnostic diag = finiteness_diagnostic(spec, j);
    if (diag.verdict == Diagnostic::Verdict::DivergentByWitness) {
        out.divergent = true;
        out.witness = diag.witness_partials;
        return out;
    }

    const double t0 = t0_of(spec);
    const double tol_domain = std::max(cfg.abs_tol * 10.0, 1e-11);
    double lgfact = std::lgamma((double)j);

    std::atomic<double> max_rel_tail{0.0};
    std::atomic<std::uint64_t> max_terms{0};
    const auto integrand = [&](double t) -> double {
        const SumResult lf = eval_logF(spec, t, 1e-300, 1e-12, -2000.0);
        std::uint64_t seen = max_terms.load(std::memory_order_relaxed);
        while (lf.terms > seen &&
               !max_terms.compare_exchange_weak(seen, lf.terms, std::memory_order_relaxed)) {
        }
        if (lf.floored || lf.value < -1500.0) return 0.0;
        const SumResult L = eval_L(spec, t, j, 1e-300, 1e-12);
        if (!(L.value > 0.0)) return 0.0;
        // series truncations perturb the integrand relatively:
        // dI/I <= tail_L/L + |tail_logF|
        atomic_max(max_rel_tail, L.tail / L.value + std::abs(lf.tail));
        const double ln_int = std::log(L.value) + lf.value + (j - 1) * std::log(t) - lgfact;
        return ln_int < -745.0 ? 0.0 : std::exp(ln_int);
    };

    // Right cutoff: Gamma-tail bound per coupon, reduced to an S-sum at rate T/2.
    double cj = 0.0;
    for (double y = 0.0; y <= 220.0; y += 0.05) {
        double s = 0.0, term = 1.0;
        for (int i = 0; i < j; ++i) {
            s += term;
            term *= y / (i + 1);
        }
        cj = std::max(cj, std::exp(-0.5 * y) * s);
    }
    cj *= 1.05;
    const double a_min = a_of(spec, (std::uint64_t)spec.start_index);
    double T = std::max(2.0 * t0 + 2.0, 8.0);
    double rtail = kInf;
    for (int it = 0; it < 40; ++it) {
        const SumResult s_half = eval_S(spec, 0.5 * T, 1e-300, 1e-6);
        rtail = cj * (s_half.value + s_half.tail) / -std::expm1(-a_min * T);
        if (rtail < 0.25 * tol_domain) break;
        T *= 1.5;
    }

    // Left cutoff: back off from t0 until the (vanishing) edge contribution
    // is provably below tolerance; 10x slack covers mild edge singularities.
    double h = std::min(1.0, 0.25 * (T - t0));
    double left_est = kInf;
    for (int it = 0; it < 90; ++it) {
        const double v1 = integrand(t0 + h);
        const double v2 = integrand(t0 + 0.5 * h);
        left_est = 10.0 * h * std::max(v1, v2);
        if (left_est < 0.25 * tol_domain || h < 1e-20) break;
        h *= 0.5;
    }

    auto make_edges = [&](int panels) {
        std::vector<double> e((std::size_t)(2 * panels) + 1);
        const double r = std::log((T - t0) / h) / (2 * panels);
        for (int i = 0; i <= 2 * panels; ++i) e[(std::size_t)i] = t0 + h * std::exp(r * i);
        e.front() = t0 + h;
        e.back() = T;
        return e;
    };
    const quadrature::detail::PanelOutcome po =
        quadrature::detail::integrate_doubling(integrand, make_edges, 8, cfg);
    out.value = po.value;
    out.quad_error = po.delta;
    out.truncation_k = max_terms.load();
    out.tail_bound = left_est + rtail + max_rel_tail.load() * std::abs(po.value);
    if (!po.converged)
        throw NonConvergence("limit_integral_I: panel doubling budget exhausted", po.value,
                             po.delta);
    return out;
}

}  // namespace sibling::limits
