#include "sibling/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "sibling/errors.hpp"
#include "sibling/parallel.hpp"

namespace sibling::quadrature {

namespace detail {

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.x.resize((std::size_t)n);
    rule.w.resize((std::size_t)n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.x[(std::size_t)i] = -x;
        rule.w[(std::size_t)i] = w;
        rule.x[(std::size_t)(n - 1 - i)] = x;
        rule.w[(std::size_t)(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

PanelOutcome integrate_doubling(const std::function<double(double)>& f,
                                const std::function<std::vector<double>(int)>& make_edges,
                                int initial_panels, const QuadratureConfig& cfg) {
    const GaussRule& rule = gauss_legendre(std::max(2, cfg.nodes_per_panel));
    const int nn = (int)rule.x.size();
    PanelOutcome out;
    double prev = 0.0;
    bool have_prev = false;
    int panels = std::max(1, initial_panels);
    for (int level = 0; level <= cfg.max_panel_doublings; ++level) {
        const std::vector<double> edges = make_edges(panels);
        const std::size_t np = edges.size() - 1;
        std::vector<double> pv(np, 0.0);
        parallel_chunks(np, 4, cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t pi = b; pi < e; ++pi) {
                const double lo = edges[pi], hi = edges[pi + 1];
                const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
                double acc = 0.0;
                for (int i = 0; i < nn; ++i)
                    acc += rule.w[(std::size_t)i] * f(mid + half * rule.x[(std::size_t)i]);
                pv[pi] = acc * half;
            }
        });
        double v = 0.0, comp = 0.0;  // Kahan, fixed panel order
        for (double x : pv) {
            const double y = x - comp;
            const double t = v + y;
            comp = (t - v) - y;
            v = t;
        }
        out.evals += (std::int64_t)np * nn;
        if (have_prev) {
            out.delta = std::abs(v - prev);
            out.value = v;
            if (out.delta <= std::max(cfg.rel_tol * std::abs(v), cfg.abs_tol)) {
                out.converged = true;
                return out;
            }
        } else {
            out.value = v;
        }
        prev = v;
        have_prev = true;
        panels *= 2;
    }
    return out;  // converged = false; caller decides how to report
}

namespace {

std::vector<double> geometric_edges(double lo, double hi, int panels) {
    std::vector<double> e((std::size_t)panels + 1);
    const double r = std::log(hi / lo) / panels;
    for (int i = 0; i <= panels; ++i) e[(std::size_t)i] = lo * std::exp(r * i);
    e.front() = lo;
    e.back() = hi;
    return e;
}

double pow_int(double z, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

constexpr double kZCut = 50.0;    // e^{-50} ~ 2e-22: factors beyond are 1 in double
constexpr double kSFloor = -745.0;  // exp underflow floor

// Integrand of the t-parameterization after factoring the k-product through
// the shared survival sum:
//   h(t) = e^{S(t)} * sum_k p_k z_k^{j-1} / (e^{z_k} - 1) / (j-1)!,  z_k = p_k t.
// Probabilities are held sorted ascending so the terms that still matter at a
// given t form a prefix (z <= zcut).
struct Integrand {
    std::vector<double> ps;  // ascending
    int j;
    double log_fact;

    double survival(double t) const {
        // S(t) restricted to the active window; skipped terms are each
        // > -e^{-46}, so the omission is below double resolution.
        const double pcut = kZCut / t;
        double s = 0.0, comp = 0.0;
        for (double p : ps) {
            if (p > pcut) break;
            const double z = p * t;
            const double term =
                z > 0.6931471805599453 ? std::log1p(-std::exp(-z)) : std::log(-std::expm1(-z));
            const double y = term - comp;
            const double tt = s + y;
            comp = (tt - s) - y;
            s = tt;
        }
        return s;
    }

    // S(t) + ln Q(t) - ln (j-1)!, or -inf when the product has underflowed.
    double log_h(double t) const {
        const double pcut = kZCut / t;
        double s = 0.0, q = 0.0;
        for (double p : ps) {
            if (p > pcut) break;
            const double z = p * t;
            if (z > 0.6931471805599453) {
                const double e = std::exp(-z);
                s += std::log1p(-e);
                q += p * pow_int(z, j - 1) * e / (1.0 - e);
            } else {
                const double em = -std::expm1(-z);  // 1 - e^{-z}, stable
                s += std::log(em);
                q += p * pow_int(z, j - 1) * (1.0 - em) / em;
            }
            if (s < kSFloor - 60.0) return -std::numeric_limits<double>::infinity();
        }
        if (q <= 0.0) return -std::numeric_limits<double>::infinity();
        return s + std::log(q) - log_fact;
    }

    double h(double t) const {
        const double lh = log_h(t);
        return lh < kSFloor ? 0.0 : std::exp(lh);
    }
};

Integrand make_integrand(const families::ProbVector& pv, int j) {
    if (j < 2) throw ConfigError("expected_unfilled: j must be >= 2");
    Integrand ig;
    ig.ps = pv.p;
    std::sort(ig.ps.begin(), ig.ps.end());
    ig.j = j;
    ig.log_fact = std::lgamma((double)j);
    return ig;
}

// Truncation point: beyond t_max the un-collected mass is below abs_tol.
double upper_cutoff(double p_min, std::size_t N, int j, double abs_tol) {
    const double w = std::log((double)N / abs_tol);
    return (w + j * std::log(w + 2.0) + 5.0) / p_min;
}

// Below the returned t the integrand is flushed to zero by the survival
// product; S(t) <= N ln(p_max t) gives an analytic starting bracket.
double lower_cutoff(const Integrand& ig, double t_max) {
    const double p_max = ig.ps.back();
    // S(t) <= N ln(p_max t), so S < floor is guaranteed at exp(-800/N)/p_max
    double lo = std::exp(std::max(-800.0 / (double)ig.ps.size(), -660.0)) / p_max;
    lo = std::min(lo, 0.25 * t_max);
    if (ig.survival(lo) >= kSFloor) return lo;  // tiny N: integrand never underflows there
    double hi = t_max;
    for (int i = 0; i < 200 && hi / lo > 1.0000001; ++i) {
        const double mid = std::sqrt(lo * hi);
        (ig.survival(mid) < kSFloor ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace
}  // namespace detail

double log_survival_sum(const families::ProbVector& pv, double t) {
    if (!(t > 0.0)) throw ConfigError("log_survival_sum: t must be positive");
    double s = 0.0, comp = 0.0;
    for (double p : pv.p) {
        const double z = p * t;
        const double term =
            z > 0.6931471805599453 ? std::log1p(-std::exp(-z)) : std::log(-std::expm1(-z));
        const double y = term - comp;
        const double tt = s + y;
        comp = (tt - s) - y;
        s = tt;
    }
    return s;
}

ExpectationResult expected_unfilled(const families::ProbVector& pv, int j,
                                    const QuadratureConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const detail::Integrand ig = detail::make_integrand(pv, j);
    const std::size_t N = ig.ps.size();
    const double t_max = detail::upper_cutoff(ig.ps.front(), N, j, cfg.abs_tol);
    const double t_lo = detail::lower_cutoff(ig, t_max);
    double t_break = 1.0 / ig.ps[N / 2];  // median coupon time scale
    const bool split = t_break > 2.0 * t_lo && t_break < 0.5 * t_max;
    if (!split) t_break = t_lo;

    auto make_edges = [&](int panels) {
        if (!split) return detail::geometric_edges(t_lo, t_max, 2 * panels);
        auto e1 = detail::geometric_edges(t_lo, t_break, panels);
        auto e2 = detail::geometric_edges(t_break, t_max, panels);
        e1.insert(e1.end(), e2.begin() + 1, e2.end());
        return e1;
    };
    auto f = [&](double t) { return ig.h(t); };
    const detail::PanelOutcome po = detail::integrate_doubling(f, make_edges, 8, cfg);
    ExpectationResult res;
    res.value = po.value;
    res.error_estimate = po.delta;
    res.nodes_used = po.evals;
    res.elapsed = std::chrono::steady_clock::now() - start;
    if (!po.converged)
        throw NonConvergence("expected_unfilled: panel doubling budget exhausted", po.value,
                             po.delta);
    return res;
}

ExpectationResult expected_unfilled_on_unit_interval(const families::ProbVector& pv, int j,
                                                     const QuadratureConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const detail::Integrand ig = detail::make_integrand(pv, j);
    const std::size_t N = ig.ps.size();
    const double t_need = detail::upper_cutoff(ig.ps.front(), N, j, cfg.abs_tol);
    // x = e^{-t} must stay inside long-double range to hold the deep tail
    if (t_need > 11000.0)
        throw ConfigError(
            "expected_unfilled_on_unit_interval: smallest probability too small for the "
            "unit-interval parameterization; use expected_unfilled");
    const int octaves = (int)std::ceil(t_need / std::numbers::ln2) + 1;
    const double ln_thresh =
        std::log(cfg.abs_tol) - std::log((double)octaves) - 46.0;

    // Integrand of the x-form at x = e^{-t} is h(t) e^{t}; evaluated in log
    // form and exponentiated in long double (t can exceed the double exp range).
    const auto log_g = [&](double t) { return ig.log_h(t) + t; };

    // Octave prescreen by midpoint value; neighbors kept as a safety margin.
    std::vector<char> active((std::size_t)octaves, 0);
    for (int i = 0; i < octaves; ++i) {
        const double t_mid = (i + 0.5) * std::numbers::ln2;
        const double lg = log_g(t_mid) - (i + 1) * std::numbers::ln2;  // + ln(width)
        if (lg > ln_thresh) active[(std::size_t)i] = 1;
    }
    std::vector<char> keep = active;
    for (int i = 0; i < octaves; ++i)
        if (active[(std::size_t)i])
            for (int d = -2; d <= 2; ++d)
                if (i + d >= 0 && i + d < octaves) keep[(std::size_t)(i + d)] = 1;
    std::vector<int> oct_idx;
    for (int i = 0; i < octaves; ++i)
        if (keep[(std::size_t)i]) oct_idx.push_back(i);

    const detail::GaussRule& rule = detail::gauss_legendre(std::max(2, cfg.nodes_per_panel));
    const int nn = (int)rule.x.size();

    auto level_value = [&](int sub) {
        // each active octave [2^{-(i+1)}, 2^{-i}] split into `sub` x-equal panels
        std::vector<long double> ov(oct_idx.size(), 0.0L);
        parallel_chunks(oct_idx.size(), 1, cfg.threads,
                        [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t oi = b; oi < e; ++oi) {
                const int i = oct_idx[oi];
                const long double xhi = powl(0.5L, (long double)i);
                const long double xlo = 0.5L * xhi;
                const long double step = (xhi - xlo) / sub;
                long double acc = 0.0L;
                for (int s = 0; s < sub; ++s) {
                    const long double a = xlo + step * s;
                    const long double half = 0.5L * step;
                    const long double mid = a + half;
                    long double pacc = 0.0L;
                    for (int q = 0; q < nn; ++q) {
                        const long double x = mid + half * (long double)rule.x[(std::size_t)q];
                        const double t = (double)(-logl(x));
                        const double lg = log_g(t);
                        if (lg > -11300.0)
                            pacc += (long double)rule.w[(std::size_t)q] * expl((long double)lg);
                    }
                    acc += pacc * half;
                }
                ov[oi] = acc;
            }
        });
        long double v = 0.0L;
        for (long double x : ov) v += x;
        return (double)v;
    };

    ExpectationResult res;
    double prev = 0.0;
    bool have_prev = false;
    int sub = 1;
    for (int level = 0; level <= cfg.max_panel_doublings; ++level) {
        const double v = level_value(sub);
        res.nodes_used += (std::int64_t)oct_idx.size() * sub * nn;
        if (have_prev) {
            res.error_estimate = std::abs(v - prev);
            res.value = v;
            if (res.error_estimate <= std::max(cfg.rel_tol * std::abs(v), cfg.abs_tol)) {
                res.elapsed = std::chrono::steady_clock::now() - start;
                return res;
            }
        } else {
            res.value = v;
        }
        prev = v;
        have_prev = true;
        sub *= 2;
    }
    res.elapsed = std::chrono::steady_clock::now() - start;
    throw NonConvergence("expected_unfilled_on_unit_interval: panel doubling budget exhausted",
                         res.value, res.error_estimate);
}

}  // namespace sibling::quadrature
