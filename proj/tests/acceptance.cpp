// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sibling/asymptotics.hpp"
#include "sibling/errors.hpp"
#include "sibling/exact.hpp"
#include "sibling/families.hpp"
#include "sibling/io.hpp"
#include "sibling/limits.hpp"
#include "sibling/quadrature.hpp"
#include "sibling/simulate.hpp"

using namespace sibling;
using families::FamilySpec;
using families::ProbVector;
using quadrature::QuadratureConfig;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProbVector dirichlet(std::size_t n, std::uint64_t seed, std::uint64_t trial) {
    simulate::Rng rng = simulate::stream_for(seed, trial);
    std::vector<double> w(n);
    for (double& x : w) x = -std::log1p(-rng.unit());
    return families::normalize(w);
}

struct Check {
    bool ok = true;
    std::ostringstream detail;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

// 1. The averaging recursion and the alternating closed form are the same
//    exact rational for all N <= 30, j <= 6.
bool crit_exact_cross_identity(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (long N = 1; N <= 30; ++N)
        for (int j = 2; j <= 6; ++j)
            c.expect(exact::hyperharmonic(N, j) == exact::alternating_sum(N, j),
                     "mismatch at N=" + std::to_string(N) + ", j=" + std::to_string(j));
    c.expect(seconds_since(t0) < 5.0, "exceeded 5 s budget");
    return c.ok;
}

// 2. Quadrature vs exact rationals under equal probabilities.
bool crit_quadrature_vs_exact(Check& c) {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    for (const long N : {2L, 10L, 100L}) {
        const ProbVector p = families::probabilities(FamilySpec::equal(), (std::size_t)N);
        for (const int j : {2, 3, 4}) {
            const auto t0 = std::chrono::steady_clock::now();
            const double got = quadrature::expected_unfilled(p, j, cfg).value;
            const double el = seconds_since(t0);
            const double want = exact::hyperharmonic(N, j).to_double();
            c.expect(std::abs(got - want) < 1e-8,
                     "N=" + std::to_string(N) + " j=" + std::to_string(j) + " |diff|=" +
                         io::fmt(std::abs(got - want)));
            c.expect(el < 1.0, "call exceeded 1 s at N=" + std::to_string(N));
        }
    }
    return c.ok;
}

// 3. Quadrature vs the two- and three-type closed forms on random vectors.
bool crit_small_N_closed_forms(Check& c) {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-10;
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const ProbVector p2 = dirichlet(2, 0xacce5501, trial);
        for (const int j : {2, 3}) {
            const double diff = std::abs(quadrature::expected_unfilled(p2, j, cfg).value -
                                         exact::two_types(p2.p[0], j));
            worst = std::max(worst, diff);
        }
        const ProbVector p3 = dirichlet(3, 0xacce5502, trial);
        const double diff3 = std::abs(quadrature::expected_unfilled(p3, 2, cfg).value -
                                      exact::three_types_j2(p3.p[0], p3.p[1], p3.p[2]));
        worst = std::max(worst, diff3);
    }
    c.detail << "worst |diff| = " << io::fmt(worst);
    c.expect(worst < 1e-8, "exceeds 1e-8");
    return c.ok;
}

// 4. One nearly impossible coupon: the N=3 expectation drops below the N=2 one.
bool crit_rare_coupon_counterexample(Check& c) {
    const ProbVector p = families::normalize({1.0, 1.0, 0.01});
    const double got = quadrature::expected_unfilled(p, 2).value;
    const double want = exact::three_types_j2(p.p[0], p.p[1], p.p[2]);
    c.detail << "E = " << io::fmt(got);
    c.expect(got < 1.5, "not below 3/2");
    c.expect(got < 1.1, "not below 1.1");
    c.expect(std::abs(got - want) < 1e-6, "closed-form gap " + io::fmt(std::abs(got - want)));
    return c.ok;
}

// 5. Simulation calibration against the exact equal-probability answers.
bool crit_simulation_calibration(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const ProbVector p = families::probabilities(FamilySpec::equal(), 20);
    const auto est = simulate::estimate(p, 2, 100000, 20260401);
    const double h20 = exact::harmonic(20).to_double();
    const double t20 = exact::mean_T_equal(20).to_double();
    c.detail << "U2 " << io::fmt(est.mean_u[0]) << "+-" << io::fmt(est.se_u[0]) << " vs "
             << io::fmt(h20);
    c.expect(std::abs(est.mean_u[0] - h20) <= 3.0 * est.se_u[0], "mean U2 outside 3 se");
    c.expect(std::abs(est.mean_t - t20) <= 3.0 * est.se_t, "mean T outside 3 se");
    const auto big = simulate::estimate(p, 2, 1000000, 20260402);
    const double vexact = exact::variance_u2_equal(20).to_double();
    c.expect(std::abs(big.var_u[0] / vexact - 1.0) <= 0.05,
             "variance off by " + io::fmt(std::abs(big.var_u[0] / vexact - 1.0)));
    c.expect(seconds_since(t0) < 60.0, "exceeded 60 s budget");
    return c.ok;
}

// 6. Normalized expansion remainder stays bounded across three decades of N.
bool crit_remainder_bounded(Check& c) {
    QuadratureConfig cfg;
    for (const double pexp : {1.0, 2.0}) {
        const asymptotics::SmoothFamily fam =
            asymptotics::SmoothFamily::from_spec(FamilySpec::zipf(pexp));
        for (const int j : {2, 3}) {
            double rmin = 1e300, rmax = 0.0;
            for (const long N : {100L, 1000L, 10000L, 100000L}) {
                const ProbVector p =
                    families::probabilities(FamilySpec::zipf(pexp), (std::size_t)N);
                const auto t0 = std::chrono::steady_clock::now();
                const double q = quadrature::expected_unfilled(p, j, cfg).value;
                const double el = seconds_since(t0);
                if (N == 100000)
                    c.expect(el < 120.0, "N=1e5 call took " + io::fmt(el) + " s");
                const auto th = asymptotics::theorem_expansion(fam, (double)N, j);
                const double d = th.delta;
                const double scale =
                    d * d * std::log(d) * std::log(d) * th.term0;  // term0 = leading factor
                const double R = std::abs(q - th.value) / scale;
                rmin = std::min(rmin, R);
                rmax = std::max(rmax, R);
            }
            c.detail << " p=" << io::fmt(pexp) << ",j=" << j << ": ratio "
                     << io::fmt(rmax / rmin);
            c.expect(rmax / rmin < 10.0, "|R| ratio " + io::fmt(rmax / rmin) + " >= 10");
        }
    }
    return c.ok;
}

// 7. Scale invariance: weights and s*weights give identical expectations.
bool crit_scale_invariance(Check& c) {
    QuadratureConfig cfg;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        simulate::Rng rng = simulate::stream_for(0xacce5507, trial);
        const std::size_t n = 3 + (std::size_t)rng.bounded(20);
        std::vector<double> w(n);
        for (double& x : w) x = 0.02 + rng.unit() * 8.0;
        const double base = quadrature::expected_unfilled(families::normalize(w), 2, cfg).value;
        for (const double s : {1e-6, 1e6}) {
            std::vector<double> ws(w);
            for (double& x : ws) x *= s;
            const double v =
                quadrature::expected_unfilled(families::normalize(ws), 2, cfg).value;
            c.expect(std::abs(v - base) <= 10.0 * cfg.rel_tol * std::abs(base),
                     "s=" + io::fmt(s) + " drift " + io::fmt(std::abs(v - base)));
        }
    }
    return c.ok;
}

// 8. Growing families: plateau toward the limit integral, and the log-log
//    family's divergence signature.
bool crit_growing_limits(Check& c) {
    QuadratureConfig cfg;
    const long Ns[3] = {100, 1000, 10000};
    for (const auto& spec : {FamilySpec::linear(), FamilySpec::log_growth()}) {
        double v[3], e[3];
        for (int i = 0; i < 3; ++i) {
            const auto r = quadrature::expected_unfilled(
                families::probabilities(spec, (std::size_t)Ns[i]), 2, cfg);
            v[i] = r.value;
            e[i] = r.error_estimate + cfg.abs_tol;
        }
        const double d1 = v[1] - v[0], d2 = v[2] - v[1];
        const double cushion = e[0] + 2.0 * e[1] + e[2];
        const limits::LimitIntegralResult I = limits::limit_integral_I(spec, 2, cfg);
        c.detail << " " << spec.name() << ": inc " << io::fmt(d1) << "->" << io::fmt(d2)
                 << ", |gap|/I " << io::fmt(std::abs(v[2] - I.value) / I.value);
        c.expect(d2 <= d1 + cushion, spec.name() + ": increments not shrinking");
        c.expect(std::abs(d2) < 0.01 * v[2],
                 spec.name() + ": final increment " + io::fmt(std::abs(d2) / v[2]) +
                     " of value (>= 1%)");
        c.expect(std::abs(v[2] - I.value) <= 0.02 * std::abs(I.value),
                 spec.name() + ": limit gap " + io::fmt(std::abs(v[2] - I.value) / I.value) +
                     " (> 2%)");
    }
    {
        const auto spec = FamilySpec::log_log_growth(2.0);
        const double a =
            quadrature::expected_unfilled(families::probabilities(spec, 1000), 2, cfg).value;
        const double b =
            quadrature::expected_unfilled(families::probabilities(spec, 10000), 2, cfg).value;
        c.detail << " loglog growth " << io::fmt((b - a) / a);
        c.expect((b - a) / a > 0.05, "loglog growth signature below 5%");
    }
    return c.ok;
}

// 9. Lambert coefficients equal brute-force divisor power sums.
bool crit_lambert_coefficients(Check& c) {
    std::map<std::uint64_t, std::uint64_t> ones;
    for (std::uint64_t d = 1; d <= 10000; ++d) ones[d] = 1;
    for (const int j : {2, 3}) {
        const auto al = limits::lambert_coefficients(ones, 10000, j);
        for (std::uint64_t n = 1; n <= 10000; ++n) {
            std::uint64_t sigma = 0;
            for (std::uint64_t d = 1; d * d <= n; ++d) {
                if (n % d != 0) continue;
                std::uint64_t dj = 1, qj = 1;
                const std::uint64_t q = n / d;
                for (int i = 0; i < j; ++i) {
                    dj *= d;
                    qj *= q;
                }
                sigma += dj;
                if (q != d) sigma += qj;
            }
            if (al[n - 1] != sigma) {
                c.expect(false, "mismatch at n=" + std::to_string(n) + " j=" + std::to_string(j));
                break;
            }
        }
    }
    return c.ok;
}

// 10. Equal probabilities maximize the expectation over random alternatives.
bool crit_conjecture_experiment(Check& c) {
    QuadratureConfig cfg;
    std::uint64_t violations = 0;
    for (long N = 2; N <= 10; ++N) {
        for (const int j : {2, 3}) {
            const double equal_value =
                quadrature::expected_unfilled(
                    families::probabilities(FamilySpec::equal(), (std::size_t)N), j, cfg)
                    .value;
            const std::uint64_t seed = 0xacce5510 + 131 * (std::uint64_t)N + (std::uint64_t)j;
            for (std::uint64_t trial = 0; trial < 1000; ++trial) {
                const ProbVector p = dirichlet((std::size_t)N, seed, trial);
                const double v = quadrature::expected_unfilled(p, j, cfg).value;
                if (v > equal_value + 1e-7) ++violations;
            }
        }
    }
    c.detail << "violations = " << violations << " / 18000";
    c.expect(violations == 0, "observed violations");
    return c.ok;
}

// 11. Identical configs (including seeds) produce byte-identical artifacts.
bool crit_reproducibility(Check& c) {
#ifdef SIBLING_CLI_PATH
    const std::string cli = SIBLING_CLI_PATH;
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"sim.csv",
         " simulate --family '{\"kind\":\"equal\"}' --N 20 --jmax 3 --reps 20000 --seed 11"},
        {"exp.json", " experiment --N 4 --j 2 --trials 50 --seed 5 --format json"},
        {"cmp.csv", " compute --family '{\"kind\":\"zipf\",\"p\":1.0}' --Nlist 10,100 --j 2"},
        {"asy.csv", " asympt --family '{\"kind\":\"zipf\",\"p\":2.0}' --Nlist 1000,10000 --j 3"},
        {"lim.json", " limit --family '{\"kind\":\"linear\"}' --j 2"},
    };
    for (const auto& [name, args] : runs) {
        for (const char* tag : {"a", "b"}) {
            const std::string cmd =
                cli + args + " --out acceptance_" + tag + "_" + name + " 2>/dev/null";
            const int rc = std::system(cmd.c_str());
            c.expect(rc == 0, name + ": CLI exited " + std::to_string(rc));
        }
        if (!c.ok) continue;
        const std::string a = io::read_file("acceptance_a_" + name);
        const std::string b = io::read_file("acceptance_b_" + name);
        c.expect(!a.empty(), name + ": empty artifact");
        c.expect(a == b, name + ": artifacts differ between runs");
    }
#else
    c.expect(false, "CLI path not wired in");
#endif
    return c.ok;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(Check&)> fn;
    };
    const std::vector<Criterion> criteria = {
        {"exact cross-identity (recursion == alternating form)", crit_exact_cross_identity},
        {"quadrature vs exact rationals (equal probabilities)", crit_quadrature_vs_exact},
        {"quadrature vs small-N closed forms", crit_small_N_closed_forms},
        {"rare-coupon counterexample", crit_rare_coupon_counterexample},
        {"simulation calibration", crit_simulation_calibration},
        {"expansion remainder boundedness", crit_remainder_bounded},
        {"scale invariance", crit_scale_invariance},
        {"growing-sequence limits", crit_growing_limits},
        {"lambert coefficients == divisor sums", crit_lambert_coefficients},
        {"equal-maximizes experiment", crit_conjecture_experiment},
        {"byte-identical artifacts", crit_reproducibility},
    };
    int fails = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criteria[i].fn(c);
        } catch (const std::exception& e) {
            c.detail << "exception: " << e.what();
            ok = false;
        }
        if (!ok) ++fails;
        std::printf("[%2zu] %s %s (%.1fs)%s%s\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].name,
                    seconds_since(t0), c.detail.str().empty() ? "" : " -- ",
                    c.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", (int)criteria.size() - fails, criteria.size());
    return fails;
}
