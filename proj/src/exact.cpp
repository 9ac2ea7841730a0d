#include "sibling/exact.hpp"

#include <cmath>
#include <vector>

#include <gmpxx.h>

#include "sibling/errors.hpp"

namespace sibling::exact {

struct Rational::Impl {
    mpq_class q;
};

namespace {

Rational wrap(mpq_class q) {
    auto impl = std::make_unique<Rational::Impl>();
    q.canonicalize();
    impl->q = std::move(q);
    return Rational(std::move(impl));
}

const mpq_class& get(const Rational& r) { return r.impl().q; }

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

// numerator/denominator of sum_{m=lo}^{hi} 1/m^e without intermediate
// canonicalization; balanced splitting keeps the big multiplies near the top.
void harmonic_split(unsigned long lo, unsigned long hi, int e, mpz_class& num, mpz_class& den) {
    if (lo == hi) {
        num = 1;
        den = mpz_class((long)lo);
        if (e == 2) den *= den;
        return;
    }
    const unsigned long mid = lo + (hi - lo) / 2;
    mpz_class n1, d1, n2, d2;
    harmonic_split(lo, mid, e, n1, d1);
    harmonic_split(mid + 1, hi, e, n2, d2);
    num = n1 * d2 + n2 * d1;
    den = d1 * d2;
}

Rational harmonic_pow(long N, int e) {
    require(N >= 1, "harmonic: N must be >= 1");
    mpz_class num, den;
    harmonic_split(1, (unsigned long)N, e, num, den);
    return wrap(mpq_class(num, den));
}

}  // namespace

Rational::Rational() : impl_(std::make_unique<Impl>()) {}
Rational::Rational(long n) : impl_(std::make_unique<Impl>()) { impl_->q = n; }
Rational::Rational(long n, long d) : impl_(std::make_unique<Impl>()) {
    require(d != 0, "Rational: zero denominator");
    impl_->q = mpq_class(n, d);
    impl_->q.canonicalize();
}
Rational::Rational(const Rational& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
Rational::Rational(Rational&&) noexcept = default;
Rational& Rational::operator=(const Rational& o) {
    impl_ = std::make_unique<Impl>(*o.impl_);
    return *this;
}
Rational& Rational::operator=(Rational&&) noexcept = default;
Rational::~Rational() = default;
Rational::Rational(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Rational Rational::operator+(const Rational& o) const { return wrap(impl_->q + o.impl_->q); }
Rational Rational::operator-(const Rational& o) const { return wrap(impl_->q - o.impl_->q); }
Rational Rational::operator*(const Rational& o) const { return wrap(impl_->q * o.impl_->q); }
Rational Rational::operator/(const Rational& o) const {
    require(o.impl_->q != 0, "Rational: division by zero");
    return wrap(impl_->q / o.impl_->q);
}
bool Rational::operator==(const Rational& o) const { return impl_->q == o.impl_->q; }
bool Rational::operator<(const Rational& o) const { return impl_->q < o.impl_->q; }

double Rational::to_double() const { return impl_->q.get_d(); }
std::string Rational::numerator() const { return impl_->q.get_num().get_str(); }
std::string Rational::denominator() const { return impl_->q.get_den().get_str(); }
std::string Rational::str() const {
    if (impl_->q.get_den() == 1) return numerator();
    return numerator() + "/" + denominator();
}

Rational harmonic(long N) { return harmonic_pow(N, 1); }
Rational harmonic2(long N) { return harmonic_pow(N, 2); }

Rational hyperharmonic(long N, int j) {
    require(N >= 1, "hyperharmonic: N must be >= 1");
    require(j >= 2, "hyperharmonic: j must be >= 2");
    if (j == 2) return harmonic(N);
    require(N <= 20000, "hyperharmonic: N too large for the recursion table");
    // level[m-1] holds E_{jj}(m); start at jj = 2 (running harmonic numbers)
    std::vector<mpq_class> level((std::size_t)N);
    mpq_class run = 0;
    for (long m = 1; m <= N; ++m) {
        run += mpq_class(1, m);
        level[(std::size_t)m - 1] = run;
    }
    for (int jj = 3; jj <= j; ++jj) {
        run = 0;
        for (long m = 1; m <= N; ++m) {
            run += level[(std::size_t)m - 1] / m;
            level[(std::size_t)m - 1] = run;
        }
    }
    mpq_class out = level[(std::size_t)N - 1];
    out.canonicalize();
    return wrap(std::move(out));
}

Rational alternating_sum(long N, int j) {
    require(N >= 1, "alternating_sum: N must be >= 1");
    require(j >= 2, "alternating_sum: j must be >= 2");
    require(N <= 200, "alternating_sum: refused for N > 200 (cost guard)");
    mpq_class acc = 0;
    mpz_class binom;
    for (long k = 1; k <= N; ++k) {
        mpz_bin_uiui(binom.get_mpz_t(), (unsigned long)N, (unsigned long)k);
        mpz_class kpow;
        mpz_ui_pow_ui(kpow.get_mpz_t(), (unsigned long)k, (unsigned long)(j - 1));
        mpq_class term(binom, kpow);
        term.canonicalize();
        if (k % 2 == 1)
            acc += term;
        else
            acc -= term;
    }
    return wrap(std::move(acc));
}

Rational mean_T_equal(long N) {
    require(N >= 1, "mean_T_equal: N must be >= 1");
    return wrap(get(harmonic(N)) * N);
}

Rational variance_u2_equal(long N) {
    require(N >= 1, "variance_u2_equal: N must be >= 1");
    mpq_class H = 0, inner = 0;
    for (long m = 1; m <= N; ++m) {
        H += mpq_class(1, m);
        inner += H / m;
    }
    mpq_class out = 4 * inner - 3 * H - H * H;
    return wrap(std::move(out));
}

double two_types(double p1, int j) {
    require(p1 > 0.0 && p1 < 1.0, "two_types: p1 must lie strictly in (0,1)");
    require(j >= 2, "two_types: j must be >= 2");
    const double p2 = 1.0 - p1;
    return 2.0 - std::pow(p1, j) - std::pow(p2, j);
}

double three_types_j2(double p1, double p2, double p3) {
    require(p1 > 0 && p2 > 0 && p3 > 0, "three_types_j2: probabilities must be positive");
    require(std::abs(p1 + p2 + p3 - 1.0) <= 1e-12, "three_types_j2: probabilities must sum to 1");
    const auto pair = [](double a, double b) { return (a * a + b * b) / ((a + b) * (a + b)); };
    return 3.0 + p1 * p1 + p2 * p2 + p3 * p3 - pair(p1, p2) - pair(p1, p3) - pair(p2, p3);
}

namespace {
ExactResult make(Rational v, Formula f) {
    const double d = v.to_double();
    return ExactResult{std::move(v), d, f};
}
}  // namespace

ExactResult harmonic_result(long N) { return make(harmonic(N), Formula::Harmonic); }
ExactResult hyperharmonic_result(long N, int j) {
    return make(hyperharmonic(N, j), j == 2 ? Formula::Harmonic : Formula::Recursion);
}
ExactResult alternating_sum_result(long N, int j) {
    return make(alternating_sum(N, j), Formula::AlternatingSum);
}
ExactResult mean_T_result(long N) { return make(mean_T_equal(N), Formula::MeanT); }
ExactResult variance_u2_result(long N) { return make(variance_u2_equal(N), Formula::VarU2); }

}  // namespace sibling::exact
