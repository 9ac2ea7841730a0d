#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "sibling/errors.hpp"
#include "sibling/families.hpp"
#include "sibling/simulate.hpp"

using namespace sibling;
using families::FamilySpec;

TEST_CASE("weights match their defining sequences") {
    const auto zipf = families::weights(FamilySpec::zipf(1.0), 3);
    CHECK(zipf[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(zipf[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(zipf[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto eq = families::weights(FamilySpec::equal(), 4);
    for (double w : eq) CHECK(w == 1.0);

    const auto lg = families::weights(FamilySpec::log_growth(), 2);
    CHECK(lg[0] == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    CHECK(lg[1] == doctest::Approx(std::log(4.0)).epsilon(1e-15));

    const auto se = families::weights(FamilySpec::stretched_exp(2.0, 0.5), 2);
    CHECK(se[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(se[1] == doctest::Approx(std::exp(-2.0 * std::sqrt(2.0))).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(FamilySpec::zipf(0.0), ConfigError);
    CHECK_THROWS_AS(FamilySpec::zipf(-1.0), ConfigError);
    CHECK_THROWS_AS(FamilySpec::stretched_exp(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(FamilySpec::stretched_exp(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(FamilySpec::log_growth(2), ConfigError);
    CHECK_THROWS_AS(FamilySpec::log_log_growth(0.0), ConfigError);
    CHECK_THROWS_AS(FamilySpec::explicit_list({}), ConfigError);
    CHECK_THROWS_AS(FamilySpec::explicit_list({1.0, -2.0}), ConfigError);
    CHECK_THROWS_AS(families::weights(FamilySpec::factorial(), 200), ConfigError);
    CHECK_THROWS_AS(families::weights(FamilySpec::geometric(2.0), 400), ConfigError);
    CHECK_NOTHROW(families::log_weights(FamilySpec::factorial(), 200));
    CHECK_THROWS_AS(families::weights(FamilySpec::equal(), 0), ConfigError);
}

TEST_CASE("normalize basics") {
    const auto half = families::normalize({1.0, 1.0});
    CHECK(half.p[0] == 0.5);
    CHECK(half.p[1] == 0.5);

    // A_3 = 11/6 by hand: (6/11, 3/11, 2/11)
    const auto z = families::normalize({1.0, 0.5, 1.0 / 3.0});
    CHECK(z.p[0] == doctest::Approx(6.0 / 11.0).epsilon(1e-15));
    CHECK(z.p[1] == doctest::Approx(3.0 / 11.0).epsilon(1e-15));
    CHECK(z.p[2] == doctest::Approx(2.0 / 11.0).epsilon(1e-15));

    CHECK_THROWS_AS(families::normalize({}), ConfigError);
    CHECK_THROWS_AS(families::normalize({1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(families::normalize({1.0, -1.0}), ConfigError);
}

TEST_CASE("growing exponentials and their decaying mirror give the same coupons") {
    // e^{pk} for k=1..3 vs (e^{-2p}, e^{-p}, 1): proportional term lists
    const double p = 1.0;
    const auto grow = families::normalize({std::exp(p), std::exp(2 * p), std::exp(3 * p)});
    const auto decay = families::normalize({std::exp(-2 * p), std::exp(-p), 1.0});
    for (int i = 0; i < 3; ++i)
        CHECK(grow.p[(std::size_t)i] == doctest::Approx(decay.p[(std::size_t)i]).epsilon(1e-15));
}

TEST_CASE("scale invariance of normalize") {
    simulate::Rng rng = simulate::stream_for(99, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + (std::size_t)rng.bounded(40);
        std::vector<double> w(n);
        for (double& x : w) x = 1e-3 + rng.unit() * 10.0;
        const auto base = families::normalize(w);
        for (const double s : {1e-6, 1.0, 1e6}) {
            std::vector<double> ws(w);
            for (double& x : ws) x *= s;
            const auto scaled = families::normalize(ws);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(scaled.p[i] - base.p[i]) <= 1e-15 * (1.0 + base.p[i]));
        }
    }
}

TEST_CASE("monotonicity of the generated weights") {
    const auto zipf = families::weights(FamilySpec::zipf(0.7), 50);
    for (std::size_t i = 1; i < zipf.size(); ++i) CHECK(zipf[i] < zipf[i - 1]);
    for (const auto& spec :
         {FamilySpec::linear(), FamilySpec::power(1.7), FamilySpec::geometric(0.3)}) {
        const auto w = families::weights(spec, 50);
        for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
    }
}

TEST_CASE("equal family probabilities") {
    // power-of-two N divides exactly in binary
    const auto p16 = families::probabilities(FamilySpec::equal(), 16);
    for (double x : p16.p) CHECK(x == 1.0 / 16.0);
    const auto p10 = families::probabilities(FamilySpec::equal(), 10);
    for (double x : p10.p) CHECK(std::abs(x - 0.1) <= 1e-16);
}

TEST_CASE("log-sum-exp path for extreme weight ranges") {
    // factorial weights cross |ln a| > 600 around 151!
    const auto p = families::probabilities(FamilySpec::factorial(), 150);
    double s = 0.0;
    for (double x : p.p) {
        CHECK(x > 0.0);
        s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    // ratio of consecutive factorial probabilities is the index
    CHECK(p.p[9] / p.p[8] == doctest::Approx(10.0).epsilon(1e-9));

    const auto g = families::probabilities(FamilySpec::geometric(1.0), 700);
    CHECK(g.p.back() > g.p.front());
    CHECK(g.p.front() > 0.0);

    // far past the double range the rare coupons underflow: refuse
    CHECK_THROWS_AS(families::probabilities(FamilySpec::factorial(), 400), ConfigError);
    CHECK_THROWS_AS(families::probabilities(FamilySpec::geometric(1.0), 800), ConfigError);
}

TEST_CASE("json round trip and errors") {
    const auto spec =
        FamilySpec::from_json(nlohmann::json{{"kind", "zipf"}, {"p", 1.0}, {"start", 1}});
    CHECK(spec.kind == families::FamilyKind::ZipfDecay);
    CHECK(spec.p == 1.0);
    const auto back = FamilySpec::from_json(spec.to_json());
    CHECK(back.kind == spec.kind);
    CHECK(back.p == spec.p);

    const auto ll = FamilySpec::from_json(nlohmann::json{{"kind", "loglog"}, {"c", 2.0}});
    CHECK(ll.start_index == 3);  // log families default to the k >= 3 range

    CHECK_THROWS_AS(FamilySpec::from_json(nlohmann::json{{"kind", "nope"}}), ConfigError);
    CHECK_THROWS_AS(FamilySpec::from_json(nlohmann::json{{"kind", "zipf"}}), ConfigError);
    CHECK_THROWS_AS(FamilySpec::from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("ProbVector::checked enforces the invariants") {
    CHECK_THROWS_AS(families::ProbVector::checked({0.5, 0.4}), ConfigError);
    CHECK_THROWS_AS(families::ProbVector::checked({0.5, 0.5, 0.1}), ConfigError);
    CHECK_NOTHROW(families::ProbVector::checked({0.25, 0.25, 0.5}));
}
