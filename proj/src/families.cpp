#include "sibling/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sibling/errors.hpp"

namespace sibling::families {

namespace {

constexpr std::size_t kExplicitCap = 10'000'000;  // desk-scale memory budget

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

double kahan_sum(const std::vector<double>& v) {
    double s = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

FamilySpec FamilySpec::equal() { return FamilySpec{FamilyKind::Equal, 0, 0, 0, 1, {}}; }

FamilySpec FamilySpec::zipf(double p, long start) {
    require(p > 0, "zipf: exponent p must be positive");
    require(start >= 1, "zipf: start index must be >= 1");
    return FamilySpec{FamilyKind::ZipfDecay, p, 0, 0, start, {}};
}

FamilySpec FamilySpec::stretched_exp(double p, double q, long start) {
    require(p > 0, "stretched_exp: rate p must be positive");
    require(q > 0 && q < 1, "stretched_exp: q must lie in (0,1)");
    require(start >= 1, "stretched_exp: start index must be >= 1");
    return FamilySpec{FamilyKind::StretchedExpDecay, p, q, 0, start, {}};
}

FamilySpec FamilySpec::linear(long start) {
    require(start >= 1, "linear: start index must be >= 1");
    return FamilySpec{FamilyKind::Linear, 0, 0, 0, start, {}};
}

FamilySpec FamilySpec::power(double p, long start) {
    require(p > 0, "power: exponent p must be positive");
    require(start >= 1, "power: start index must be >= 1");
    return FamilySpec{FamilyKind::Power, p, 0, 0, start, {}};
}

FamilySpec FamilySpec::geometric(double p, long start) {
    require(p > 0, "geometric: rate p must be positive");
    require(start >= 1, "geometric: start index must be >= 1");
    return FamilySpec{FamilyKind::GeometricGrowth, p, 0, 0, start, {}};
}

FamilySpec FamilySpec::log_growth(long start) {
    require(start >= 3, "log_growth: start index must be >= 3");
    return FamilySpec{FamilyKind::LogGrowth, 0, 0, 0, start, {}};
}

FamilySpec FamilySpec::log_log_growth(double c, long start) {
    require(c > 0, "log_log_growth: c must be positive");
    require(start >= 3, "log_log_growth: start index must be >= 3");
    return FamilySpec{FamilyKind::LogLogGrowth, 0, 0, c, start, {}};
}

FamilySpec FamilySpec::factorial(long start) {
    require(start >= 1, "factorial: start index must be >= 1");
    return FamilySpec{FamilyKind::Factorial, 0, 0, 0, start, {}};
}

FamilySpec FamilySpec::explicit_list(std::vector<double> values) {
    require(!values.empty(), "explicit: list must be nonempty");
    require(values.size() <= kExplicitCap, "explicit: list exceeds 1e7 entries");
    for (double v : values)
        require(v > 0 && std::isfinite(v), "explicit: entries must be positive finite");
    FamilySpec s{FamilyKind::Explicit, 0, 0, 0, 1, {}};
    s.values = std::move(values);
    return s;
}

bool FamilySpec::decaying() const {
    return kind == FamilyKind::ZipfDecay || kind == FamilyKind::StretchedExpDecay;
}

bool FamilySpec::growing() const {
    switch (kind) {
        case FamilyKind::Linear:
        case FamilyKind::Power:
        case FamilyKind::GeometricGrowth:
        case FamilyKind::LogGrowth:
        case FamilyKind::LogLogGrowth:
        case FamilyKind::Factorial:
            return true;
        default:
            return false;
    }
}

std::string FamilySpec::name() const {
    switch (kind) {
        case FamilyKind::Equal: return "equal";
        case FamilyKind::ZipfDecay: return "zipf";
        case FamilyKind::StretchedExpDecay: return "stretched_exp";
        case FamilyKind::Linear: return "linear";
        case FamilyKind::Power: return "power";
        case FamilyKind::GeometricGrowth: return "geometric";
        case FamilyKind::LogGrowth: return "log";
        case FamilyKind::LogLogGrowth: return "loglog";
        case FamilyKind::Factorial: return "factorial";
        case FamilyKind::Explicit: return "explicit";
    }
    return "?";
}

FamilySpec FamilySpec::from_json(const nlohmann::json& j) {
    require(j.is_object(), "family: expected a JSON object");
    require(j.contains("kind"), "family: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    const auto num = [&](const char* key) -> double {
        require(j.contains(key), "family: missing numeric parameter");
        return j.at(key).get<double>();
    };
    const long start = j.value("start", kind == "log" || kind == "loglog" ? 3L : 1L);
    if (kind == "equal") return equal();
    if (kind == "zipf") return zipf(num("p"), start);
    if (kind == "stretched_exp") return stretched_exp(num("p"), num("q"), start);
    if (kind == "linear") return linear(start);
    if (kind == "power") return power(num("p"), start);
    if (kind == "geometric") return geometric(num("p"), start);
    if (kind == "log") return log_growth(start);
    if (kind == "loglog") return log_log_growth(num("c"), start);
    if (kind == "factorial") return factorial(start);
    if (kind == "explicit") {
        require(j.contains("values") && j.at("values").is_array(),
                "explicit: missing \"values\" array");
        return explicit_list(j.at("values").get<std::vector<double>>());
    }
    throw ConfigError("family: unknown kind \"" + kind + "\"");
}

nlohmann::json FamilySpec::to_json() const {
    nlohmann::json j{{"kind", name()}, {"start", start_index}};
    switch (kind) {
        case FamilyKind::ZipfDecay:
        case FamilyKind::Power:
        case FamilyKind::GeometricGrowth:
            j["p"] = p;
            break;
        case FamilyKind::StretchedExpDecay:
            j["p"] = p;
            j["q"] = q;
            break;
        case FamilyKind::LogLogGrowth:
            j["c"] = c;
            break;
        case FamilyKind::Explicit:
            j["values"] = values;
            break;
        default:
            break;
    }
    return j;
}

double log_weight(const FamilySpec& spec, long k) {
    switch (spec.kind) {
        case FamilyKind::Equal: return 0.0;
        case FamilyKind::ZipfDecay: return -spec.p * std::log((double)k);
        case FamilyKind::StretchedExpDecay: return -spec.p * std::pow((double)k, spec.q);
        case FamilyKind::Linear: return std::log((double)k);
        case FamilyKind::Power: return spec.p * std::log((double)k);
        case FamilyKind::GeometricGrowth: return spec.p * (double)k;
        case FamilyKind::LogGrowth: return std::log(std::log((double)k));
        case FamilyKind::LogLogGrowth: {
            const double lk = std::log((double)k);
            return std::log(lk + spec.c * std::log(lk));
        }
        case FamilyKind::Factorial: return std::lgamma((double)k + 1.0);
        case FamilyKind::Explicit: {
            const long idx = k - spec.start_index;
            if (idx < 0 || idx >= (long)spec.values.size())
                throw ConfigError("explicit: index out of range");
            return std::log(spec.values[(std::size_t)idx]);
        }
    }
    throw ConfigError("log_weight: bad kind");
}

std::vector<double> weights(const FamilySpec& spec, std::size_t N) {
    if (N < 1) throw ConfigError("weights: N must be >= 1");
    const long last = spec.start_index + (long)N - 1;
    if (spec.kind == FamilyKind::Factorial && last > 170)
        throw ConfigError("factorial: weights overflow double beyond 170!; use log_weights");
    if (spec.kind == FamilyKind::GeometricGrowth && spec.p * (double)last > 709.0)
        throw ConfigError("geometric: weights overflow double; use log_weights");
    if (spec.kind == FamilyKind::Explicit) {
        if (N > spec.values.size()) throw ConfigError("explicit: N exceeds list length");
        return std::vector<double>(spec.values.begin(), spec.values.begin() + (long)N);
    }
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) {
        const long k = spec.start_index + (long)i;
        switch (spec.kind) {
            case FamilyKind::Equal: w[i] = 1.0; break;
            case FamilyKind::ZipfDecay: w[i] = std::pow((double)k, -spec.p); break;
            case FamilyKind::StretchedExpDecay:
                w[i] = std::exp(-spec.p * std::pow((double)k, spec.q));
                break;
            case FamilyKind::Linear: w[i] = (double)k; break;
            case FamilyKind::Power: w[i] = std::pow((double)k, spec.p); break;
            case FamilyKind::GeometricGrowth: w[i] = std::exp(spec.p * (double)k); break;
            case FamilyKind::LogGrowth: w[i] = std::log((double)k); break;
            case FamilyKind::LogLogGrowth: {
                const double lk = std::log((double)k);
                w[i] = lk + spec.c * std::log(lk);
                break;
            }
            case FamilyKind::Factorial: w[i] = std::exp(std::lgamma((double)k + 1.0)); break;
            case FamilyKind::Explicit: break;  // handled above
        }
        if (!(w[i] > 0) || !std::isfinite(w[i]))
            throw ConfigError("weights: generated a nonpositive or non-finite weight");
    }
    return w;
}

std::vector<double> log_weights(const FamilySpec& spec, std::size_t N) {
    if (N < 1) throw ConfigError("log_weights: N must be >= 1");
    if (spec.kind == FamilyKind::Explicit && N > spec.values.size())
        throw ConfigError("explicit: N exceeds list length");
    std::vector<double> lw(N);
    for (std::size_t i = 0; i < N; ++i)
        lw[i] = log_weight(spec, spec.start_index + (long)i);
    return lw;
}

ProbVector ProbVector::checked(std::vector<double> p) {
    if (p.empty()) throw ConfigError("ProbVector: empty");
    for (double x : p)
        if (!(x > 0) || !std::isfinite(x))
            throw ConfigError("ProbVector: entries must be positive finite");
    const double s = kahan_sum(p);
    if (std::abs(s - 1.0) > 1e-12)
        throw ConfigError("ProbVector: entries do not sum to 1 within 1e-12");
    ProbVector out;
    out.p = std::move(p);
    return out;
}

ProbVector normalize(const std::vector<double>& w) {
    if (w.empty()) throw ConfigError("normalize: empty weight list");
    for (double x : w)
        if (!(x > 0) || !std::isfinite(x))
            throw ConfigError("normalize: weights must be positive finite");
    const double total = kahan_sum(w);
    if (!std::isfinite(total)) throw ConfigError("normalize: weight sum overflows");
    std::vector<double> p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] / total;
    // one correction pass keeps the sum at 1 independent of N
    const double s = kahan_sum(p);
    if (std::abs(s - 1.0) > 5e-16)
        for (double& x : p) x /= s;
    return ProbVector::checked(std::move(p));
}

ProbVector normalize_log(const std::vector<double>& log_w) {
    if (log_w.empty()) throw ConfigError("normalize_log: empty weight list");
    const double m = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(m)) throw ConfigError("normalize_log: non-finite log-weight");
    double s = 0.0, comp = 0.0;
    for (double lw : log_w) {
        const double y = std::exp(lw - m) - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    const double log_total = m + std::log(s);
    std::vector<double> p(log_w.size());
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        p[i] = std::exp(log_w[i] - log_total);
        if (p[i] <= 0.0)
            throw ConfigError(
                "normalize_log: a probability underflowed double; reduce N or rescale");
    }
    const double ps = kahan_sum(p);
    if (std::abs(ps - 1.0) > 5e-16)
        for (double& x : p) x /= ps;
    return ProbVector::checked(std::move(p));
}

ProbVector probabilities(const FamilySpec& spec, std::size_t N) {
    const std::vector<double> lw = log_weights(spec, N);
    const bool extreme = std::any_of(lw.begin(), lw.end(),
                                     [](double x) { return std::abs(x) > 600.0; });
    if (extreme) return normalize_log(lw);
    return normalize(weights(spec, N));
}

}  // namespace sibling::families
