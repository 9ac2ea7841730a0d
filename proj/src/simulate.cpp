#include "sibling/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "sibling/errors.hpp"
#include "sibling/parallel.hpp"

namespace sibling::simulate {

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

bool all_equal(const std::vector<double>& p) {
    const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    return *mx - *mn <= 1e-15;
}

}  // namespace

std::uint64_t Rng::next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::unit() { return (double)(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::bounded(std::uint64_t n) {
    // Lemire multiply-shift with rejection: exactly uniform on [0, n)
    unsigned __int128 m = (unsigned __int128)next() * n;
    std::uint64_t lo = (std::uint64_t)m;
    if (lo < n) {
        const std::uint64_t cutoff = (0 - n) % n;  // 2^64 mod n
        while (lo < cutoff) {
            m = (unsigned __int128)next() * n;
            lo = (std::uint64_t)m;
        }
    }
    return (std::uint64_t)(m >> 64);
}

Rng stream_for(std::uint64_t seed, std::uint64_t replication) {
    return Rng{mix64(seed ^ 0xa0761d6478bd642fULL) ^
               mix64(replication * 0xe7037ed1a0b428dbULL + 0x8ebc6af09c88c6e3ULL)};
}

AliasTable::AliasTable(const std::vector<double>& p) {
    const std::size_t n = p.size();
    if (n == 0) throw ConfigError("AliasTable: empty distribution");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = p[i] * (double)n;
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back((std::uint32_t)i);
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::uint32_t AliasTable::sample(Rng& rng) const {
    const std::uint32_t i = (std::uint32_t)rng.bounded(prob_.size());
    return rng.unit() < prob_[i] ? i : alias_[i];
}

CollectionOutcome run_once(const families::ProbVector& pv, Rng& rng) {
    const std::size_t n = pv.size();
    CollectionOutcome out;
    out.counts.assign(n, 0);
    std::size_t remaining = n;
    if (all_equal(pv.p)) {
        while (remaining > 0) {
            const std::size_t idx = (std::size_t)rng.bounded(n);
            if (++out.t > kDrawCap) throw CapExceeded("run_once: draw cap exceeded");
            if (out.counts[idx]++ == 0) --remaining;
        }
        return out;
    }
    const AliasTable table(pv.p);
    while (remaining > 0) {
        const std::size_t idx = table.sample(rng);
        if (++out.t > kDrawCap) throw CapExceeded("run_once: draw cap exceeded");
        if (out.counts[idx]++ == 0) --remaining;
    }
    return out;
}

std::vector<std::uint64_t> unfilled_from_counts(const CollectionOutcome& outcome, int j_max) {
    if (j_max < 2) throw ConfigError("unfilled_from_counts: j_max must be >= 2");
    std::vector<std::uint64_t> u((std::size_t)j_max - 1, 0);
    for (const std::uint64_t c : outcome.counts)
        for (int j = 2; j <= j_max; ++j)
            if (c < (std::uint64_t)j) ++u[(std::size_t)j - 2];
    return u;
}

SimEstimate estimate(const families::ProbVector& pv, int j_max, std::uint64_t reps,
                     std::uint64_t seed, int threads) {
    if (j_max < 2) throw ConfigError("estimate: j_max must be >= 2");
    if (reps < 2) throw ConfigError("estimate: reps must be >= 2 for standard errors");
    const std::size_t n = pv.size();
    const int nu = j_max - 1;
    const bool equal = all_equal(pv.p);
    const AliasTable table(pv.p);  // built once; equal path bypasses it

    struct Acc {
        unsigned __int128 t = 0, t2 = 0;
        std::vector<unsigned __int128> u, u2;
    };
    const std::size_t grain = 256;
    const std::size_t chunks = (reps + grain - 1) / grain;
    std::vector<Acc> accs(chunks);
    std::string error_msg;
    std::mutex err_mu;

    parallel_chunks(reps, grain, threads, [&](std::size_t ci, std::size_t b, std::size_t e) {
        Acc acc;
        acc.u.assign((std::size_t)nu, 0);
        acc.u2.assign((std::size_t)nu, 0);
        std::vector<std::uint32_t> counts(n);
        std::vector<std::uint32_t> ucnt((std::size_t)nu);
        try {
            for (std::size_t rep = b; rep < e; ++rep) {
                Rng rng = stream_for(seed, rep);
                std::fill(counts.begin(), counts.end(), 0u);
                std::fill(ucnt.begin(), ucnt.end(), 0u);
                std::size_t remaining = n;
                std::uint64_t t = 0;
                while (remaining > 0) {
                    const std::size_t idx =
                        equal ? (std::size_t)rng.bounded(n) : (std::size_t)table.sample(rng);
                    if (++t > kDrawCap) throw CapExceeded("estimate: draw cap exceeded");
                    std::uint32_t& c = counts[idx];
                    if (c == 0) --remaining;
                    if (c != UINT32_MAX) ++c;
                }
                for (const std::uint32_t c : counts)
                    for (int j = 2; j <= j_max; ++j)
                        if (c < (std::uint32_t)j) ++ucnt[(std::size_t)j - 2];
                acc.t += t;
                acc.t2 += (unsigned __int128)t * t;
                for (int k = 0; k < nu; ++k) {
                    acc.u[(std::size_t)k] += ucnt[(std::size_t)k];
                    acc.u2[(std::size_t)k] +=
                        (unsigned __int128)ucnt[(std::size_t)k] * ucnt[(std::size_t)k];
                }
            }
            accs[ci] = std::move(acc);
        } catch (const std::exception& ex) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (error_msg.empty()) error_msg = ex.what();
        }
    });
    if (!error_msg.empty()) throw CapExceeded(error_msg);

    Acc total;
    total.u.assign((std::size_t)nu, 0);
    total.u2.assign((std::size_t)nu, 0);
    for (const Acc& a : accs) {
        if (a.u.size() != (std::size_t)nu) continue;  // untouched trailing chunk
        total.t += a.t;
        total.t2 += a.t2;
        for (int k = 0; k < nu; ++k) {
            total.u[(std::size_t)k] += a.u[(std::size_t)k];
            total.u2[(std::size_t)k] += a.u2[(std::size_t)k];
        }
    }

    const auto stats = [&](unsigned __int128 s, unsigned __int128 s2, double& mean, double& se,
                           double& var) {
        const long double r = (long double)reps;
        const long double m = (long double)s / r;
        const long double v = ((long double)s2 - (long double)s * m) / (r - 1.0L);
        mean = (double)m;
        var = (double)std::max(0.0L, v);
        se = std::sqrt(var / (double)reps);
    };
    SimEstimate est;
    est.reps = reps;
    est.seed = seed;
    est.j_max = j_max;
    est.mean_u.resize((std::size_t)nu);
    est.se_u.resize((std::size_t)nu);
    est.var_u.resize((std::size_t)nu);
    double var_t = 0.0;
    stats(total.t, total.t2, est.mean_t, est.se_t, var_t);
    for (int k = 0; k < nu; ++k)
        stats(total.u[(std::size_t)k], total.u2[(std::size_t)k], est.mean_u[(std::size_t)k],
              est.se_u[(std::size_t)k], est.var_u[(std::size_t)k]);
    return est;
}

}  // namespace sibling::simulate
