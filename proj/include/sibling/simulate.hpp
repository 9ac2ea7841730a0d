#pragma once
#include <cstdint>
#include <vector>

#include "sibling/families.hpp"

namespace sibling::simulate {

// 64-bit splittable generator: per-replication streams are derived from
// (seed, replication_index) by avalanche mixing, so replications are
// independent of scheduling and thread count.
struct Rng {
    std::uint64_t state;
    std::uint64_t next();
    double unit();  // [0, 1) with 53 random bits
    std::uint64_t bounded(std::uint64_t n);
};
Rng stream_for(std::uint64_t seed, std::uint64_t replication);

// Walker alias table: O(N) setup, O(1) per draw.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& p);
    std::uint32_t sample(Rng& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

// One full collection run: draws until the main collector has all N types.
struct CollectionOutcome {
    std::uint64_t t = 0;                  // draws at completion
    std::vector<std::uint64_t> counts;    // per-type occurrences; min >= 1, sum == t
};

struct SimEstimate {
    std::uint64_t reps = 0;
    std::uint64_t seed = 0;
    int j_max = 2;
    double mean_t = 0.0, se_t = 0.0;
    std::vector<double> mean_u, se_u;    // index 0 <-> j = 2
    std::vector<double> var_u;           // sample variance (n-1 denominator)
};

// Hard guard against pathological probability vectors.
inline constexpr std::uint64_t kDrawCap = 10'000'000'000ULL;

CollectionOutcome run_once(const families::ProbVector& p, Rng& rng);

// Unfilled slots per album: U_j = #{types with fewer than j copies at
// completion}. Returns [U_2, ..., U_{j_max}], nondecreasing.
std::vector<std::uint64_t> unfilled_from_counts(const CollectionOutcome& outcome, int j_max);

// Seeded Monte Carlo estimate of E[T] and E[U_j], j = 2..j_max. All
// accumulators are exact integers, so results are bit-identical for a given
// (p, j_max, reps, seed) regardless of the thread count.
SimEstimate estimate(const families::ProbVector& p, int j_max, std::uint64_t reps,
                     std::uint64_t seed, int threads = 0);

}  // namespace sibling::simulate
