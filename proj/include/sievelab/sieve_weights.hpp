#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

// Combinatorial upper/lower-bound sieve weights xi_q of level y and range
// P(z) (product of primes p < z outside the exclusion set), with
// xi_1 = 1, |xi_q| <= 1, xi_q = 0 unless q | P(z) and q < y. Two
// constructions:
//   brun: xi_q = mu(q) on omega(q) <= t, t the largest integer of the
//         required parity (even for upper, odd for lower) with z^t <= y;
//   beta: the beta = 2 combinatorial sieve supports, q = p1...pk with
//         p1 > ... > pk and p1...p_{m-1} pm^3 < y for every odd m (upper)
//         resp. even m (lower), xi_q = mu(q).

namespace sievelab {

enum class Parity { upper, lower };
enum class Construction { brun, beta };

struct SieveWeights {
    double z = 2.0;
    double y = 2.0;
    Parity parity = Parity::upper;
    Construction construction = Construction::brun;
    std::vector<uint64_t> excluded;      // sorted primes removed from the range
    std::vector<uint64_t> range_primes;  // primes p < z, p not excluded, ascending
    unsigned trunc_order = 0;            // brun truncation t
    bool degenerate = false;             // lower parity with no admissible t

    uint64_t count_q = 0;  // support size including q = 1
    bool materialized = false;
    std::vector<std::pair<uint64_t, int8_t>> support;  // (q, xi), sorted by q

    unsigned max_depth() const;
    // May the path `q_so_far` (product of larger primes) be extended by p at
    // depth `new_depth` (1-based)?
    bool extend_ok(long double q_so_far, uint64_t p, unsigned new_depth) const;
};

// max_support caps materialization; larger supports stay enumeration-only
// (count_q is still exact) and can be walked with for_each_weight.
SieveWeights build_weights(double z, double y, std::span<const uint64_t> excluded, Parity parity,
                           Construction construction, uint64_t max_support = uint64_t{1} << 25);

// Streams every (q, xi_q) of the support, q = 1 first, then DFS over the
// range primes in decreasing order. Works whether or not the support was
// materialized.
void for_each_weight(const SieveWeights& w,
                     const std::function<void(uint64_t q, int xi)>& emit);

// theta(m) = sum_{q | m} xi_q.
double theta(uint64_t m, const SieveWeights& w);

// theta(1..n) as exact integers.
std::vector<int32_t> theta_table(const SieveWeights& w, uint64_t n, int threads = 1);

// 1 at m coprime to P(z), else 0, for m in [1, n].
std::vector<uint8_t> coprime_indicator(const SieveWeights& w, uint64_t n);

struct ThetaViolation {
    uint64_t m;
    int32_t theta;
};

// Scans m <= n for theta(m) < 0; requires upper parity. Expected empty.
std::vector<ThetaViolation> verify_theta_nonneg(const SieveWeights& w, uint64_t n,
                                                int threads = 1);

struct MonotonicityProbe {
    double lhs = 0;  // theta(ab) under w
    double rhs = 0;  // theta(a) under w with the primes of b also excluded
    bool holds = false;
};

MonotonicityProbe theta_monotonicity_probe(uint64_t a, uint64_t b, const SieveWeights& w);

}  // namespace sievelab
