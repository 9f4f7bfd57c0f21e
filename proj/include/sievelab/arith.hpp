#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

// Segmented sieving of the standard arithmetic functions over integer
// windows, and an exact Dirichlet-convolution engine. Everything downstream
// (character decompositions, sieve weights, experiment sums) sits on top of
// these tables.

namespace sievelab {

// 64-bit unsigned throughout; larger inputs are rejected up front.
inline constexpr uint64_t kMaxSupported = uint64_t{1} << 50;
inline constexpr uint64_t kDefaultSegment = uint64_t{1} << 22;

// Real-valued sequence on [1, hi]; index 0 is unused.
struct ArithSeq {
    uint64_t hi = 0;
    std::vector<double> v;

    ArithSeq() = default;
    explicit ArithSeq(uint64_t hi_) : hi(hi_), v(hi_ + 1, 0.0) {}

    double& operator[](uint64_t n) { return v[n]; }
    double operator[](uint64_t n) const { return v[n]; }
};

// Immutable tables of smallest prime factor, von Mangoldt, Moebius, divisor
// count and Euler phi over [lo, hi].
struct ArithWindow {
    uint64_t lo = 1, hi = 0;
    std::vector<uint64_t> spf;
    std::vector<double> lambda;  // log p at prime powers p^k, 0 elsewhere
    std::vector<int8_t> mu;
    std::vector<uint32_t> tau;
    std::vector<uint64_t> phi;

    size_t size() const { return static_cast<size_t>(hi - lo + 1); }
    size_t idx(uint64_t n) const { return static_cast<size_t>(n - lo); }

    uint64_t spf_at(uint64_t n) const { return spf[idx(n)]; }
    double lambda_at(uint64_t n) const { return lambda[idx(n)]; }
    int mu_at(uint64_t n) const { return mu[idx(n)]; }
    uint64_t tau_at(uint64_t n) const { return tau[idx(n)]; }
    uint64_t phi_at(uint64_t n) const { return phi[idx(n)]; }
};

// Primes <= limit by a simple sieve of Eratosthenes.
std::vector<uint64_t> sieve_primes(uint64_t limit);

// One window [lo, hi]; hi - lo must stay below `max_span`. When lo > 1 the
// base primes up to sqrt(hi) must be supplied.
ArithWindow build_window(uint64_t lo, uint64_t hi, std::span<const uint64_t> base_primes = {},
                         uint64_t max_span = kDefaultSegment);

// Full table on [1, n], assembled from segments; identical to a single-window
// build for every n (segmentation invariance).
ArithWindow build_table(uint64_t n, uint64_t segment = kDefaultSegment, int threads = 1);

// Just the von Mangoldt values on [0, n] (index 0 unused); much lighter than
// a full window when only Lambda is needed.
std::vector<double> mangoldt_table(uint64_t n, int threads = 1);

std::vector<int8_t> moebius_table(uint64_t n, int threads = 1);

// h(n) = sum_{de=n} f(d) g(e) on [1, N]; O(N log N) divisor loop.
ArithSeq dirichlet_convolve(const ArithSeq& f, const ArithSeq& g, int threads = 1);

// Number of ordered k-factorizations; multiplicative with
// tau_k(p^a) = binom(a+k-1, k-1).
uint64_t tau_k(uint64_t n, unsigned k);

// Trial-division factorization into (prime, exponent) pairs.
std::vector<std::pair<uint64_t, unsigned>> factorize(uint64_t n);

uint64_t euler_phi(uint64_t n);

// psi(v) = v / phi(v) >= 1.
double psi(uint64_t v);

bool is_prime(uint64_t n);

uint64_t binomial(uint64_t n, uint64_t k);  // throws on uint64 overflow

// Streams every prime <= limit in increasing order through a segmented
// odds-only bit sieve; memory stays a few MB even at limit = 1e8.
void for_each_prime(uint64_t limit, const std::function<void(uint64_t)>& fn);

}  // namespace sievelab
