#include "sievelab/sieve_weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sievelab/arith.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

unsigned SieveWeights::max_depth() const {
    if (construction == Construction::brun) return trunc_order;
    return static_cast<unsigned>(range_primes.size());
}

bool SieveWeights::extend_ok(long double q_so_far, uint64_t p, unsigned new_depth) const {
    const long double ld_y = static_cast<long double>(y);
    const long double q2 = q_so_far * static_cast<long double>(p);
    if (!(q2 < ld_y)) return false;
    if (construction == Construction::brun) return new_depth <= trunc_order;
    const bool odd = (new_depth & 1) != 0;
    const bool checked = (parity == Parity::upper) ? odd : !odd;
    if (!checked) return true;
    const long double p3 = static_cast<long double>(p) * p * p;
    return q_so_far * p3 < ld_y;
}

namespace {

// DFS over range primes in decreasing order; emits every admissible q with
// xi = mu(q). `idx` indexes into the descending prime list.
void dfs(const SieveWeights& w, const std::vector<uint64_t>& desc, size_t idx, uint64_t q,
         unsigned depth, int sign, const std::function<void(uint64_t, int)>& emit) {
    for (size_t i = idx; i < desc.size(); ++i) {
        const uint64_t p = desc[i];
        if (!w.extend_ok(static_cast<long double>(q), p, depth + 1)) continue;
        const uint64_t q2 = q * p;
        emit(q2, -sign);
        dfs(w, desc, i + 1, q2, depth + 1, -sign, emit);
    }
}

unsigned brun_truncation(double z, double y, Parity parity, bool* degenerate) {
    // largest t of the required parity with z^t <= y
    unsigned t = 0;
    const long double lz = static_cast<long double>(z);
    long double power = 1.0L;
    while (power * lz <= static_cast<long double>(y) * (1.0L + 1e-12L) && t < 64) {
        power *= lz;
        ++t;
    }
    const bool want_odd = (parity == Parity::lower);
    if ((t & 1u) != static_cast<unsigned>(want_odd)) {
        if (t == 0) {
            *degenerate = true;  // lower parity, no odd t fits
            return 0;
        }
        --t;
    }
    if (want_odd && t == 0) *degenerate = true;
    return t;
}

}  // namespace

SieveWeights build_weights(double z, double y, std::span<const uint64_t> excluded, Parity parity,
                           Construction construction, uint64_t max_support) {
    if (!(z >= 2.0)) throw std::invalid_argument("build_weights: z >= 2");
    if (!(y >= z)) throw std::invalid_argument("build_weights: level y must be >= z");
    SieveWeights w;
    w.z = z;
    w.y = y;
    w.parity = parity;
    w.construction = construction;
    w.excluded.assign(excluded.begin(), excluded.end());
    std::sort(w.excluded.begin(), w.excluded.end());
    w.excluded.erase(std::unique(w.excluded.begin(), w.excluded.end()), w.excluded.end());
    for (uint64_t p : w.excluded)
        if (!is_prime(p)) throw std::invalid_argument("build_weights: exclusion set must be prime");

    const uint64_t below = (z <= 2.0) ? 0 : static_cast<uint64_t>(std::ceil(z)) - 1;
    for (uint64_t p : sieve_primes(below)) {
        if (static_cast<double>(p) >= z) continue;
        if (std::binary_search(w.excluded.begin(), w.excluded.end(), p)) continue;
        w.range_primes.push_back(p);
    }

    if (construction == Construction::brun)
        w.trunc_order = brun_truncation(z, y, parity, &w.degenerate);

    // count the support; materialize when it fits
    uint64_t count = 0;
    for_each_weight(w, [&](uint64_t, int) { ++count; });
    w.count_q = count;
    if (count <= max_support) {
        w.support.reserve(count);
        for_each_weight(w, [&](uint64_t q, int xi) {
            w.support.emplace_back(q, static_cast<int8_t>(xi));
        });
        std::sort(w.support.begin(), w.support.end());
        w.materialized = true;
    }
    return w;
}

void for_each_weight(const SieveWeights& w, const std::function<void(uint64_t, int)>& emit) {
    emit(1, 1);
    std::vector<uint64_t> desc(w.range_primes.rbegin(), w.range_primes.rend());
    dfs(w, desc, 0, 1, 0, 1, emit);
}

double theta(uint64_t m, const SieveWeights& w) {
    if (m == 0) throw std::invalid_argument("theta: m >= 1");
    // only the distinct range primes dividing m matter
    std::vector<uint64_t> divs;
    for (uint64_t p : w.range_primes)
        if (m % p == 0) divs.push_back(p);
    std::reverse(divs.begin(), divs.end());
    double total = 1.0;  // q = 1
    // DFS restricted to divs
    std::function<void(size_t, uint64_t, unsigned, int)> rec = [&](size_t idx, uint64_t q,
                                                                   unsigned depth, int sign) {
        for (size_t i = idx; i < divs.size(); ++i) {
            const uint64_t p = divs[i];
            if (!w.extend_ok(static_cast<long double>(q), p, depth + 1)) continue;
            total += -sign;
            rec(i + 1, q * p, depth + 1, -sign);
        }
    };
    rec(0, 1, 0, 1);
    return total;
}

std::vector<int32_t> theta_table(const SieveWeights& w, uint64_t n, int threads) {
    std::vector<int32_t> th(static_cast<size_t>(n) + 1, 0);
    if (n == 0) return th;
    if (w.materialized) {
        parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
            const uint64_t hi = hi_excl - 1;
            for (const auto& [q, xi] : w.support) {
                if (q > hi) break;
                for (uint64_t m = ((lo + q - 1) / q) * q; m <= hi; m += q) th[m] += xi;
            }
        });
    } else {
        for_each_weight(w, [&](uint64_t q, int xi) {
            for (uint64_t m = q; m <= n; m += q) th[m] += xi;
        });
    }
    return th;
}

std::vector<uint8_t> coprime_indicator(const SieveWeights& w, uint64_t n) {
    std::vector<uint8_t> ind(static_cast<size_t>(n) + 1, 1);
    if (n == 0) return ind;
    ind[0] = 0;
    for (uint64_t p : w.range_primes)
        for (uint64_t m = p; m <= n; m += p) ind[m] = 0;
    return ind;
}

std::vector<ThetaViolation> verify_theta_nonneg(const SieveWeights& w, uint64_t n, int threads) {
    if (w.parity != Parity::upper)
        throw std::invalid_argument("verify_theta_nonneg: upper parity required");
    const std::vector<int32_t> th = theta_table(w, n, threads);
    std::vector<ThetaViolation> out;
    for (uint64_t m = 1; m <= n; ++m)
        if (th[m] < 0) out.push_back({m, th[m]});
    return out;
}

MonotonicityProbe theta_monotonicity_probe(uint64_t a, uint64_t b, const SieveWeights& w) {
    if (a == 0 || b == 0) throw std::invalid_argument("theta_monotonicity_probe: a, b >= 1");
    uint64_t ab = 0;
    if (__builtin_mul_overflow(a, b, &ab))
        throw std::range_error("theta_monotonicity_probe: a*b overflows");
    MonotonicityProbe probe;
    probe.lhs = theta(ab, w);
    std::vector<uint64_t> excl = w.excluded;
    for (const auto& [p, e] : factorize(b)) {
        (void)e;
        excl.push_back(p);
    }
    const SieveWeights w2 = build_weights(w.z, w.y, excl, w.parity, w.construction);
    probe.rhs = theta(a, w2);
    probe.holds = probe.lhs <= probe.rhs + 1e-12;
    return probe;
}

}  // namespace sievelab
