#include "sievelab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sievelab/parallel.hpp"

namespace sievelab {

std::vector<uint64_t> sieve_primes(uint64_t limit) {
    std::vector<uint64_t> primes;
    if (limit < 2) return primes;
    if (limit > kMaxSupported) throw std::range_error("sieve_primes: limit above 2^50");
    std::vector<uint8_t> composite(static_cast<size_t>(limit) + 1, 0);
    for (uint64_t i = 2; i * i <= limit; ++i) {
        if (composite[i]) continue;
        for (uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    for (uint64_t i = 2; i <= limit; ++i)
        if (!composite[i]) primes.push_back(i);
    return primes;
}

namespace {

uint64_t isqrt(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Core segment fill shared by build_window / build_table. `primes` must
// cover every prime <= sqrt(hi).
void fill_segment(ArithWindow& w, std::span<const uint64_t> primes) {
    const size_t m = w.size();
    w.spf.assign(m, 0);
    w.lambda.assign(m, 0.0);
    w.mu.assign(m, 1);
    w.tau.assign(m, 1);
    w.phi.assign(m, 1);
    std::vector<uint64_t> rem(m);
    std::vector<uint8_t> distinct(m, 0);
    for (size_t i = 0; i < m; ++i) rem[i] = w.lo + i;

    const uint64_t root = isqrt(w.hi);
    for (uint64_t p : primes) {
        if (p > root) break;
        uint64_t start = ((w.lo + p - 1) / p) * p;
        if (start < p) start = p;
        for (uint64_t n = start; n <= w.hi; n += p) {
            const size_t i = w.idx(n);
            unsigned e = 0;
            uint64_t pe = 1;
            while (rem[i] % p == 0) {
                rem[i] /= p;
                ++e;
                pe *= p;
            }
            w.tau[i] *= (e + 1);
            w.phi[i] *= (pe / p) * (p - 1);
            w.mu[i] = (e >= 2) ? 0 : static_cast<int8_t>(-w.mu[i]);
            if (w.spf[i] == 0) w.spf[i] = p;
            ++distinct[i];
        }
    }
    for (size_t i = 0; i < m; ++i) {
        const uint64_t n = w.lo + i;
        if (n == 1) {
            w.spf[i] = 1;
            continue;
        }
        if (rem[i] > 1) {  // one prime factor above sqrt(hi) remains
            const uint64_t q = rem[i];
            w.tau[i] *= 2;
            w.phi[i] *= q - 1;
            w.mu[i] = (w.mu[i] == 0) ? 0 : static_cast<int8_t>(-w.mu[i]);
            if (w.spf[i] == 0) w.spf[i] = q;
            ++distinct[i];
        }
        if (distinct[i] == 1) w.lambda[i] = std::log(static_cast<double>(w.spf[i]));
    }
}

}  // namespace

ArithWindow build_window(uint64_t lo, uint64_t hi, std::span<const uint64_t> base_primes,
                         uint64_t max_span) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("build_window: need 1 <= lo <= hi");
    if (hi > kMaxSupported) throw std::range_error("build_window: hi above 2^50");
    if (hi - lo >= max_span) throw std::invalid_argument("build_window: segment too long");
    const uint64_t root = isqrt(hi);
    std::vector<uint64_t> own;
    std::span<const uint64_t> primes = base_primes;
    if (primes.empty()) {
        if (lo > 1) throw std::invalid_argument("build_window: lo > 1 requires base primes");
        own = sieve_primes(root);
        primes = own;
    } else if (root >= 2 && (primes.empty() || primes.back() * 2 < root)) {
        // Bertrand: a prime exists in (back, 2 back], so this table certainly
        // misses a prime <= sqrt(hi) and would corrupt every column.
        throw std::invalid_argument("build_window: base primes do not reach sqrt(hi)");
    }
    ArithWindow w;
    w.lo = lo;
    w.hi = hi;
    fill_segment(w, primes);
    return w;
}

ArithWindow build_table(uint64_t n, uint64_t segment, int threads) {
    if (n < 1) throw std::invalid_argument("build_table: n >= 1");
    if (n > kMaxSupported) throw std::range_error("build_table: n above 2^50");
    if (segment == 0) segment = kDefaultSegment;
    ArithWindow out;
    out.lo = 1;
    out.hi = n;
    const size_t m = static_cast<size_t>(n);
    out.spf.resize(m);
    out.lambda.resize(m);
    out.mu.resize(m);
    out.tau.resize(m);
    out.phi.resize(m);
    const std::vector<uint64_t> base = sieve_primes(isqrt(n));
    parallel_for(1, n + 1, segment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        ArithWindow seg;
        seg.lo = lo;
        seg.hi = hi_excl - 1;
        fill_segment(seg, base);
        const size_t off = static_cast<size_t>(lo - 1);
        std::copy(seg.spf.begin(), seg.spf.end(), out.spf.begin() + off);
        std::copy(seg.lambda.begin(), seg.lambda.end(), out.lambda.begin() + off);
        std::copy(seg.mu.begin(), seg.mu.end(), out.mu.begin() + off);
        std::copy(seg.tau.begin(), seg.tau.end(), out.tau.begin() + off);
        std::copy(seg.phi.begin(), seg.phi.end(), out.phi.begin() + off);
    });
    return out;
}

std::vector<double> mangoldt_table(uint64_t n, int threads) {
    if (n > kMaxSupported) throw std::range_error("mangoldt_table: n above 2^50");
    std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
    if (n < 2) return out;
    const std::vector<uint64_t> base = sieve_primes(isqrt(n));
    parallel_for(2, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        const size_t m = static_cast<size_t>(hi - lo + 1);
        std::vector<uint64_t> rem(m);
        std::vector<uint64_t> first(m, 0);
        std::vector<uint8_t> multi(m, 0);
        for (size_t i = 0; i < m; ++i) rem[i] = lo + i;
        for (uint64_t p : base) {
            if (p * p > hi) break;
            uint64_t start = ((lo + p - 1) / p) * p;
            if (start < p) start = p;
            for (uint64_t x = start; x <= hi; x += p) {
                const size_t i = static_cast<size_t>(x - lo);
                while (rem[i] % p == 0) rem[i] /= p;
                if (first[i] == 0)
                    first[i] = p;
                else
                    multi[i] = 1;
            }
        }
        for (size_t i = 0; i < m; ++i) {
            if (multi[i]) continue;
            if (rem[i] > 1) {
                if (first[i] != 0) continue;  // two distinct factors
                first[i] = rem[i];
            }
            out[lo + i] = std::log(static_cast<double>(first[i]));
        }
    });
    return out;
}

std::vector<int8_t> moebius_table(uint64_t n, int threads) {
    if (n > kMaxSupported) throw std::range_error("moebius_table: n above 2^50");
    std::vector<int8_t> out(static_cast<size_t>(n) + 1, 0);
    if (n >= 1) out[1] = 1;
    if (n < 2) return out;
    const std::vector<uint64_t> base = sieve_primes(isqrt(n));
    parallel_for(2, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        const size_t m = static_cast<size_t>(hi - lo + 1);
        std::vector<uint64_t> rem(m);
        std::vector<int8_t> mu(m, 1);
        for (size_t i = 0; i < m; ++i) rem[i] = lo + i;
        for (uint64_t p : base) {
            if (p * p > hi) break;
            uint64_t start = ((lo + p - 1) / p) * p;
            if (start < p) start = p;
            for (uint64_t x = start; x <= hi; x += p) {
                const size_t i = static_cast<size_t>(x - lo);
                unsigned e = 0;
                while (rem[i] % p == 0) {
                    rem[i] /= p;
                    ++e;
                }
                mu[i] = (e >= 2) ? 0 : static_cast<int8_t>(-mu[i]);
            }
        }
        for (size_t i = 0; i < m; ++i) {
            if (rem[i] > 1 && mu[i] != 0) mu[i] = static_cast<int8_t>(-mu[i]);
            out[lo + i] = mu[i];
        }
    });
    return out;
}

ArithSeq dirichlet_convolve(const ArithSeq& f, const ArithSeq& g, int threads) {
    if (f.hi != g.hi) throw std::invalid_argument("dirichlet_convolve: length mismatch");
    const uint64_t n = f.hi;
    ArithSeq h(n);
    // Parallel over disjoint output segments: each segment scans all d and
    // accumulates f(d) g(e) at de inside the segment only.
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t d = 1; d <= hi; ++d) {
            const double fd = f[d];
            if (fd == 0.0) continue;
            for (uint64_t e = (lo + d - 1) / d; d * e <= hi; ++e) h[d * e] += fd * g[e];
        }
    });
    return h;
}

std::vector<std::pair<uint64_t, unsigned>> factorize(uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize: n >= 1");
    std::vector<std::pair<uint64_t, unsigned>> out;
    for (uint64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

uint64_t binomial(uint64_t n, uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (uint64_t i = 0; i < k; ++i) {
        r = r * (n - i) / (i + 1);  // exact division in this order
        if (r > static_cast<unsigned __int128>(UINT64_MAX))
            throw std::range_error("binomial overflow");
    }
    return static_cast<uint64_t>(r);
}

uint64_t tau_k(uint64_t n, unsigned k) {
    if (n == 0 || k == 0) throw std::invalid_argument("tau_k: n >= 1, k >= 1");
    uint64_t r = 1;
    for (const auto& [p, e] : factorize(n)) {
        (void)p;
        const uint64_t f = binomial(e + k - 1, k - 1);
        if (__builtin_mul_overflow(r, f, &r)) throw std::range_error("tau_k overflow");
    }
    return r;
}

uint64_t euler_phi(uint64_t n) {
    uint64_t r = n;
    for (const auto& [p, e] : factorize(n)) {
        (void)e;
        r -= r / p;
    }
    return r;
}

double psi(uint64_t v) {
    if (v == 0) throw std::invalid_argument("psi: v >= 1");
    return static_cast<double>(v) / static_cast<double>(euler_phi(v));
}

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2)
        if (n % p == 0) return false;
    return true;
}

void for_each_prime(uint64_t limit, const std::function<void(uint64_t)>& fn) {
    if (limit < 2) return;
    fn(2);
    const uint64_t root = isqrt(limit);
    const std::vector<uint64_t> base = sieve_primes(root);
    constexpr uint64_t seg = uint64_t{1} << 21;  // odds per segment
    std::vector<uint64_t> bits(seg / 64 + 1);
    for (uint64_t lo = 3; lo <= limit; lo += 2 * seg) {
        const uint64_t hi = std::min(limit, lo + 2 * seg - 2);  // odd numbers lo..hi
        const uint64_t count = (hi - lo) / 2 + 1;
        std::fill(bits.begin(), bits.end(), 0);
        for (uint64_t p : base) {
            if (p == 2) continue;
            if (p * p > hi) break;
            uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            if (start % 2 == 0) start += p;
            for (uint64_t x = start; x <= hi; x += 2 * p) {
                const uint64_t i = (x - lo) / 2;
                bits[i >> 6] |= uint64_t{1} << (i & 63);
            }
        }
        for (uint64_t i = 0; i < count; ++i)
            if (!(bits[i >> 6] & (uint64_t{1} << (i & 63)))) fn(lo + 2 * i);
    }
}

}  // namespace sievelab
