#include "sievelab/characters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sievelab/arith.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

namespace {

// Jacobi symbol (a|n) for odd n > 0, 0 <= a.
int jacobi(uint64_t a, uint64_t n) {
    a %= n;
    int t = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            const uint64_t m = n % 8;
            if (m == 3 || m == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return (n == 1) ? t : 0;
}

uint64_t umod(int64_t d, uint64_t n) {
    const int64_t m = d % static_cast<int64_t>(n);
    return static_cast<uint64_t>(m >= 0 ? m : m + static_cast<int64_t>(n));
}

bool squarefree_u(uint64_t m) {
    for (uint64_t p = 2; p * p <= m; p += (p == 2) ? 1 : 2)
        if (m % (p * p) == 0) return false;
    return true;
}

}  // namespace

int kronecker_symbol(int64_t d, uint64_t n) {
    if (d == 0) throw std::invalid_argument("kronecker_symbol: d != 0");
    if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
    int result = 1;
    // factor of (d|2) per power of two in n
    unsigned e = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++e;
    }
    if (e > 0) {
        if (d % 2 == 0) return 0;
        const uint64_t d8 = umod(d, 8);
        if ((e & 1) && (d8 == 3 || d8 == 5)) result = -result;
    }
    // n now odd; reducing d into [0, n) absorbs the sign of d, since the
    // Jacobi symbol is periodic in its top argument mod odd n
    const int j = jacobi(umod(d, n), n);
    return j == 0 ? 0 : result * j;
}

bool is_fundamental(int64_t d) {
    if (d == 0) throw std::invalid_argument("is_fundamental: d != 0");
    if (d < -static_cast<int64_t>(kMaxSupported) || d > static_cast<int64_t>(kMaxSupported))
        throw std::range_error("is_fundamental: |d| above 2^50");
    const uint64_t r4 = umod(d, 4);
    if (r4 == 1) return squarefree_u(static_cast<uint64_t>(d < 0 ? -d : d));
    if (r4 == 0) {
        const int64_t m = d / 4;
        const uint64_t m4 = umod(m, 4);
        if (m4 != 2 && m4 != 3) return false;
        return squarefree_u(static_cast<uint64_t>(m < 0 ? -m : m));
    }
    return false;
}

RealCharacter RealCharacter::make(int64_t d) {
    if (!is_fundamental(d)) throw std::invalid_argument("RealCharacter: not a fundamental discriminant");
    RealCharacter c;
    c.disc = d;
    c.modulus = static_cast<uint64_t>(d < 0 ? -d : d);
    return c;
}

std::vector<int8_t> RealCharacter::chi_table() const {
    std::vector<int8_t> t(modulus);
    for (uint64_t r = 0; r < modulus; ++r)
        t[r] = static_cast<int8_t>(kronecker_symbol(disc, r));
    return t;
}

namespace {

// sum_{b >= a} b^-s for integer s >= 2, by direct terms to b < B plus
// Euler-Maclaurin for the rest; absolute error well below 1e-15 here.
double zeta_tail_int(unsigned s, uint64_t a) {
    const uint64_t b0 = std::max<uint64_t>(a, 512);
    double head = 0.0;
    for (uint64_t b = b0; b-- > a;) head += std::pow(static_cast<double>(b), -static_cast<double>(s));
    const double B = static_cast<double>(b0);
    const double fs = static_cast<double>(s);
    double tail = std::pow(B, 1.0 - fs) / (fs - 1.0) + std::pow(B, -fs) / 2.0 +
                  fs * std::pow(B, -fs - 1.0) / 12.0 -
                  fs * (fs + 1.0) * (fs + 2.0) * std::pow(B, -fs - 3.0) / 720.0;
    return head + tail;
}

}  // namespace

LOneResult l_one(const RealCharacter& chi, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("l_one: tol > 0");
    const uint64_t d = chi.modulus;
    const std::vector<int8_t> table = chi.chi_table();
    constexpr unsigned K = 10;  // moment expansion order
    // A periods summed directly; remainder <= sum_{b>=A} b^-(K+1) ~ A^-K / K.
    uint64_t a_periods = 64;
    while (a_periods < 1u << 20 &&
           zeta_tail_int(K + 1, a_periods) > 0.25 * tol)
        a_periods *= 2;
    const uint64_t m = a_periods * d;

    // direct partial sum with compensation
    double s = 0.0, comp = 0.0;
    for (uint64_t n = 1; n <= m; ++n) {
        const int c = table[n % d];
        if (c == 0) continue;
        const double term = static_cast<double>(c) / static_cast<double>(n);
        const double y = term - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }

    // Remainder sum_{n>m} chi(n)/n with n = m + aD + r grouped by period:
    // expanding 1/(m+aD+r) in powers of r/(m+aD), the zeroth moment of chi
    // vanishes, leaving sum_k (-1)^k (mt_k / D) S_{k+1} with
    // mt_k = sum_r chi(r) (r/D)^k and S_j = sum_{b >= A} b^-j.
    double tail = 0.0;
    for (unsigned k = 1; k < K; ++k) {
        double mt = 0.0;
        for (uint64_t r = 1; r <= d; ++r) {
            const int c = table[r % d];
            if (c == 0) continue;
            mt += c * std::pow(static_cast<double>(r) / static_cast<double>(d),
                               static_cast<double>(k));
        }
        const double sj = zeta_tail_int(k + 1, a_periods);
        tail += ((k & 1) ? -1.0 : 1.0) * (mt / static_cast<double>(d)) * sj;
    }

    LOneResult out;
    out.value = s + tail;
    out.tail_bound = zeta_tail_int(K + 1, a_periods) + 1e-15;
    out.terms = m;
    return out;
}

double eta(const RealCharacter& chi) {
    if (chi.modulus < 3) throw std::invalid_argument("eta: requires D >= 3");
    return cached_l1(chi) * std::log(static_cast<double>(chi.modulus));
}

double cached_l1(const RealCharacter& chi) {
    if (!chi.cached_l1) chi.cached_l1 = l_one(chi, 1e-12).value;
    return *chi.cached_l1;
}

double cached_eta(const RealCharacter& chi) {
    if (!chi.cached_eta) chi.cached_eta = eta(chi);
    return *chi.cached_eta;
}

std::vector<ScanRow> scan_exceptional(uint64_t d_min, uint64_t d_max, size_t top_n, int threads) {
    if (!(d_min < d_max)) throw std::invalid_argument("scan_exceptional: d_min < d_max");
    if (top_n < 1) throw std::invalid_argument("scan_exceptional: top_n >= 1");
    std::vector<int64_t> cands;
    for (uint64_t a = std::max<uint64_t>(d_min, 3); a <= d_max; ++a) {
        const int64_t v = static_cast<int64_t>(a);
        if (is_fundamental(v)) cands.push_back(v);
        if (is_fundamental(-v)) cands.push_back(-v);
    }
    std::vector<ScanRow> rows(cands.size());
    parallel_for(0, cands.size(), 16, threads, [&](uint64_t lo, uint64_t hi) {
        for (uint64_t i = lo; i < hi; ++i) {
            RealCharacter c = RealCharacter::make(cands[i]);
            const double l1 = l_one(c, 1e-12).value;
            rows[i] = ScanRow{c.disc, c.modulus, l1,
                              l1 * std::log(static_cast<double>(c.modulus))};
        }
    });
    std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
        if (a.eta != b.eta) return a.eta < b.eta;
        if (a.modulus != b.modulus) return a.modulus < b.modulus;
        return a.disc > b.disc;
    });
    if (rows.size() > top_n) rows.resize(top_n);
    return rows;
}

}  // namespace sievelab
