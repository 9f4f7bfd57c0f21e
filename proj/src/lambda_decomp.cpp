#include "sievelab/lambda_decomp.hpp"

#include <cmath>
#include <stdexcept>

#include "sievelab/parallel.hpp"

namespace sievelab {

namespace {

std::vector<double> log_table(uint64_t n) {
    std::vector<double> logs(static_cast<size_t>(n) + 1, 0.0);
    for (uint64_t e = 1; e <= n; ++e) logs[e] = std::log(static_cast<double>(e));
    return logs;
}

}  // namespace

DecompSet build_decomp(const RealCharacter& chi, uint64_t n, int threads) {
    if (n < 1) throw std::invalid_argument("build_decomp: n >= 1");
    if (n > kMaxSupported) throw std::range_error("build_decomp: n above 2^50");
    DecompSet ds;
    ds.chi = chi;
    ds.n = n;
    ds.lambda = ArithSeq(n);
    ds.lambda_prime = ArithSeq(n);
    ds.nu = ArithSeq(n);

    const ArithWindow win = build_table(n, kDefaultSegment, threads);
    ds.mangoldt.assign(static_cast<size_t>(n) + 1, 0.0);
    ds.mu.assign(static_cast<size_t>(n) + 1, 0);
    ds.tau.assign(static_cast<size_t>(n) + 1, 0);
    for (uint64_t m = 1; m <= n; ++m) {
        ds.mangoldt[m] = win.lambda_at(m);
        ds.mu[m] = static_cast<int8_t>(win.mu_at(m));
        ds.tau[m] = static_cast<uint32_t>(win.tau_at(m));
    }

    const std::vector<int8_t> chi_tab = chi.chi_table();
    const uint64_t D = chi.modulus;
    const std::vector<double> logs = log_table(n);

    // one pass per output segment; every divisor loop writes only into its
    // own segment, so segments parallelize without races
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t d = 1; d <= hi; ++d) {
            const int c = chi_tab[d % D];
            if (c == 0) continue;
            const double cd = static_cast<double>(c);
            for (uint64_t e = (lo + d - 1) / d; d * e <= hi; ++e) {
                ds.lambda[d * e] += cd;
                ds.lambda_prime[d * e] += cd * logs[e];
            }
        }
        for (uint64_t d = 1; d <= hi; ++d) {
            if (ds.mu[d] == 0) continue;
            const int c = chi_tab[d % D];
            if (c == 0) continue;
            const double cd = static_cast<double>(ds.mu[d] * c);
            for (uint64_t e = (lo + d - 1) / d; d * e <= hi; ++e)
                ds.nu[d * e] += cd * static_cast<double>(ds.mu[e]);
        }
    });
    return ds;
}

double verify_inversion(const DecompSet& ds, int threads) {
    const uint64_t n = ds.n;
    const uint64_t nblocks = (n + kDefaultSegment - 1) / kDefaultSegment;
    std::vector<double> part(nblocks, 0.0);
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        std::vector<double> conv(static_cast<size_t>(hi - lo + 1), 0.0);
        for (uint64_t b = 1; b <= hi; ++b) {
            const double nb = ds.nu[b];
            if (nb == 0.0) continue;
            for (uint64_t a = (lo + b - 1) / b; a * b <= hi; ++a)
                conv[a * b - lo] += ds.lambda_prime[a] * nb;
        }
        double worst = 0.0;
        for (uint64_t m = lo; m <= hi; ++m)
            worst = std::max(worst, std::fabs(ds.mangoldt[m] - conv[m - lo]));
        part[(lo - 1) / kDefaultSegment] = worst;
    });
    double worst = 0.0;
    for (double w : part) worst = std::max(worst, w);
    return worst;
}

void split(DecompSet& ds, uint64_t y, int threads) {
    if (y < 1) throw std::invalid_argument("split: y >= 1");
    ds.y = y;
    ds.lambda_star = ArithSeq(ds.n);
    ds.lambda_sub = ArithSeq(ds.n);
    const uint64_t n = ds.n;
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t b = 1; b <= hi; ++b) {
            const double nb = ds.nu[b];
            if (nb == 0.0) continue;
            ArithSeq& target = (b < y) ? ds.lambda_star : ds.lambda_sub;
            for (uint64_t a = (lo + b - 1) / b; a * b <= hi; ++a)
                target[a * b] += ds.lambda_prime[a] * nb;
        }
    });
}

std::vector<BoundViolation> verify_pointwise_bounds(const DecompSet& ds, int threads) {
    const uint64_t n = ds.n;
    const uint64_t nblocks = (n + kDefaultSegment - 1) / kDefaultSegment;
    std::vector<std::vector<BoundViolation>> part(nblocks);
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        std::vector<BoundViolation>& out = part[(lo - 1) / kDefaultSegment];
        constexpr double tol = 1e-9;  // per-term tolerance for log-valued data
        for (uint64_t m = lo; m < hi_excl; ++m) {
            const double L = ds.mangoldt[m];
            const double lp = ds.lambda_prime[m];
            const double la = ds.lambda[m];
            const double nu = ds.nu[m];
            const double tau_log =
                static_cast<double>(ds.tau[m]) * (m == 1 ? 0.0 : std::log(static_cast<double>(m)));
            if (L < -tol) out.push_back({m, "Lambda>=0", L, 0.0});
            if (L > lp + tol) out.push_back({m, "Lambda<=lambda'", L, lp});
            if (lp > tau_log + tol) out.push_back({m, "lambda'<=tau*log", lp, tau_log});
            // integer-valued comparisons are exact in double
            if (std::fabs(nu) > la) out.push_back({m, "|nu|<=lambda", std::fabs(nu), la});
            if (la > static_cast<double>(ds.tau[m]))
                out.push_back({m, "lambda<=tau", la, static_cast<double>(ds.tau[m])});
        }
    });
    std::vector<BoundViolation> out;
    for (auto& v : part) out.insert(out.end(), v.begin(), v.end());
    return out;
}

}  // namespace sievelab
