#include "sievelab/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sievelab/arith.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

DensityParams DensityParams::defaults(unsigned r, double z) {
    if (r < 1) throw std::invalid_argument("DensityParams: r >= 1");
    if (!(z > 1.0)) throw std::invalid_argument("DensityParams: z > 1");
    DensityParams dp;
    dp.r = r;
    dp.z = z;
    dp.eps.resize(r + 1);
    const double lz = std::log(z);
    for (unsigned i = 0; i <= r; ++i) dp.eps[i] = static_cast<double>(i) / lz;
    return dp;
}

DensityParams DensityParams::from_eps(std::vector<double> eps) {
    if (eps.size() < 2) throw std::invalid_argument("DensityParams: need eps_0..eps_r, r >= 1");
    if (eps[0] != 0.0) throw std::invalid_argument("DensityParams: eps_0 must be 0");
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!std::isfinite(eps[i]) || eps[i] < 0)
            throw std::invalid_argument("DensityParams: eps must be finite and nonnegative");
        if (i > 0 && eps[i] < eps[i - 1])
            throw std::invalid_argument("DensityParams: eps must be nondecreasing");
    }
    DensityParams dp;
    dp.r = static_cast<unsigned>(eps.size() - 1);
    dp.z = 0;
    dp.eps = std::move(eps);
    return dp;
}

double zeta_em(double s) {
    if (s == 1.0) throw std::invalid_argument("zeta_em: pole at s = 1");
    if (s <= -12.0) throw std::invalid_argument("zeta_em: s <= -12 unsupported");
    // B_2 .. B_16 over (2k)!
    static const double coef[8] = {
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
        -3617.0 / 10670622842880000.0,
    };
    constexpr int N = 256;
    // the head grows like N^{1-s} for s < 0 while zeta stays O(1); long
    // double accumulation keeps the cancellation harmless
    long double head = 0.0L;
    for (int n = N - 1; n >= 1; --n)
        head += std::pow(static_cast<long double>(n), static_cast<long double>(-s));
    const double Nf = N;
    double v = static_cast<double>(head + std::pow(static_cast<long double>(Nf),
                                                   static_cast<long double>(1.0 - s)) /
                                              (static_cast<long double>(s) - 1.0L)) +
               0.5 * std::pow(Nf, -s);
    // correction term k uses the rising product s (s+1) ... (s+2k-2)
    double rising = s;
    double npow = std::pow(Nf, -s - 1.0);
    for (int k = 1; k <= 8; ++k) {
        v += coef[k - 1] * rising * npow;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        npow /= Nf * Nf;
    }
    return v;
}

// gamma(p^a) for a = 0..e_max in one composition-DP pass.
static std::vector<double> gamma_prime_power_table(uint64_t p, unsigned e_max,
                                                   const DensityParams& dp) {
    if (p < 2) throw std::invalid_argument("gamma_prime_power: p >= 2");
    const unsigned r = dp.r;
    const double lp = std::log(static_cast<double>(p));
    // f[a] = sum over ways to split exponent a among the first i slots of
    // p^{a_1 eps_1 + ... + a_i eps_i}
    std::vector<double> f(e_max + 1, 0.0), g(e_max + 1, 0.0);
    f[0] = 1.0;
    for (unsigned i = 1; i <= r; ++i) {
        const double pe = std::exp(dp.eps[i] * lp);
        std::fill(g.begin(), g.end(), 0.0);
        for (unsigned a = 0; a <= e_max; ++a) {
            if (f[a] == 0.0) continue;
            double w = f[a];
            for (unsigned b = a; b <= e_max; ++b) {
                g[b] += w;
                w *= pe;
            }
        }
        f.swap(g);
    }
    const double fac = 1.0 - 1.0 / static_cast<double>(p);
    for (unsigned a = 1; a <= e_max; ++a) f[a] *= fac;
    return f;
}

double gamma_prime_power(uint64_t p, unsigned e, const DensityParams& dp) {
    if (e == 0) return 1.0;
    if (e == 1) {
        const double lp = std::log(static_cast<double>(p));
        double s = 0.0;
        for (unsigned i = 1; i <= dp.r; ++i) s += std::exp(dp.eps[i] * lp);
        return (1.0 - 1.0 / static_cast<double>(p)) * s;
    }
    return gamma_prime_power_table(p, e, dp)[e];
}

double gamma_coeff(uint64_t d, const DensityParams& dp) {
    if (d == 0) throw std::invalid_argument("gamma_coeff: d >= 1");
    double v = 1.0;
    for (const auto& [p, e] : factorize(d)) v *= gamma_prime_power(p, e, dp);
    return v;
}

DSeriesCheck d_series_check(double s, const DensityParams& dp, uint64_t cutoff, int threads) {
    if (!(s > 0)) throw std::invalid_argument("d_series_check: s > 0");
    const double eps_r = dp.eps[dp.r];
    if (!(s + 1.0 - eps_r > 1.0))
        throw std::invalid_argument("d_series_check: need s + 1 - eps_r > 1 for convergence");
    if (cutoff < 1) throw std::invalid_argument("d_series_check: cutoff >= 1");

    const ArithWindow win = build_table(cutoff, kDefaultSegment, threads);
    const double sigma = s + 1.0 - eps_r;

    // gamma at primes cached densely (closed form), higher powers via the DP
    std::vector<double> gamma_p(cutoff + 1, 0.0);
    for_each_prime(cutoff, [&](uint64_t p) { gamma_p[p] = gamma_prime_power(p, 1, dp); });
    std::vector<double> binom_e(64);
    for (unsigned e = 0; e < 64; ++e)
        binom_e[e] = std::exp(std::lgamma(e + static_cast<double>(dp.r)) -
                              std::lgamma(static_cast<double>(dp.r)) - std::lgamma(e + 1.0));

    const uint64_t nblocks = (cutoff + kDefaultSegment - 1) / kDefaultSegment;
    std::vector<double> part_lhs(nblocks, 0.0), part_tau(nblocks, 0.0);
    parallel_for(1, cutoff + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t blk = (lo - 1) / kDefaultSegment;
        double acc = 0.0, acc_tau = 0.0;
        for (uint64_t d = lo; d < hi_excl; ++d) {
            double gamma = 1.0, tau_r = 1.0;
            uint64_t m = d;
            while (m > 1) {
                const uint64_t p = win.spf_at(m);
                unsigned e = 0;
                while (m % p == 0) {
                    m /= p;
                    ++e;
                }
                gamma *= (e == 1) ? gamma_p[p] : gamma_prime_power(p, e, dp);
                tau_r *= binom_e[e];
            }
            const double dd = static_cast<double>(d);
            acc += gamma / (static_cast<double>(win.phi_at(d)) * std::pow(dd, s));
            acc_tau += tau_r * std::pow(dd, -sigma);
        }
        part_lhs[blk] = acc;
        part_tau[blk] = acc_tau;
    });
    double lhs = 0.0, tau_partial = 0.0;
    for (uint64_t b = 0; b < nblocks; ++b) {
        lhs += part_lhs[b];
        tau_partial += part_tau[b];
    }

    DSeriesCheck out;
    out.lhs = lhs;
    out.rhs = 1.0;
    for (unsigned i = 1; i <= dp.r; ++i) out.rhs *= zeta_em(s + 1.0 - dp.eps[i]);
    out.gap = out.rhs - out.lhs;
    out.tail_bound = std::pow(zeta_em(sigma), static_cast<double>(dp.r)) - tau_partial;
    out.pass = out.gap >= -1e-9 * std::abs(out.rhs) - 1e-12 &&
               out.gap <= out.tail_bound * (1.0 + 1e-9) + 1e-12;
    return out;
}

double local_factor_P(uint64_t v, double s, const DensityParams& dp) {
    if (v == 0) throw std::invalid_argument("local_factor_P: v >= 1");
    double prod = 1.0;
    for (const auto& [p, e] : factorize(v)) {
        (void)e;
        const double lp = std::log(static_cast<double>(p));
        for (unsigned i = 1; i <= dp.r; ++i) prod *= 1.0 - std::exp((dp.eps[i] - s - 1.0) * lp);
    }
    return prod;
}

double g_density_prime(uint64_t p, unsigned eps_index, const DensityParams& dp) {
    if (eps_index > dp.r) throw std::invalid_argument("g_density_prime: eps index out of range");
    const double pd = static_cast<double>(p);
    return 1.0 - (pd - 2.0) / (pd - 1.0) * local_factor_P(p, dp.eps[eps_index], dp);
}

GDensityResult sieve_density_g(uint64_t q, unsigned eps_index, const DensityParams& dp,
                               double trunc) {
    if (q == 0) throw std::invalid_argument("sieve_density_g: q >= 1");
    if (eps_index > dp.r) throw std::invalid_argument("sieve_density_g: eps index out of range");
    if (!(trunc >= 1.0)) throw std::invalid_argument("sieve_density_g: trunc >= 1");
    const double eps = dp.eps[eps_index];
    const double eps_r = dp.eps[dp.r];
    const double log_trunc = std::log(trunc);

    GDensityResult out;
    const auto fac = factorize(q);
    bool squarefree = true;
    for (const auto& [p, e] : fac)
        if (e > 1) squarefree = false;

    if (q == 1) {
        out.closed = 1.0;
        out.summed = 1.0;
        out.tail_bound = 0.0;
        return out;
    }

    if (squarefree) {
        double c = 1.0;
        for (const auto& [p, e] : fac) {
            (void)e;
            c *= g_density_prime(p, eps_index, dp);
        }
        out.closed = c;
    }

    // prefactor P_q(eps) / phi(q)
    const double pref = local_factor_P(q, eps, dp) / static_cast<double>(euler_phi(q));

    // one axis per distinct prime: terms t_alpha = gamma(p^a) p^{min(a, vq)}
    // p^{-a (eps+1)}; the per-axis full sums S_p and tail bounds combine into
    // a union bound over "some exponent exceeds trunc^{1/k}".
    struct Axis {
        uint64_t p;
        unsigned vq;
        std::vector<double> term;  // up to the per-axis alpha cap from trunc
        double full_sum;           // converged sum over all alpha
        double tail_from_cap;      // bound on the part beyond the cap
    };
    const size_t k = fac.size();
    std::vector<Axis> axes;
    bool divergent = false;
    for (const auto& [p, vq] : fac) {
        Axis ax;
        ax.p = p;
        ax.vq = vq;
        const double lp = std::log(static_cast<double>(p));
        const double x = std::exp((eps_r - eps - 1.0) * lp);  // dominating ratio base
        const unsigned cap = static_cast<unsigned>(log_trunc / lp);
        const std::vector<double> gpp = gamma_prime_power_table(p, cap, dp);
        ax.term.resize(cap + 1);
        for (unsigned a = 0; a <= cap; ++a) {
            const double gcd_part = std::exp(lp * static_cast<double>(std::min(a, vq)));
            ax.term[a] = gpp[a] * gcd_part * std::exp(-(eps + 1.0) * lp * a);
        }
        // dominate t_a for a > cap by (1-1/p) C(a+r-1, r-1) p^{vq} x^a; the
        // binomial-growth ratio (a+r)/(a+1) x is decreasing in a
        const double ratio_at_cap =
            (static_cast<double>(cap) + dp.r) / (static_cast<double>(cap) + 1.0) * x;
        if (ratio_at_cap >= 1.0) {
            divergent = true;  // cannot certify the tail at this truncation
            ax.tail_from_cap = std::numeric_limits<double>::infinity();
        } else {
            const double log_binom = std::lgamma(static_cast<double>(cap) + dp.r + 1.0) -
                                     std::lgamma(static_cast<double>(dp.r)) -
                                     std::lgamma(static_cast<double>(cap) + 2.0);
            const double t_next = std::exp(lp * static_cast<double>(vq) + log_binom +
                                           (static_cast<double>(cap) + 1.0) * std::log(x));
            ax.tail_from_cap = t_next / (1.0 - ratio_at_cap);
        }
        // converged full per-axis sum (extend well past the cap when finite)
        double s_full = 0.0;
        for (unsigned a = 0; a <= cap; ++a) s_full += ax.term[a];
        ax.full_sum = s_full + (std::isinf(ax.tail_from_cap) ? 0.0 : ax.tail_from_cap);
        axes.push_back(std::move(ax));
    }

    // enumerate exponent vectors with sum a_i log p_i <= log trunc
    double total = 0.0;
    std::function<void(size_t, double, double)> rec = [&](size_t i, double logc, double prod) {
        if (i == k) {
            total += prod;
            return;
        }
        const double lp = std::log(static_cast<double>(axes[i].p));
        for (unsigned a = 0; a < axes[i].term.size(); ++a) {
            const double lc = logc + lp * a;
            if (lc > log_trunc * (1.0 + 1e-12) + 1e-9) break;
            rec(i + 1, lc, prod * axes[i].term[a]);
        }
    };
    rec(0, 0.0, 1.0);
    out.summed = pref * total;

    if (divergent) {
        out.tail_bound = std::numeric_limits<double>::infinity();
        return out;
    }
    // union bound: c > trunc forces p_i^{a_i} > trunc^{1/k} for some i
    double tail = 0.0;
    for (size_t i = 0; i < k; ++i) {
        const double lp = std::log(static_cast<double>(axes[i].p));
        const unsigned cap_i = static_cast<unsigned>(log_trunc / (lp * static_cast<double>(k)));
        double axis_tail = axes[i].tail_from_cap;  // beyond the global cap
        for (unsigned a = cap_i + 1; a < axes[i].term.size(); ++a) axis_tail += axes[i].term[a];
        double rest = 1.0;
        for (size_t j = 0; j < k; ++j)
            if (j != i) rest *= axes[j].full_sum;
        tail += axis_tail * rest;
    }
    out.tail_bound = std::abs(pref) * tail;
    return out;
}

double residue_R(unsigned i, const DensityParams& dp) {
    if (i > dp.r) throw std::invalid_argument("residue_R: 0 <= i <= r");
    for (unsigned a = 0; a < dp.eps.size(); ++a)
        for (unsigned b = a + 1; b < dp.eps.size(); ++b)
            if (dp.eps[a] == dp.eps[b])
                throw std::domain_error("residue_R: coincident eps values");
    const double kappa = (i == 0) ? 1.0 : 1.0 / dp.eps[i];
    double prod = kappa;
    for (unsigned j = 0; j <= dp.r; ++j) {
        if (j == i) continue;
        prod *= zeta_em(1.0 + dp.eps[i] - dp.eps[j]);
    }
    return prod;
}

SingularConstants twin_constants(int64_t h, uint64_t prime_cutoff) {
    if (h == 0 || h % 2 != 0) throw std::invalid_argument("twin_constants: h even and nonzero");
    if (prime_cutoff < 100000) throw std::invalid_argument("twin_constants: prime_cutoff >= 1e5");
    SingularConstants sc;
    sc.h = h;
    sc.cutoff = prime_cutoff;
    // log-accumulated product over odd primes with compensation
    double s = 0.0, comp = 0.0;
    for_each_prime(prime_cutoff, [&](uint64_t p) {
        if (p == 2) return;
        const double u = 1.0 / (static_cast<double>(p - 1) * static_cast<double>(p - 1));
        const double term = std::log1p(-u);
        const double y = term - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    });
    // integral-comparison estimate of the dropped log-tail, plus a rigorous
    // bound: |sum_{p > X} log(1 - (p-1)^-2)| <= 1.01 sum_{odd n > X} (n-1)^-2
    const double X = static_cast<double>(prime_cutoff);
    const double tail_est = -1.0 / (X * std::log(X));
    sc.B = 2.0 * std::exp(s + tail_est);
    sc.tail_bound = sc.B * (1.01 * 0.5 / (X - 2.0) + std::abs(tail_est));
    sc.C = singular_series_C(h);
    return sc;
}

double singular_series_C(int64_t h) {
    if (h == 0 || h % 2 != 0) throw std::invalid_argument("singular_series_C: h even and nonzero");
    const uint64_t ah = static_cast<uint64_t>(h < 0 ? -h : h);
    double c = 1.0;
    for (const auto& [p, e] : factorize(ah)) {
        (void)e;
        if (p == 2) continue;
        c *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
    }
    return c;
}

double G_v(unsigned eps_index, uint64_t v, const SieveWeights& w, const DensityParams& dp) {
    if (v == 0) throw std::invalid_argument("G_v: v >= 1");
    if (eps_index > dp.r) throw std::invalid_argument("G_v: eps index out of range");
    const size_t np = w.range_primes.size();
    std::vector<double> g(np);
    std::vector<uint8_t> skip(np, 0);
    for (size_t i = 0; i < np; ++i) {
        const uint64_t p = w.range_primes[np - 1 - i];  // descending
        g[i] = g_density_prime(p, eps_index, dp);
        skip[i] = (v % p == 0);
    }
    double total = 1.0;  // q = 1 contributes xi_1 g(1) = 1
    std::function<void(size_t, long double, unsigned, int, double)> rec =
        [&](size_t idx, long double q, unsigned depth, int sign, double gp) {
            for (size_t i = idx; i < np; ++i) {
                if (skip[i]) continue;
                const uint64_t p = w.range_primes[np - 1 - i];
                if (!w.extend_ok(q, p, depth + 1)) continue;
                const double gq = gp * g[i];
                total += static_cast<double>(-sign) * gq;
                rec(i + 1, q * static_cast<long double>(p), depth + 1, -sign, gq);
            }
        };
    rec(0, 1.0L, 0, 1, 1.0);
    return total;
}

}  // namespace sievelab
