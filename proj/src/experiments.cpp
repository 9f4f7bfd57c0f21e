#include "sievelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "sievelab/kernels.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

namespace {

void validate_h_x(int64_t h, uint64_t x) {
    if (h <= 0 || h % 2 != 0) throw std::invalid_argument("h must be even and positive");
    if (x < 1) throw std::invalid_argument("x >= 1");
    if (x + static_cast<uint64_t>(h) > kMaxSupported) throw std::range_error("x above 2^50");
    if (static_cast<uint64_t>(h) > x) throw std::invalid_argument("need 0 < h <= x");
}

std::vector<uint64_t> prime_divisors(uint64_t n) {
    std::vector<uint64_t> ps;
    for (const auto& [p, e] : factorize(n)) {
        (void)e;
        ps.push_back(p);
    }
    return ps;
}

// [gcd(n, h) = 1] on [0..n] as doubles (for the masked kernels).
std::vector<double> coprime_mask(uint64_t n, uint64_t h) {
    std::vector<double> mask(static_cast<size_t>(n) + 1, 1.0);
    mask[0] = 0.0;
    for (uint64_t p : prime_divisors(h))
        for (uint64_t m = p; m <= n; m += p) mask[m] = 0.0;
    return mask;
}

}  // namespace

ExperimentConfig desk_config(int64_t h, uint64_t x, int64_t disc) {
    validate_h_x(h, x);
    ExperimentConfig cfg;
    cfg.h = h;
    cfg.x = x;
    cfg.disc = disc;
    cfg.z = 10.0;
    // keep the level well below x so the b >= y tail carries real mass, but
    // never below z
    cfg.y = std::max(100.0, std::floor(std::cbrt(static_cast<double>(x))));
    cfg.preset = Preset::desk;
    return cfg;
}

ExperimentConfig paper_config(int64_t h, uint64_t x, int64_t disc) {
    validate_h_x(h, x);
    ExperimentConfig cfg;
    cfg.h = h;
    cfg.x = x;
    cfg.disc = disc;
    cfg.preset = Preset::paper;
    cfg.y = std::pow(static_cast<double>(x), 1.0 / 20.0);
    cfg.z = std::pow(cfg.y, 1.0 / 72.0);
    const double d4 = std::pow(static_cast<double>(std::llabs(disc)), 4.0);
    if (cfg.z < 2.0)
        throw std::invalid_argument(
            "paper preset: z = x^(1/1440) falls below 2 at this x; the regime needs "
            "astronomically large x");
    if (cfg.y > std::pow(static_cast<double>(x), 1.0 / 9.0))
        throw std::invalid_argument("paper preset: y must stay below x^(1/9)");
    if (d4 > cfg.z) throw std::invalid_argument("paper preset: requires D^4 <= z");
    return cfg;
}

Majorants majorants(uint64_t n, const RealCharacter& chi, uint64_t y, const DensityParams& dp,
                    int threads) {
    if (n < 1) throw std::invalid_argument("majorants: n >= 1");
    Majorants maj;
    maj.a = ArithSeq(n);
    maj.b = ArithSeq(n);
    maj.c = ArithSeq(n);

    const ArithWindow win = build_table(n, kDefaultSegment, threads);
    // lambda = chi * 1 by divisor loop
    ArithSeq lam(n);
    const std::vector<int8_t> chi_tab = chi.chi_table();
    const uint64_t D = chi.modulus;
    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t d = 1; d <= hi; ++d) {
            const int c = chi_tab[d % D];
            if (c == 0) continue;
            for (uint64_t e = (lo + d - 1) / d; d * e <= hi; ++e)
                lam[d * e] += static_cast<double>(c);
        }
    });

    uint64_t dmax = static_cast<uint64_t>(std::cbrt(static_cast<double>(n)));
    while (dmax > 0 && dmax * dmax * dmax >= n) --dmax;
    while ((dmax + 1) * (dmax + 1) * (dmax + 1) < n) ++dmax;
    std::vector<double> gam(dmax + 1, 0.0);
    for (uint64_t d = 1; d <= dmax; ++d) gam[d] = gamma_coeff(d, dp);

    parallel_for(1, n + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t b = 1; b <= hi; ++b) {
            const double lb = lam[b];
            const double tb = static_cast<double>(win.tau_at(b));
            const bool below = b < y;
            for (uint64_t a = (lo + b - 1) / b; a * b <= hi; ++a) {
                const double ta = static_cast<double>(win.tau_at(a));
                if (below)
                    maj.b[a * b] += ta * tb;
                else
                    maj.a[a * b] += ta * lb;
            }
        }
        for (uint64_t d = 1; d <= std::min(dmax, hi); ++d) {
            const double gd = gam[d];
            for (uint64_t m = ((lo + d - 1) / d) * d; m <= hi; m += d) maj.c[m] += gd;
        }
    });
    return maj;
}

ExperimentContext make_context(const ExperimentConfig& cfg) {
    validate_h_x(cfg.h, cfg.x);
    if (!(cfg.y >= 1.0)) throw std::invalid_argument("config: y >= 1");
    ExperimentContext ctx{cfg,
                          RealCharacter::make(cfg.disc),
                          DensityParams::defaults(cfg.r, cfg.z),
                          {},
                          {},
                          {},
                          {},
                          {}};
    const std::vector<uint64_t> excl = prime_divisors(static_cast<uint64_t>(cfg.h));
    ctx.weights = build_weights(cfg.z, cfg.y, excl, Parity::upper, cfg.construction);
    ctx.decomp = build_decomp(ctx.chi, cfg.x, cfg.threads);
    split(ctx.decomp, static_cast<uint64_t>(std::llround(cfg.y)), cfg.threads);
    const std::vector<int32_t> th = theta_table(ctx.weights, cfg.x, cfg.threads);
    ctx.theta_d.assign(th.begin(), th.end());
    ctx.mask = coprime_mask(cfg.x, static_cast<uint64_t>(cfg.h));
    ctx.maj = majorants(cfg.x, ctx.chi, static_cast<uint64_t>(std::llround(cfg.y)), ctx.density,
                        cfg.threads);
    return ctx;
}

double twin_sum_S(int64_t h, uint64_t x, int threads) {
    validate_h_x(h, x);
    const std::vector<double> lam = mangoldt_table(x + static_cast<uint64_t>(h), threads);
    return twin_sum_S(lam, h, x, threads);
}

double twin_sum_S(std::span<const double> lam, int64_t h, uint64_t x, int threads) {
    validate_h_x(h, x);
    const uint64_t uh = static_cast<uint64_t>(h);
    if (lam.size() < x + uh + 1) throw std::invalid_argument("twin_sum_S: table too short");
    if (x < 1) return 0.0;
    return kernels::dot(lam.subspan(1, x), lam.subspan(1 + uh, x), threads);
}

namespace {

// sum over n <= x - h of u[n] * w[n + h] with u, w defined on [0..x].
double pair_sum(const std::vector<double>& u, const std::vector<double>& w, uint64_t x, int64_t h,
                int threads) {
    const uint64_t uh = static_cast<uint64_t>(h);
    if (x <= uh) return 0.0;
    const size_t len = static_cast<size_t>(x - uh);
    return kernels::dot(std::span<const double>(u.data() + 1, len),
                        std::span<const double>(w.data() + 1 + uh, len), threads);
}

std::vector<double> mul3(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& c, int threads) {
    std::vector<double> out(a.size());
    kernels::multiply(a, b, out, threads);
    kernels::multiply(out, c, out, threads);
    return out;
}

}  // namespace

double sieved_star_sum(const ExperimentContext& ctx) {
    const uint64_t x = ctx.cfg.x;
    std::vector<double> u(static_cast<size_t>(x) + 1, 0.0);
    kernels::multiply(ctx.theta_d, ctx.decomp.lambda_star.v, u, ctx.cfg.threads);
    std::vector<double> um(u.size());
    kernels::multiply(u, ctx.mask, um, ctx.cfg.threads);
    return pair_sum(um, u, x, ctx.cfg.h, ctx.cfg.threads);
}

double tail_sum_T(const ExperimentContext& ctx, bool negative_shift) {
    const uint64_t x = ctx.cfg.x;
    const int threads = ctx.cfg.threads;
    // theta (Lambda + Lambda^star) and theta Lambda_sub
    std::vector<double> lam_plus(static_cast<size_t>(x) + 1, 0.0);
    for (uint64_t m = 1; m <= x; ++m)
        lam_plus[m] = ctx.decomp.mangoldt[m] + ctx.decomp.lambda_star[m];
    std::vector<double> p(lam_plus.size());
    kernels::multiply(ctx.theta_d, lam_plus, p, threads);
    std::vector<double> q(lam_plus.size());
    kernels::multiply(ctx.theta_d, ctx.decomp.lambda_sub.v, q, threads);
    if (!negative_shift) {
        // T_h: factor (Lambda + Lambda^star) sits at m = n + h
        std::vector<double> qm(q.size());
        kernels::multiply(q, ctx.mask, qm, threads);
        return pair_sum(qm, p, x, ctx.cfg.h, threads);
    }
    // T_{-h}: the roles of the two factors swap across the same window
    std::vector<double> pm(p.size());
    kernels::multiply(p, ctx.mask, pm, threads);
    return pair_sum(pm, q, x, ctx.cfg.h, threads);
}

double V_sum(const ExperimentContext& ctx) {
    const uint64_t x = ctx.cfg.x;
    const int threads = ctx.cfg.threads;
    std::vector<double> v1(static_cast<size_t>(x) + 1, 0.0);
    kernels::multiply(ctx.theta_d, ctx.maj.c.v, v1, threads);
    std::vector<double> v2 = mul3(ctx.theta_d, ctx.maj.a.v, ctx.mask, threads);
    return pair_sum(v2, v1, x, ctx.cfg.h, threads);
}

PartitionCheck partition_check(const ExperimentContext& ctx) {
    PartitionCheck pc;
    const uint64_t x = ctx.cfg.x;
    const std::vector<double> lam = mangoldt_table(x + static_cast<uint64_t>(ctx.cfg.h),
                                                   ctx.cfg.threads);
    pc.s_raw = twin_sum_S(lam, ctx.cfg.h, x, ctx.cfg.threads);
    pc.s_star = sieved_star_sum(ctx);
    pc.t_pos = tail_sum_T(ctx, false);
    pc.t_neg = tail_sum_T(ctx, true);
    pc.residual = std::fabs(pc.s_raw - (pc.s_star + 0.5 * (pc.t_pos + pc.t_neg)));
    const double lx = std::log(static_cast<double>(x));
    pc.budget = (static_cast<double>(ctx.cfg.h) + ctx.cfg.z) * lx * lx;
    return pc;
}

double congruence_sum_A(int64_t h, uint64_t x, uint64_t u, uint64_t v, const RealCharacter& chi,
                        int threads) {
    validate_h_x(h, x);
    if (u < 1 || v < 1) throw std::invalid_argument("congruence_sum_A: u, v >= 1");
    const uint64_t uh = static_cast<uint64_t>(h);
    if (v > x) return 0.0;

    // lambda' = chi * log on [1, x]
    ArithSeq lp(x);
    const std::vector<int8_t> chi_tab = chi.chi_table();
    const uint64_t D = chi.modulus;
    std::vector<double> logs(static_cast<size_t>(x) + 1, 0.0);
    for (uint64_t e = 1; e <= x; ++e) logs[e] = std::log(static_cast<double>(e));
    parallel_for(1, x + 1, kDefaultSegment, threads, [&](uint64_t lo, uint64_t hi_excl) {
        const uint64_t hi = hi_excl - 1;
        for (uint64_t d = 1; d <= hi; ++d) {
            const int c = chi_tab[d % D];
            if (c == 0) continue;
            const double cd = static_cast<double>(c);
            for (uint64_t e = (lo + d - 1) / d; d * e <= hi; ++e) lp[d * e] += cd * logs[e];
        }
    });

    const std::vector<double> mask = coprime_mask(x, uh);
    double s = 0.0, comp = 0.0;
    for (uint64_t n = v; n + uh <= x; n += v) {
        if ((n + uh) % u != 0) continue;
        if (mask[n] == 0.0) continue;
        const double term = lp[n + uh] * lp[n];
        const double yv = term - comp;
        const double t = s + yv;
        comp = (t - s) - yv;
        s = t;
    }
    return s;
}

EquidistScan equidistribution_scan(uint64_t n, const RealCharacter& chi, double y, double z,
                                   int64_t h, uint64_t moduli_cap, int threads) {
    validate_h_x(h, n);
    const uint64_t uh = static_cast<uint64_t>(h);
    const std::vector<uint64_t> excl = prime_divisors(uh);
    const SieveWeights w = build_weights(z, y, excl, Parity::upper, Construction::brun);
    const DensityParams dp = DensityParams::defaults(17, z);
    const Majorants maj = majorants(n, chi, static_cast<uint64_t>(std::llround(y)), dp, threads);
    const std::vector<int32_t> th = theta_table(w, n, threads);
    const std::vector<double> mask = coprime_mask(n, uh);

    // A(n) = theta(n) a(n) [gcd(n,h)=1]
    std::vector<double> A(static_cast<size_t>(n) + 1, 0.0);
    for (uint64_t m = 1; m <= n; ++m) A[m] = th[m] * maj.a[m] * mask[m];

    // divisor sums D(e) on demand
    std::unordered_map<uint64_t, double> dsum;
    const auto divisor_sum = [&](uint64_t e) {
        auto it = dsum.find(e);
        if (it != dsum.end()) return it->second;
        double s = 0.0, comp = 0.0;
        for (uint64_t m = e; m <= n; m += e) {
            const double yv = A[m] - comp;
            const double t = s + yv;
            comp = (t - s) - yv;
            s = t;
        }
        dsum.emplace(e, s);
        return s;
    };

    EquidistScan scan;
    double norm_sum = 0.0;
    uint64_t norm_count = 0;
    for (uint64_t q = 1; q <= moduli_cap; ++q) {
        // moduli arise as [d, q'] with both parts coprime to h
        if (std::gcd(q, uh) != 1) continue;
        EquidistRow row;
        row.modulus = q;
        // class sum over n == -h (mod q)
        const uint64_t res = (q - uh % q) % q;
        double cs = 0.0, comp = 0.0;
        for (uint64_t m = (res == 0) ? q : res; m <= n; m += q) {
            const double yv = A[m] - comp;
            const double t = cs + yv;
            comp = (t - cs) - yv;
            cs = t;
        }
        row.class_sum = cs;
        // coprime main term via Moebius over the radical of q
        double coprime = 0.0;
        const std::vector<uint64_t> ps = prime_divisors(q);
        const size_t k = ps.size();
        for (uint64_t bitsmask = 0; bitsmask < (uint64_t{1} << k); ++bitsmask) {
            uint64_t e = 1;
            int sign = 1;
            for (size_t i = 0; i < k; ++i)
                if (bitsmask & (uint64_t{1} << i)) {
                    e *= ps[i];
                    sign = -sign;
                }
            coprime += sign * divisor_sum(e);
        }
        row.main = coprime / static_cast<double>(euler_phi(q));
        row.remainder = row.class_sum - row.main;
        if (row.main != 0.0) {
            row.normalized = std::fabs(row.remainder) / row.main;
            scan.max_normalized = std::max(scan.max_normalized, row.normalized);
            norm_sum += row.normalized;
            ++norm_count;
        } else {
            row.normalized = std::nan("");
        }
        scan.rows.push_back(row);
    }
    scan.mean_normalized = norm_count ? norm_sum / static_cast<double>(norm_count) : 0.0;
    return scan;
}

ShiftProbe shift_invariance_probe(const ExperimentConfig& cfg, uint64_t k) {
    if (k < 1) throw std::invalid_argument("shift_invariance_probe: k >= 1");
    if (std::gcd(static_cast<uint64_t>(cfg.h), k) != 1)
        throw std::invalid_argument("shift_invariance_probe: gcd(h, k) = 1 required");
    const uint64_t hk = static_cast<uint64_t>(cfg.h) * k;
    if (hk > cfg.x) throw std::invalid_argument("shift_invariance_probe: hk <= x required");
    ShiftProbe probe;
    {
        const ExperimentContext ctx = make_context(cfg);
        probe.s_star_h = sieved_star_sum(ctx);
    }
    {
        ExperimentConfig cfg2 = cfg;
        cfg2.h = static_cast<int64_t>(hk);
        const ExperimentContext ctx2 = make_context(cfg2);
        probe.s_star_hk = sieved_star_sum(ctx2);
    }
    probe.gap = probe.s_star_h - probe.s_star_hk;
    const double x = static_cast<double>(cfg.x);
    const double lx = std::log(x);
    const double scale = x * std::pow(lx, 6.0) * (psi(k) - 1.0) + x / (lx * lx);
    probe.normalized = std::fabs(probe.gap) / scale;
    return probe;
}

ExperimentReport shift_average(int64_t h, uint64_t x, uint64_t w, uint64_t big_k, int threads) {
    validate_h_x(h, x);
    if (w < 2) throw std::invalid_argument("shift_average: w >= 2");
    if (big_k < 1) throw std::invalid_argument("shift_average: K >= 1");
    const uint64_t uh = static_cast<uint64_t>(h);
    if (x + uh * big_k > kMaxSupported) throw std::range_error("shift_average: x + hK above 2^50");

    ExperimentReport rep;
    rep.config["h"] = std::to_string(h);
    rep.config["x"] = std::to_string(x);
    rep.config["w"] = std::to_string(w);
    rep.config["bigk"] = std::to_string(big_k);

    // primes of h P(w): all p | h plus all p < w
    std::vector<uint64_t> ps = prime_divisors(uh);
    for (uint64_t p : sieve_primes(w - 1))
        ps.push_back(p);
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

    // direct enumeration of K
    std::vector<uint64_t> kset;
    for (uint64_t k = 1; k <= big_k; ++k) {
        bool ok = true;
        for (uint64_t p : ps)
            if (k % p == 0) {
                ok = false;
                break;
            }
        if (ok) kset.push_back(k);
    }

    // inclusion-exclusion count and the product form
    if (ps.size() > 30) throw std::range_error("shift_average: too many primes in h P(w)");
    int64_t ie_count = 0;
    for (uint64_t m = 0; m < (uint64_t{1} << ps.size()); ++m) {
        uint64_t d = 1;
        int sign = 1;
        bool over = false;
        for (size_t i = 0; i < ps.size(); ++i)
            if (m & (uint64_t{1} << i)) {
                if (d > big_k / ps[i]) {
                    over = true;  // d alone already exceeds K; floor(K/d) = 0
                    break;
                }
                d *= ps[i];
                sign = -sign;
            }
        if (over) continue;
        ie_count += sign * static_cast<int64_t>(big_k / d);
    }
    double product_form = static_cast<double>(big_k);
    for (uint64_t p : ps) product_form *= 1.0 - 1.0 / static_cast<double>(p);

    rep.add("K_size_vs_inclusion_exclusion", x, h, static_cast<double>(kset.size()),
            static_cast<double>(ie_count));
    rep.add("K_size_vs_product", x, h, static_cast<double>(kset.size()), product_form);

    double psi_sum = 0.0;
    for (uint64_t k : kset) psi_sum += psi(k);
    rep.add("psi_sum_vs_K_size", x, h, psi_sum, static_cast<double>(kset.size()));

    const SingularConstants sc = twin_constants(h, 10000000);
    if (kset.empty()) {
        rep.warnings.push_back("K is empty: every k <= K shares a factor with h P(w)");
        rep.add("S_hk_average", x, h, 0.0, sc.B * sc.C * static_cast<double>(x));
        return rep;
    }

    const std::vector<double> lam = mangoldt_table(x + uh * kset.back(), threads);
    double total = 0.0, comp = 0.0;
    for (uint64_t k : kset) {
        const double s = twin_sum_S(lam, static_cast<int64_t>(uh * k), x, threads);
        const double yv = s - comp;
        const double t = total + yv;
        comp = (t - total) - yv;
        total = t;
    }
    const double avg = total / static_cast<double>(kset.size());
    rep.add("S_hk_average", x, h, avg, sc.B * sc.C * static_cast<double>(x));
    return rep;
}

ExperimentReport theorem_error_report(int64_t h, uint64_t x, const RealCharacter& chi,
                                      int threads) {
    validate_h_x(h, x);
    ExperimentReport rep;
    rep.config["h"] = std::to_string(h);
    rep.config["x"] = std::to_string(x);
    rep.config["disc"] = std::to_string(chi.disc);
    const double s = twin_sum_S(h, x, threads);
    const SingularConstants sc = twin_constants(h, 10000000);
    const double main = sc.B * sc.C * static_cast<double>(x);
    const double e = (s - main) / static_cast<double>(x);
    const double lx = std::log(static_cast<double>(x));
    const double l1 = l_one(chi, 1e-12).value;
    rep.add("S_h", x, h, s, main);
    rep.add("E", x, h, e, 0.0);
    rep.add("budget_L1_logx", x, h, l1 * lx, 0.0);
    rep.add("budget_inv_logx", x, h, 1.0 / lx, 0.0);
    return rep;
}

std::vector<double> twin_sum_sweep(int64_t h, const std::vector<uint64_t>& xs, int threads) {
    if (xs.empty()) return {};
    uint64_t xmax = 0;
    for (uint64_t x : xs) xmax = std::max(xmax, x);
    validate_h_x(h, xmax);
    const std::vector<double> lam = mangoldt_table(xmax + static_cast<uint64_t>(h), threads);
    std::vector<double> out;
    out.reserve(xs.size());
    for (uint64_t x : xs) out.push_back(twin_sum_S(lam, h, x, threads));
    return out;
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> m;
    m["h"] = std::to_string(cfg.h);
    m["x"] = std::to_string(cfg.x);
    m["disc"] = std::to_string(cfg.disc);
    m["y"] = format_double(cfg.y);
    m["z"] = format_double(cfg.z);
    m["r"] = std::to_string(cfg.r);
    m["construction"] = cfg.construction == Construction::brun ? "brun" : "beta";
    m["preset"] = cfg.preset == Preset::desk ? "desk" : "paper";
    return m;
}

}  // namespace sievelab
