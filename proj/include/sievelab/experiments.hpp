#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sievelab/arith.hpp"
#include "sievelab/characters.hpp"
#include "sievelab/densities.hpp"
#include "sievelab/lambda_decomp.hpp"
#include "sievelab/report.hpp"
#include "sievelab/sieve_weights.hpp"

// Desk-scale computation of the twin sums and their sieved counterparts:
// S_h, the sieved star sum, the tail sums T_{+-h}, the majorant sum V_h,
// congruence sums, equidistribution remainders, shift-invariance probes and
// the closing shift average.

namespace sievelab {

enum class Preset { desk, paper };

struct ExperimentConfig {
    int64_t h = 2;
    uint64_t x = 1000000;
    int64_t disc = 5;
    double y = 10000.0;  // sieve level, also the splitting parameter
    double z = 10.0;     // sifting range
    Construction construction = Construction::brun;
    unsigned r = 17;
    Preset preset = Preset::desk;
    int threads = 1;
};

// Scaled-down regime keeping every structure nondegenerate at reachable x:
// z = 10, y = max(100, x^(1/3)).
ExperimentConfig desk_config(int64_t h, uint64_t x, int64_t disc);
// The strict regime z^72 = y = x^(1/20), D^4 <= z, y <= x^(1/9); throws for
// any x reachable on a desk (z falls below 2).
ExperimentConfig paper_config(int64_t h, uint64_t x, int64_t disc);

struct Majorants {
    ArithSeq a;  // sum_{ab=n, b>=y} tau(a) lambda(b)
    ArithSeq b;  // sum_{ab=m, b<y} tau(a) tau(b)
    ArithSeq c;  // sum_{d|m, d^3 < N} gamma(d)
};

Majorants majorants(uint64_t n, const RealCharacter& chi, uint64_t y, const DensityParams& dp,
                    int threads = 1);

// Precomputed tables shared by the sieved sums at one config.
struct ExperimentContext {
    ExperimentConfig cfg;
    RealCharacter chi;
    DensityParams density;
    SieveWeights weights;  // upper-bound weights, primes of h excluded
    DecompSet decomp;      // on [1, x], split at y
    std::vector<double> theta_d;  // theta(n) as double, [0..x]
    std::vector<double> mask;     // [gcd(n, h) = 1] as double, [0..x]
    Majorants maj;
};

ExperimentContext make_context(const ExperimentConfig& cfg);

// sum_{n <= x} Lambda(n) Lambda(n+h); sieves its own table.
double twin_sum_S(int64_t h, uint64_t x, int threads = 1);
// Same on a caller-provided table lam[0..>=x+h].
double twin_sum_S(std::span<const double> lam, int64_t h, uint64_t x, int threads = 1);

// All pair sums below run over m - n = h, 0 < m, n <= x, gcd(mn, h) = 1.
double sieved_star_sum(const ExperimentContext& ctx);
// T_h; negative_shift swaps the roles of the two factors (T_{-h}).
double tail_sum_T(const ExperimentContext& ctx, bool negative_shift = false);
double V_sum(const ExperimentContext& ctx);

struct PartitionCheck {
    double s_raw = 0;     // sum Lambda(n) Lambda(n+h), n <= x
    double s_star = 0;    // sieved star sum
    double t_pos = 0;     // T_h
    double t_neg = 0;     // T_{-h}
    double residual = 0;  // |s_raw - (s_star + (t_pos + t_neg)/2)|
    double budget = 0;    // (h + z) log^2 x
};

PartitionCheck partition_check(const ExperimentContext& ctx);

// sum over m - n = h, u | m, v | n, 0 < m,n <= x, gcd(mn,h)=1 of
// lambda'(m) lambda'(n).
double congruence_sum_A(int64_t h, uint64_t x, uint64_t u, uint64_t v, const RealCharacter& chi,
                        int threads = 1);

struct EquidistRow {
    uint64_t modulus;
    double class_sum;   // over n == -h (mod q'), gcd(n, h) = 1
    double main;        // coprime average: (1/phi(q')) sum_{(n, q'h)=1}
    double remainder;   // class_sum - main
    double normalized;  // |remainder| / main (NaN when main == 0)
};

struct EquidistScan {
    std::vector<EquidistRow> rows;
    double max_normalized = 0;
    double mean_normalized = 0;
};

EquidistScan equidistribution_scan(uint64_t n, const RealCharacter& chi, double y, double z,
                                   int64_t h, uint64_t moduli_cap, int threads = 1);

struct ShiftProbe {
    double s_star_h = 0;
    double s_star_hk = 0;
    double gap = 0;         // s_star_h - s_star_hk
    double normalized = 0;  // |gap| / (x log^6 x (psi(k)-1) + x log^-2 x)
};

ShiftProbe shift_invariance_probe(const ExperimentConfig& cfg, uint64_t k);

// Averages S_{hk}(x) over K = {k <= K : gcd(k, h P(w)) = 1} and compares
// the average to B C(h) x; |K| is verified against inclusion-exclusion.
ExperimentReport shift_average(int64_t h, uint64_t x, uint64_t w, uint64_t big_k,
                               int threads = 1);

// E(x) = (S_h(x) - B C(h) x)/x tabulated against the budgets
// L(1,chi) log x and 1/log x; report-only.
ExperimentReport theorem_error_report(int64_t h, uint64_t x, const RealCharacter& chi,
                                      int threads = 1);

// S_h at several prefixes of one sieved table (for sweep/gnuplot output).
std::vector<double> twin_sum_sweep(int64_t h, const std::vector<uint64_t>& xs, int threads = 1);

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

}  // namespace sievelab
