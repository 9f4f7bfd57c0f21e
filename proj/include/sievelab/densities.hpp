#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sievelab/sieve_weights.hpp"

// Density machinery for the deformed divisor function: the coefficients
// gamma(d), their generating Dirichlet series D(s) = prod zeta(s+1-eps_i),
// the local-factor remover P_v(s), the sieve density g_eps(q), the residues
// R(i) of D(s)/s, and the Hardy-Littlewood twin constants B, C(h).

namespace sievelab {

struct DensityParams {
    unsigned r = 17;
    double z = 0;             // 0 when constructed from an explicit eps array
    std::vector<double> eps;  // eps[0] = 0, ..., eps[r]

    // eps_i = i / log z; requires z > 1.
    static DensityParams defaults(unsigned r, double z);
    // Explicit deformation; requires eps[0] == 0, nondecreasing, finite.
    // Coincident values are tolerated here and rejected by the operations
    // that need distinctness (residues).
    static DensityParams from_eps(std::vector<double> eps);
};

// Riemann zeta for real s != 1 by Euler-Maclaurin (direct terms to a small
// cutoff plus eight correction terms); at least 12 significant digits for
// s in (-12, 60].
double zeta_em(double s);

// gamma(p^e) = (1 - 1/p) sum over weak compositions e = a_1+...+a_r of
// p^(a_1 eps_1 + ... + a_r eps_r).
double gamma_prime_power(uint64_t p, unsigned e, const DensityParams& dp);

// multiplicative extension; factorizes d by trial division.
double gamma_coeff(uint64_t d, const DensityParams& dp);

struct DSeriesCheck {
    double lhs = 0;         // sum_{d <= cutoff} gamma(d) / (phi(d) d^s)
    double rhs = 0;         // prod_i zeta(s+1-eps_i)
    double gap = 0;         // rhs - lhs
    double tail_bound = 0;  // sum_{d > cutoff} tau_r(d) d^(eps_r - s - 1)
    bool pass = false;
};

// requires s + 1 - eps_r > 1 (absolute convergence).
DSeriesCheck d_series_check(double s, const DensityParams& dp, uint64_t cutoff, int threads = 1);

// P_v(s) = prod_{p | v} prod_i (1 - p^(eps_i - s - 1)); depends only on the
// radical of v.
double local_factor_P(uint64_t v, double s, const DensityParams& dp);

// closed form of the sieve density at a prime:
// g_eps(p) = 1 - ((p-2)/(p-1)) P_p(eps).
double g_density_prime(uint64_t p, unsigned eps_index, const DensityParams& dp);

struct GDensityResult {
    std::optional<double> closed;  // multiplicative closed form (squarefree q)
    double summed = 0;             // truncated c | q^infinity sum
    double tail_bound = 0;         // rigorous bound on the dropped part; inf if divergent
};

// trunc bounds the enumeration by c <= trunc, compared in log space so trunc
// may exceed 2^64.
GDensityResult sieve_density_g(uint64_t q, unsigned eps_index, const DensityParams& dp,
                               double trunc);

// R(i) = kappa(i) prod_{j != i} zeta(1 + eps_i - eps_j) with kappa(0) = 1 and
// kappa(i) = 1/eps_i; requires pairwise distinct eps.
double residue_R(unsigned i, const DensityParams& dp);

struct SingularConstants {
    double B = 0;           // 2 prod_{p>2} (1 - 1/(p-1)) (1 - 1/p)^{-1}
    double C = 1;           // prod_{p | h, p > 2} (1 - 1/(p-1))^{-1}
    int64_t h = 0;
    uint64_t cutoff = 0;    // primes used for B
    double tail_bound = 0;  // rigorous bound on |B - B_infinity|
};

// h even nonzero; prime_cutoff >= 1e5.
SingularConstants twin_constants(int64_t h, uint64_t prime_cutoff);

double singular_series_C(int64_t h);

// G_v(eps) = sum_{q < y, (q,v)=1} xi_q g_eps(q), exact over the support.
double G_v(unsigned eps_index, uint64_t v, const SieveWeights& w, const DensityParams& dp);

}  // namespace sievelab
