#pragma once

#include <cstdint>
#include <optional>
#include <vector>

// Real primitive Dirichlet characters mod D realized by the Kronecker symbol
// of a fundamental discriminant, evaluation of L(1,chi) with a rigorously
// bounded tail, the exceptionality measure eta(D) = L(1,chi) log D, and a
// scan ranking discriminants by eta.

namespace sievelab {

// Kronecker symbol (d|n) for d != 0, n >= 0. (d|0) is 1 when |d| = 1 and 0
// otherwise.
int kronecker_symbol(int64_t d, uint64_t n);

// d == 1 (mod 4) squarefree, or d = 4m with m == 2,3 (mod 4) squarefree.
bool is_fundamental(int64_t d);

struct RealCharacter {
    int64_t disc = 0;      // fundamental discriminant, sign retained
    uint64_t modulus = 0;  // |disc|

    static RealCharacter make(int64_t d);  // throws unless d is fundamental

    int chi(uint64_t n) const { return kronecker_symbol(disc, n % modulus); }
    // chi(0..D-1); periodic extension covers all n.
    std::vector<int8_t> chi_table() const;

    mutable std::optional<double> cached_l1;
    mutable std::optional<double> cached_eta;
};

struct LOneResult {
    double value = 0;
    double tail_bound = 0;  // rigorous bound on the dropped tail
    uint64_t terms = 0;     // direct terms summed before the tail expansion
};

// L(1,chi) = sum chi(n)/n. Sums A = ceil(64) periods directly, then expands
// the remainder in inverse powers of the period boundary; the period sums of
// chi vanish, so the expansion starts at the first moment and the dropped
// remainder is bounded by sum_{b>=A} b^-(K+1).
LOneResult l_one(const RealCharacter& chi, double tol);

// L(1,chi) log D; requires D >= 3.
double eta(const RealCharacter& chi);

// Caches l1/eta on the character and returns them.
double cached_l1(const RealCharacter& chi);
double cached_eta(const RealCharacter& chi);

struct ScanRow {
    int64_t disc;
    uint64_t modulus;
    double l1;
    double eta;
};

// All fundamental d with d_min <= |d| <= d_max (both signs), ascending by
// eta, ties by |d|.
std::vector<ScanRow> scan_exceptional(uint64_t d_min, uint64_t d_max, size_t top_n,
                                      int threads = 1);

}  // namespace sievelab
