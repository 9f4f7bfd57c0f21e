#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sievelab/arith.hpp"
#include "sievelab/characters.hpp"

// The convolution system around a real character chi:
//   lambda  = chi * 1,  lambda' = chi * log = lambda * Lambda,  nu = mu chi * mu,
// the exact Moebius inversion Lambda = lambda' * nu, the splitting
// Lambda = Lambda^star + Lambda_sub at parameter y (divisor b < y vs b >= y),
// and verification of the pointwise bounds
//   0 <= Lambda <= lambda' <= tau log,  |nu| <= lambda <= tau.

namespace sievelab {

struct DecompSet {
    RealCharacter chi;
    uint64_t n = 0;
    ArithSeq lambda;        // chi * 1
    ArithSeq lambda_prime;  // chi * log
    ArithSeq nu;            // mu chi * mu
    std::vector<double> mangoldt;  // sieved Lambda(0..n), the reference
    std::vector<int8_t> mu;        // sieved mu(0..n)
    std::vector<uint32_t> tau;     // sieved tau(0..n)

    std::optional<uint64_t> y;
    ArithSeq lambda_star;  // b < y part
    ArithSeq lambda_sub;   // b >= y part
};

DecompSet build_decomp(const RealCharacter& chi, uint64_t n, int threads = 1);

// max over n <= N of |Lambda(n) - (lambda' * nu)(n)|; contract: < 1e-9 log N.
double verify_inversion(const DecompSet& ds, int threads = 1);

// Fills lambda_star / lambda_sub; their sum recombines to Lambda.
void split(DecompSet& ds, uint64_t y, int threads = 1);

struct BoundViolation {
    uint64_t n;
    std::string quantity;
    double lhs;
    double rhs;
};

// Checks the pointwise bounds on [1, N]; integer-valued comparisons are
// exact, log-valued ones use absolute tolerance 1e-9.
std::vector<BoundViolation> verify_pointwise_bounds(const DecompSet& ds, int threads = 1);

}  // namespace sievelab
