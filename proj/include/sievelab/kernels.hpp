#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

// Data-parallel reduction kernels. Every operation is defined by the scalar
// reference implementation; the AVX2/NEON variants are selected once at
// startup (overridable with SIEVELAB_KERNEL=scalar|avx2|neon) and are
// equivalence-tested against the reference.
//
// Reductions are blocked: the input is cut into fixed-size blocks, each block
// is reduced by the active kernel, and the per-block results are combined by
// a fixed pairwise tree. The block grid does not depend on the thread count,
// so results are bit-identical for any `threads` value on a given machine.

namespace sievelab::kernels {

inline constexpr size_t kBlock = 4096;

enum class Isa { scalar, avx2, neon };

struct BlockOps {
    double (*sum)(const double*, size_t);
    double (*dot)(const double*, const double*, size_t);
    void (*mul)(const double*, const double*, double*, size_t);
    double (*max_abs_diff)(const double*, const double*, size_t);
};

const BlockOps& scalar_ops();
const BlockOps* avx2_ops();  // null when not compiled in
const BlockOps* neon_ops();  // null when not compiled in

Isa active_isa();
void force_isa(Isa isa);  // throws std::invalid_argument if unavailable
std::string isa_name(Isa isa);

// Blocked, deterministic, optionally threaded reductions.
double sum(std::span<const double> a, int threads = 1);
double dot(std::span<const double> a, std::span<const double> b, int threads = 1);
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out,
              int threads = 1);
double max_abs_diff(std::span<const double> a, std::span<const double> b, int threads = 1);

// sum a[i] * b[i + offset]; b must extend at least offset + a.size() entries.
double dot_shifted(std::span<const double> a, std::span<const double> b, size_t offset,
                   int threads = 1);

}  // namespace sievelab::kernels
