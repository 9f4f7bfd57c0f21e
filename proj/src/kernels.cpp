#include "sievelab/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "sievelab/parallel.hpp"

namespace sievelab::kernels {

namespace {

double scalar_sum(const double* a, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double scalar_dot(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void scalar_mul(const double* a, const double* b, double* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double scalar_max_abs_diff(const double* a, const double* b, size_t n) {
    double m = 0.0;
    for (size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

const BlockOps kScalar{scalar_sum, scalar_dot, scalar_mul, scalar_max_abs_diff};

struct Dispatch {
    Isa isa = Isa::scalar;
    const BlockOps* ops = &kScalar;
};

Dispatch pick_default() {
    Dispatch d;
    if (const char* env = std::getenv("SIEVELAB_KERNEL")) {
        std::string want = env;
        if (want == "scalar") return d;
        if (want == "avx2" && avx2_ops()) return {Isa::avx2, avx2_ops()};
        if (want == "neon" && neon_ops()) return {Isa::neon, neon_ops()};
        return d;  // unknown or unavailable: fall back to scalar
    }
#if defined(SIEVELAB_BUILD_AVX2)
    if (__builtin_cpu_supports("avx2") && avx2_ops()) return {Isa::avx2, avx2_ops()};
#endif
#if defined(SIEVELAB_BUILD_NEON)
    if (neon_ops()) return {Isa::neon, neon_ops()};
#endif
    return d;
}

Dispatch& dispatch() {
    static Dispatch d = pick_default();
    return d;
}

// Pairwise combination with a tree shape fixed by the value count.
double pairwise(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    size_t n = v.size();
    while (n > 1) {
        const size_t half = n / 2;
        for (size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n & 1) {
            v[half] = v[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return v[0];
}

template <typename BlockFn>
double blocked_reduce(size_t n, int threads, bool maximum, BlockFn block_fn) {
    if (n == 0) return 0.0;
    const size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(0, blocks, 1, threads, [&](uint64_t lo, uint64_t hi) {
        for (uint64_t blk = lo; blk < hi; ++blk) {
            const size_t off = blk * kBlock;
            partial[blk] = block_fn(off, std::min(kBlock, n - off));
        }
    });
    if (!maximum) return pairwise(partial);
    double m = 0.0;
    for (double p : partial) m = std::max(m, p);
    return m;
}

}  // namespace

const BlockOps& scalar_ops() { return kScalar; }

Isa active_isa() { return dispatch().isa; }

void force_isa(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            dispatch() = {Isa::scalar, &kScalar};
            return;
        case Isa::avx2:
            if (!avx2_ops()) throw std::invalid_argument("avx2 kernels unavailable");
            dispatch() = {Isa::avx2, avx2_ops()};
            return;
        case Isa::neon:
            if (!neon_ops()) throw std::invalid_argument("neon kernels unavailable");
            dispatch() = {Isa::neon, neon_ops()};
            return;
    }
    throw std::invalid_argument("unknown isa");
}

std::string isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

#if !defined(SIEVELAB_BUILD_AVX2)
const BlockOps* avx2_ops() { return nullptr; }
#endif
#if !defined(SIEVELAB_BUILD_NEON)
const BlockOps* neon_ops() { return nullptr; }
#endif

double sum(std::span<const double> a, int threads) {
    const BlockOps* ops = dispatch().ops;
    return blocked_reduce(a.size(), threads, false,
                          [&](size_t off, size_t len) { return ops->sum(a.data() + off, len); });
}

double dot(std::span<const double> a, std::span<const double> b, int threads) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    const BlockOps* ops = dispatch().ops;
    return blocked_reduce(a.size(), threads, false, [&](size_t off, size_t len) {
        return ops->dot(a.data() + off, b.data() + off, len);
    });
}

double dot_shifted(std::span<const double> a, std::span<const double> b, size_t offset,
                   int threads) {
    if (b.size() < offset + a.size()) throw std::invalid_argument("dot_shifted: b too short");
    return dot(a, b.subspan(offset, a.size()), threads);
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out,
              int threads) {
    if (a.size() != b.size() || a.size() != out.size())
        throw std::invalid_argument("multiply: length mismatch");
    const BlockOps* ops = dispatch().ops;
    const size_t n = a.size();
    if (n == 0) return;
    const size_t blocks = (n + kBlock - 1) / kBlock;
    parallel_for(0, blocks, 1, threads, [&](uint64_t lo, uint64_t hi) {
        for (uint64_t blk = lo; blk < hi; ++blk) {
            const size_t off = blk * kBlock;
            const size_t len = std::min(kBlock, n - off);
            ops->mul(a.data() + off, b.data() + off, out.data() + off, len);
        }
    });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, int threads) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
    const BlockOps* ops = dispatch().ops;
    return blocked_reduce(a.size(), threads, true, [&](size_t off, size_t len) {
        return ops->max_abs_diff(a.data() + off, b.data() + off, len);
    });
}

}  // namespace sievelab::kernels
