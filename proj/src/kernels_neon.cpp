#include "sievelab/kernels.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace sievelab::kernels {

namespace {

double neon_sum(const double* a, size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(a + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i];
    return s;
}

double neon_dot(const double* a, const double* b, size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void neon_mul(const double* a, const double* b, double* out, size_t n) {
    size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

double neon_max_abs_diff(const double* a, const double* b, size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 2 <= n; i += 2)
        m = vmaxq_f64(m, vabsq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    double r = vmaxvq_f64(m);
    for (; i < n; ++i) r = std::max(r, std::fabs(a[i] - b[i]));
    return r;
}

const BlockOps kNeon{neon_sum, neon_dot, neon_mul, neon_max_abs_diff};

}  // namespace

const BlockOps* neon_ops() { return &kNeon; }

}  // namespace sievelab::kernels

#else

namespace sievelab::kernels {
const BlockOps* neon_ops() { return nullptr; }
}  // namespace sievelab::kernels

#endif
