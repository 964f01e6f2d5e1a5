// AArch64 Advanced SIMD variant. Two float64x2 accumulators hold the four
// canonical partial sums (s0, s1) and (s2, s3).

#include "kernels_impl.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace pnpf::simd::detail {
namespace {

template <class VecOp, class ScalarOp>
inline void binary(const double* a, const double* b, double* out,
                   std::size_t n, VecOp vop, ScalarOp sop) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vop(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) out[i] = sop(a[i], b[i]);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vaddq_f64(x, y); },
         [](double x, double y) { return x + y; });
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vsubq_f64(x, y); },
         [](double x, double y) { return x - y; });
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vmulq_f64(x, y); },
         [](double x, double y) { return x * y; });
}

void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](float64x2_t x, float64x2_t y) { return vdivq_f64(x, y); },
         [](double x, double y) { return x / y; });
}

void scale(const double* a, double s, double* out, std::size_t n) {
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(sv, vld1q_f64(a + i)));
  for (; i < n; ++i) out[i] = s * a[i];
}

void shift(const double* a, double s, double* out, std::size_t n) {
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), sv));
  for (; i < n; ++i) out[i] = a[i] + s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(av, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

inline double combine(float64x2_t lo, float64x2_t hi) {
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
         (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double sum(const double* a, std::size_t n) {
  const std::size_t body = n - n % 4;
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < body; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(a + i));
    hi = vaddq_f64(hi, vld1q_f64(a + i + 2));
  }
  double total = combine(lo, hi);
  for (std::size_t i = body; i < n; ++i) total = total + a[i];
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  const std::size_t body = n - n % 4;
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < body; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = combine(lo, hi);
  for (std::size_t i = body; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

double max_abs(const double* a, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(a + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double v = a[i] < 0.0 ? -a[i] : a[i];
    r = v > r ? v : r;
  }
  return r;
}

void cmul_real(const double* in, const double* m, double* out,
               std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    vst1q_f64(out + 2 * k, vmulq_f64(vdupq_n_f64(m[k]), vld1q_f64(in + 2 * k)));
  }
}

inline float64x2_t times_i(float64x2_t v, double mk) {
  const float64x2_t prod = vmulq_f64(vdupq_n_f64(mk), vextq_f64(v, v, 1));
  // [m im, m re] -> [-(m im), m re]
  return vsetq_lane_f64(-vgetq_lane_f64(prod, 0), prod, 0);
}

void cmul_imag(const double* in, const double* m, double* out,
               std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    vst1q_f64(out + 2 * k, times_i(vld1q_f64(in + 2 * k), m[k]));
  }
}

void cmul_imag_acc(const double* in, const double* m, double* out,
                   std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    vst1q_f64(out + 2 * k, vaddq_f64(vld1q_f64(out + 2 * k),
                                     times_i(vld1q_f64(in + 2 * k), m[k])));
  }
}

double weighted_power(const double* in, const double* w, std::size_t modes) {
  const std::size_t body = modes - modes % 4;
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  for (std::size_t k = 0; k < body; k += 4) {
    const float64x2_t c0 = vld1q_f64(in + 2 * k);
    const float64x2_t c1 = vld1q_f64(in + 2 * k + 2);
    const float64x2_t c2 = vld1q_f64(in + 2 * k + 4);
    const float64x2_t c3 = vld1q_f64(in + 2 * k + 6);
    // vpaddq of squares gives [|c0|^2, |c1|^2] in re + im order.
    const float64x2_t p01 = vpaddq_f64(vmulq_f64(c0, c0), vmulq_f64(c1, c1));
    const float64x2_t p23 = vpaddq_f64(vmulq_f64(c2, c2), vmulq_f64(c3, c3));
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(w + k), p01));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(w + k + 2), p23));
  }
  double total = combine(lo, hi);
  for (std::size_t k = body; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    total = total + w[k] * (re * re + im * im);
  }
  return total;
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{
      "neon",   add,       sub,       mul,           div,
      scale,    shift,     axpy,      sum,           dot,
      max_abs,  cmul_real, cmul_imag_acc, cmul_imag, weighted_power};
  return &table;
}

}  // namespace pnpf::simd::detail

#else

namespace pnpf::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace pnpf::simd::detail

#endif
