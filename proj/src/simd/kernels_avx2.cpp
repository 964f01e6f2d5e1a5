// Compiled with -mavx2 on x86-64 only. Must be bit-identical to the scalar
// reference, so no FMA and the canonical reduction order.

#include "kernels_impl.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace pnpf::simd::detail {
namespace {

template <class Op>
inline void binary(const double* a, const double* b, double* out,
                   std::size_t n, Op op) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  if (i < n) {
    alignas(32) double ta[4] = {1.0, 1.0, 1.0, 1.0};
    alignas(32) double tb[4] = {1.0, 1.0, 1.0, 1.0};
    alignas(32) double to[4];
    for (std::size_t j = i; j < n; ++j) {
      ta[j - i] = a[j];
      tb[j - i] = b[j];
    }
    _mm256_store_pd(to, op(_mm256_load_pd(ta), _mm256_load_pd(tb)));
    for (std::size_t j = i; j < n; ++j) out[j] = to[j - i];
  }
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); });
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); });
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); });
}

void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); });
}

void scale(const double* a, double s, double* out, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(sv, _mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) out[i] = s * a[i];
}

void shift(const double* a, double s, double* out, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), sv));
  }
  for (; i < n; ++i) out[i] = a[i] + s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

inline double combine_lanes(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(const double* a, std::size_t n) {
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  }
  double total = combine_lanes(acc);
  for (std::size_t i = body; i < n; ++i) total = total + a[i];
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  const std::size_t body = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double total = combine_lanes(acc);
  for (std::size_t i = body; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

double max_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(_mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)), m);
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, m);
  double r = 0.0;
  for (double v : lane) r = v > r ? v : r;
  for (; i < n; ++i) {
    const double v = a[i] < 0.0 ? -a[i] : a[i];
    r = v > r ? v : r;
  }
  return r;
}

// [m0, m1, m2, m3] -> [m0, m0, m1, m1] and [m2, m2, m3, m3]
inline void spread(__m256d mv, __m256d& lo, __m256d& hi) {
  lo = _mm256_permute4x64_pd(mv, 0b01010000);
  hi = _mm256_permute4x64_pd(mv, 0b11111010);
}

void cmul_real(const double* in, const double* m, double* out,
               std::size_t modes) {
  std::size_t k = 0;
  for (; k + 4 <= modes; k += 4) {
    __m256d lo, hi;
    spread(_mm256_loadu_pd(m + k), lo, hi);
    _mm256_storeu_pd(out + 2 * k,
                     _mm256_mul_pd(lo, _mm256_loadu_pd(in + 2 * k)));
    _mm256_storeu_pd(out + 2 * k + 4,
                     _mm256_mul_pd(hi, _mm256_loadu_pd(in + 2 * k + 4)));
  }
  for (; k < modes; ++k) {
    out[2 * k] = m[k] * in[2 * k];
    out[2 * k + 1] = m[k] * in[2 * k + 1];
  }
}

// [re, im] -> [-(m im), m re]
inline __m256d times_i(__m256d v, __m256d mm) {
  const __m256d flip = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
  const __m256d swapped = _mm256_permute_pd(v, 0b0101);
  return _mm256_xor_pd(_mm256_mul_pd(mm, swapped), flip);
}

void cmul_imag(const double* in, const double* m, double* out,
               std::size_t modes) {
  std::size_t k = 0;
  for (; k + 4 <= modes; k += 4) {
    __m256d lo, hi;
    spread(_mm256_loadu_pd(m + k), lo, hi);
    _mm256_storeu_pd(out + 2 * k, times_i(_mm256_loadu_pd(in + 2 * k), lo));
    _mm256_storeu_pd(out + 2 * k + 4,
                     times_i(_mm256_loadu_pd(in + 2 * k + 4), hi));
  }
  for (; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    out[2 * k] = -(m[k] * im);
    out[2 * k + 1] = m[k] * re;
  }
}

void cmul_imag_acc(const double* in, const double* m, double* out,
                   std::size_t modes) {
  std::size_t k = 0;
  for (; k + 4 <= modes; k += 4) {
    __m256d lo, hi;
    spread(_mm256_loadu_pd(m + k), lo, hi);
    const __m256d a = times_i(_mm256_loadu_pd(in + 2 * k), lo);
    const __m256d b = times_i(_mm256_loadu_pd(in + 2 * k + 4), hi);
    _mm256_storeu_pd(out + 2 * k, _mm256_add_pd(_mm256_loadu_pd(out + 2 * k), a));
    _mm256_storeu_pd(out + 2 * k + 4,
                     _mm256_add_pd(_mm256_loadu_pd(out + 2 * k + 4), b));
  }
  for (; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    out[2 * k] = out[2 * k] - m[k] * im;
    out[2 * k + 1] = out[2 * k + 1] + m[k] * re;
  }
}

double weighted_power(const double* in, const double* w, std::size_t modes) {
  const std::size_t body = modes - modes % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < body; k += 4) {
    const __m256d a = _mm256_loadu_pd(in + 2 * k);
    const __m256d b = _mm256_loadu_pd(in + 2 * k + 4);
    // hadd gives [|c0|^2, |c2|^2, |c1|^2, |c3|^2]; restore mode order.
    const __m256d p = _mm256_permute4x64_pd(
        _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)), 0b11011000);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + k), p));
  }
  double total = combine_lanes(acc);
  for (std::size_t k = body; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    total = total + w[k] * (re * re + im * im);
  }
  return total;
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      "avx2",   add,       sub,       mul,           div,
      scale,    shift,     axpy,      sum,           dot,
      max_abs,  cmul_real, cmul_imag_acc, cmul_imag, weighted_power};
  return &table;
}

}  // namespace pnpf::simd::detail

#else

namespace pnpf::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace pnpf::simd::detail

#endif
