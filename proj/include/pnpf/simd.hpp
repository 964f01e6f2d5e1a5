#pragma once

// Pointwise arithmetic kernels with a scalar reference implementation and
// vectorized variants (AVX2 on x86-64, NEON on AArch64) chosen at runtime.
//
// Every variant produces bit-identical results to the scalar reference:
// elementwise kernels use only IEEE add/sub/mul/div (no FMA contraction), and
// reductions follow one canonical summation order (four interleaved partial
// sums over index i mod 4, combined as (s0 + s1) + (s2 + s3), then the tail
// added in index order).

#include <cstddef>
#include <string_view>
#include <vector>

namespace pnpf::simd {

struct KernelTable {
  const char* name;

  // out[i] = a[i] op b[i]; out may alias a or b.
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);

  // out[i] = s * a[i]
  void (*scale)(const double* a, double s, double* out, std::size_t n);
  // out[i] = a[i] + s
  void (*shift)(const double* a, double s, double* out, std::size_t n);
  // y[i] = y[i] + alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);

  // Interleaved complex arrays (re, im) of `modes` entries, real symbol m.
  // out[k] = m[k] * in[k]
  void (*cmul_real)(const double* in, const double* m, double* out,
                    std::size_t modes);
  // out[k] = out[k] + i * m[k] * in[k]
  void (*cmul_imag_acc)(const double* in, const double* m, double* out,
                        std::size_t modes);
  // out[k] = i * m[k] * in[k]
  void (*cmul_imag)(const double* in, const double* m, double* out,
                    std::size_t modes);
  // sum_k w[k] * (re[k]^2 + im[k]^2)
  double (*weighted_power)(const double* in, const double* w,
                           std::size_t modes);
};

/// Scalar reference implementation; always available.
const KernelTable& scalar_kernels();

/// Every variant compiled in and supported by the running CPU, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Table used by the library. Chosen on first call: the widest supported
/// variant unless the environment variable PNPF_SIMD names another one
/// ("scalar", "avx2", "neon").
const KernelTable& kernels();

/// Overrides the active table; returns false if `name` is unavailable.
bool select_kernels(std::string_view name);

}  // namespace pnpf::simd
