#include "kernels_impl.hpp"

namespace pnpf::simd::detail {
namespace {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

void scale(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = s * a[i];
}

void shift(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

// Canonical reduction: lanes over i mod 4, then ((s0 + s1) + (s2 + s3)),
// then the tail in index order.
template <class Term>
double canonical_sum(std::size_t n, Term term) {
  const std::size_t body = n - n % 4;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < body; i += 4) {
    s0 = s0 + term(i);
    s1 = s1 + term(i + 1);
    s2 = s2 + term(i + 2);
    s3 = s3 + term(i + 3);
  }
  double total = (s0 + s1) + (s2 + s3);
  for (std::size_t i = body; i < n; ++i) total = total + term(i);
  return total;
}

double sum(const double* a, std::size_t n) {
  return canonical_sum(n, [a](std::size_t i) { return a[i]; });
}

double dot(const double* a, const double* b, std::size_t n) {
  return canonical_sum(n, [a, b](std::size_t i) { return a[i] * b[i]; });
}

double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a[i] < 0.0 ? -a[i] : a[i];
    m = v > m ? v : m;
  }
  return m;
}

void cmul_real(const double* in, const double* m, double* out,
               std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    out[2 * k] = m[k] * in[2 * k];
    out[2 * k + 1] = m[k] * in[2 * k + 1];
  }
}

void cmul_imag(const double* in, const double* m, double* out,
               std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    out[2 * k] = -(m[k] * im);
    out[2 * k + 1] = m[k] * re;
  }
}

void cmul_imag_acc(const double* in, const double* m, double* out,
                   std::size_t modes) {
  for (std::size_t k = 0; k < modes; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    out[2 * k] = out[2 * k] - m[k] * im;
    out[2 * k + 1] = out[2 * k + 1] + m[k] * re;
  }
}

double weighted_power(const double* in, const double* w, std::size_t modes) {
  return canonical_sum(modes, [in, w](std::size_t k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    return w[k] * (re * re + im * im);
  });
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar", add,       sub,       mul,           div,
      scale,    shift,     axpy,      sum,           dot,
      max_abs,  cmul_real, cmul_imag_acc, cmul_imag, weighted_power};
  return table;
}

}  // namespace pnpf::simd::detail
