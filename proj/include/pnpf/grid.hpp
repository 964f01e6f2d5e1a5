#pragma once

// Periodic uniform grids with Fourier pseudo-spectral calculus.
//
// Layout: values are stored row-major over axes (axis 0 slowest, the last
// axis contiguous); point (i0, ..., i_{d-1}) sits at x_a = i_a * L / N.
// Spectral coefficients follow the real-to-complex layout, the last axis
// holding N/2 + 1 nonnegative wavenumbers. Quadratures weight every point by
// the cell volume (L/N)^dim.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pnpf/aligned.hpp"

namespace pnpf {

/// Largest admissible N^dim (128 MiB per scalar field).
inline constexpr std::size_t kMaxGridPoints = std::size_t{1} << 24;

struct GridSpec {
  int dim = 3;
  int points_per_axis = 16;
  double box_length = 6.283185307179586;
};

/// Throws ConfigError unless dim in {1,2,3}, N is a power of two >= 8,
/// L > 0 and N^dim <= kMaxGridPoints.
void validate(const GridSpec& spec);

/// Whether first derivatives act on the 2/3-truncated spectrum.
enum class Dealias { Off, On };

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  static GridPtr create(const GridSpec& spec);

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;
  ~Grid();

  const GridSpec& spec() const noexcept;
  int dim() const noexcept { return spec().dim; }
  int points_per_axis() const noexcept { return spec().points_per_axis; }
  double box_length() const noexcept { return spec().box_length; }

  std::size_t size() const noexcept;
  std::size_t spectral_size() const noexcept;
  double spacing() const noexcept;
  double cell_volume() const noexcept;
  double volume() const noexcept;

  int index(std::size_t flat, int axis) const noexcept;
  double coordinate(std::size_t flat, int axis) const noexcept;

  /// Unnormalized forward transform of size() reals into spectral_size()
  /// coefficients. Buffers must come from AlignedAllocator.
  void forward(const double* in, Complex* out) const;
  /// Unnormalized inverse transform; overwrites `in`.
  void inverse(Complex* in, double* out) const;

  /// Signed integer wavenumber of a spectral mode along `axis`.
  int integer_wavenumber(std::size_t mode, int axis) const noexcept;

  /// First-derivative symbol 2*pi*m/L along `axis`, zero on the Nyquist mode.
  std::span<const double> wavenumber(int axis) const noexcept;
  /// wavenumber(axis) times dealias_mask().
  std::span<const double> truncated_wavenumber(int axis) const noexcept;
  /// Symbol of the Laplacian, -|k|^2 (Nyquist included).
  std::span<const double> laplacian_symbol() const noexcept;
  /// Symbol of (-Laplacian)^{-1} on the zero-mean subspace: 1/|k|^2, 0 at k=0.
  std::span<const double> inverse_neg_laplacian_symbol() const noexcept;
  /// 2/3-rule mask: 1 where every |m_a| < N/3, else 0.
  std::span<const double> dealias_mask() const noexcept;
  /// Number of full-spectrum modes represented by each stored coefficient.
  std::span<const double> multiplicity() const noexcept;
  /// sum over multi-indices |alpha| <= order of prod_a k_a^(2 alpha_a), with
  /// Nyquist-zeroed derivative symbols, pre-multiplied by multiplicity().
  std::span<const double> sobolev_weight(int order) const;

 private:
  struct Impl;
  explicit Grid(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

class ScalarField {
 public:
  struct Uninitialized {};
  static constexpr Uninitialized uninitialized{};

  ScalarField() = default;
  /// Values left indeterminate; the caller overwrites all of them.
  ScalarField(GridPtr grid, Uninitialized);
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, RealVector values);

  /// Samples f(x) at every grid point; unused coordinates are zero.
  static ScalarField sample(GridPtr grid,
                            const std::function<double(const std::array<double, 3>&)>& f);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator/=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double s);
  ScalarField& operator-=(double s) { return *this += -s; }
  /// this += alpha * x
  ScalarField& axpy(double alpha, const ScalarField& x);

  double sum() const;
  double mean() const;
  /// Cell sum times cell volume.
  double integral() const;
  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  template <class F>
  ScalarField map(F f) const {
    ScalarField out(grid_, uninitialized);
    for (std::size_t i = 0; i < size(); ++i) out.values_[i] = f(values_[i]);
    return out;
  }

 private:
  GridPtr grid_;
  RealVector values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator/(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
ScalarField operator+(ScalarField a, double s);
ScalarField operator+(double s, ScalarField a);
ScalarField operator-(ScalarField a, double s);
ScalarField operator-(double s, const ScalarField& a);
ScalarField operator-(ScalarField a);
/// Pointwise s / a.
ScalarField operator/(double s, const ScalarField& a);

/// Cell-volume weighted inner product sum_i f_i g_i dV.
double inner_product(const ScalarField& f, const ScalarField& g);

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(GridPtr grid, double value = 0.0);
  explicit VectorField(std::vector<ScalarField> components);

  const GridPtr& grid() const noexcept { return components_.front().grid(); }
  int dim() const noexcept { return static_cast<int>(components_.size()); }
  const ScalarField& operator[](int a) const noexcept { return components_[a]; }
  ScalarField& operator[](int a) noexcept { return components_[a]; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  VectorField& operator*=(const ScalarField& s);
  VectorField& operator/=(const ScalarField& s);
  VectorField& axpy(double alpha, const VectorField& x);

  double max_abs() const;
  bool all_finite() const;

 private:
  std::vector<ScalarField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
VectorField operator*(const ScalarField& s, VectorField a);
VectorField operator/(VectorField a, const ScalarField& s);
VectorField operator-(VectorField a);

/// Pointwise a . b
ScalarField dot(const VectorField& a, const VectorField& b);
/// sum_a sum_i a_i b_i dV
double inner_product(const VectorField& a, const VectorField& b);

/// Forward transform of a scalar field, reusable for several syntheses.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(const ScalarField& f);

  const GridPtr& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }

  /// Zeroes every mode outside the 2/3-rule band.
  Spectrum& truncate();

  ScalarField field() const;
  ScalarField derivative(int axis, Dealias mode = Dealias::Off) const;
  VectorField gradient(Dealias mode = Dealias::Off) const;
  ScalarField laplacian() const;
  /// Synthesizes the field whose coefficients are symbol[k] * f_hat[k].
  ScalarField apply(std::span<const double> symbol) const;
  /// sum_k w[k] |f_hat[k]|^2 scaled to a cell-volume quadrature.
  double weighted_norm_squared(std::span<const double> w) const;

 private:
  GridPtr grid_;
  ComplexVector coeffs_;
};

VectorField gradient(const ScalarField& f, Dealias mode = Dealias::Off);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const VectorField& v, Dealias mode = Dealias::Off);
/// 2/3-rule truncation.
ScalarField dealias(const ScalarField& f);
VectorField dealias(const VectorField& v);
ScalarField remove_mean(const ScalarField& f);

struct NormKind {
  enum class Kind { L2, Lp, H1, H2 };
  Kind kind = Kind::L2;
  double p = 2.0;

  static NormKind l2() { return {Kind::L2, 2.0}; }
  static NormKind lp(double p) { return {Kind::Lp, p}; }
  static NormKind h1() { return {Kind::H1, 2.0}; }
  static NormKind h2() { return {Kind::H2, 2.0}; }
};

/// L2/Lp by physical-space quadrature; H1/H2 via spectral derivatives.
/// Throws ConfigError for Lp with p < 1.
double norm(const ScalarField& f, NormKind kind);
/// Squared L2 norm computed from the spectrum (Parseval).
double spectral_l2_squared(const ScalarField& f);

}  // namespace pnpf
