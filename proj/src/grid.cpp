#include "pnpf/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "pnpf/errors.hpp"
#include "pnpf/simd.hpp"

namespace pnpf {
namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

const simd::KernelTable& K() { return simd::kernels(); }

double* as_doubles(Complex* c) { return reinterpret_cast<double*>(c); }
const double* as_doubles(const Complex* c) {
  return reinterpret_cast<const double*>(c);
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a.get() != b.get() &&
      (a->dim() != b->dim() || a->points_per_axis() != b->points_per_axis() ||
       a->box_length() != b->box_length())) {
    throw Error("field operands live on different grids");
  }
}

}  // namespace

void validate(const GridSpec& spec) {
  if (spec.dim < 1 || spec.dim > 3) {
    throw ConfigError("grid.dim must be 1, 2 or 3 (got " +
                      std::to_string(spec.dim) + ")");
  }
  if (spec.points_per_axis < 8 || !is_power_of_two(spec.points_per_axis)) {
    throw ConfigError("grid.points_per_axis must be a power of two >= 8 (got " +
                      std::to_string(spec.points_per_axis) + ")");
  }
  if (!(spec.box_length > 0.0) || !std::isfinite(spec.box_length)) {
    throw ConfigError("grid.box_length must be positive and finite");
  }
  std::size_t total = 1;
  for (int a = 0; a < spec.dim; ++a) {
    total *= static_cast<std::size_t>(spec.points_per_axis);
  }
  if (total > kMaxGridPoints) {
    throw ConfigError("grid has " + std::to_string(total) +
                      " points, above the cap of " +
                      std::to_string(kMaxGridPoints));
  }
}

struct Grid::Impl {
  GridSpec spec;
  std::size_t size = 0;
  std::size_t spectral_size = 0;
  std::size_t half = 0;  // N/2 + 1
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;
  std::vector<RealVector> wavenumber;
  std::vector<RealVector> truncated_wavenumber;
  RealVector laplacian;
  RealVector inverse_neg_laplacian;
  RealVector mask;
  RealVector multiplicity;
  std::vector<RealVector> sobolev;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan) fftw_destroy_plan(forward_plan);
    if (inverse_plan) fftw_destroy_plan(inverse_plan);
  }

  int mode_index(std::size_t mode, int axis) const {
    const int d = spec.dim;
    const auto n = static_cast<std::size_t>(spec.points_per_axis);
    if (axis == d - 1) return static_cast<int>(mode % half);
    std::size_t rest = mode / half;
    for (int a = d - 2; a > axis; --a) rest /= n;
    return static_cast<int>(rest % n);
  }

  int signed_wavenumber(std::size_t mode, int axis) const {
    const int j = mode_index(mode, axis);
    const int n = spec.points_per_axis;
    return j <= n / 2 ? j : j - n;
  }
};

GridPtr Grid::create(const GridSpec& spec) {
  validate(spec);
  auto impl = std::make_unique<Impl>();
  impl->spec = spec;
  const int d = spec.dim;
  const int n = spec.points_per_axis;
  impl->half = static_cast<std::size_t>(n / 2 + 1);
  impl->size = 1;
  for (int a = 0; a < d; ++a) impl->size *= static_cast<std::size_t>(n);
  impl->spectral_size = impl->size / static_cast<std::size_t>(n) * impl->half;

  {
    RealVector r(impl->size);
    ComplexVector c(impl->spectral_size);
    std::vector<int> dims(static_cast<std::size_t>(d), n);
    std::lock_guard lock(planner_mutex());
    impl->forward_plan = fftw_plan_dft_r2c(
        d, dims.data(), r.data(), reinterpret_cast<fftw_complex*>(c.data()),
        FFTW_ESTIMATE);
    impl->inverse_plan = fftw_plan_dft_c2r(
        d, dims.data(), reinterpret_cast<fftw_complex*>(c.data()), r.data(),
        FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  if (!impl->forward_plan || !impl->inverse_plan) {
    throw Error("FFTW plan creation failed");
  }

  const std::size_t m = impl->spectral_size;
  const double unit = 2.0 * std::numbers::pi / spec.box_length;
  impl->wavenumber.assign(static_cast<std::size_t>(d), RealVector(m));
  impl->truncated_wavenumber.assign(static_cast<std::size_t>(d), RealVector(m));
  impl->laplacian.resize(m);
  impl->inverse_neg_laplacian.resize(m);
  impl->mask.resize(m);
  impl->multiplicity.resize(m);
  impl->sobolev.assign(3, RealVector(m));

  for (std::size_t k = 0; k < m; ++k) {
    double k2 = 0.0;
    bool keep = true;
    double sum2 = 0.0, sum4 = 0.0, cross = 0.0;
    for (int a = 0; a < d; ++a) {
      const int j = impl->signed_wavenumber(k, a);
      const double ka = unit * j;
      k2 += ka * ka;
      if (3 * std::abs(j) >= n) keep = false;
      const double kd = (std::abs(j) == n / 2) ? 0.0 : ka;
      impl->wavenumber[a][k] = kd;
      const double kd2 = kd * kd;
      cross += kd2 * sum2;
      sum2 += kd2;
      sum4 += kd2 * kd2;
    }
    impl->laplacian[k] = -k2;
    impl->inverse_neg_laplacian[k] = k2 > 0.0 ? 1.0 / k2 : 0.0;
    impl->mask[k] = keep ? 1.0 : 0.0;
    for (int a = 0; a < d; ++a) {
      impl->truncated_wavenumber[a][k] = keep ? impl->wavenumber[a][k] : 0.0;
    }
    const int last = impl->mode_index(k, d - 1);
    const double mult = (last == 0 || last == n / 2) ? 1.0 : 2.0;
    impl->multiplicity[k] = mult;
    impl->sobolev[0][k] = mult;
    impl->sobolev[1][k] = mult * (1.0 + sum2);
    impl->sobolev[2][k] = mult * (1.0 + sum2 + sum4 + cross);
  }
  return GridPtr(new Grid(std::move(impl)));
}

Grid::Grid(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Grid::~Grid() = default;

const GridSpec& Grid::spec() const noexcept { return impl_->spec; }
std::size_t Grid::size() const noexcept { return impl_->size; }
std::size_t Grid::spectral_size() const noexcept { return impl_->spectral_size; }
double Grid::spacing() const noexcept {
  return impl_->spec.box_length / impl_->spec.points_per_axis;
}
double Grid::cell_volume() const noexcept {
  return std::pow(spacing(), impl_->spec.dim);
}
double Grid::volume() const noexcept {
  return std::pow(impl_->spec.box_length, impl_->spec.dim);
}

int Grid::index(std::size_t flat, int axis) const noexcept {
  const auto n = static_cast<std::size_t>(impl_->spec.points_per_axis);
  for (int a = impl_->spec.dim - 1; a > axis; --a) flat /= n;
  return static_cast<int>(flat % n);
}

double Grid::coordinate(std::size_t flat, int axis) const noexcept {
  return index(flat, axis) * spacing();
}

void Grid::forward(const double* in, Complex* out) const {
  fftw_execute_dft_r2c(impl_->forward_plan, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void Grid::inverse(Complex* in, double* out) const {
  fftw_execute_dft_c2r(impl_->inverse_plan,
                       reinterpret_cast<fftw_complex*>(in), out);
}

int Grid::integer_wavenumber(std::size_t mode, int axis) const noexcept {
  return impl_->signed_wavenumber(mode, axis);
}

std::span<const double> Grid::wavenumber(int axis) const noexcept {
  return impl_->wavenumber[static_cast<std::size_t>(axis)];
}
std::span<const double> Grid::truncated_wavenumber(int axis) const noexcept {
  return impl_->truncated_wavenumber[static_cast<std::size_t>(axis)];
}
std::span<const double> Grid::laplacian_symbol() const noexcept {
  return impl_->laplacian;
}
std::span<const double> Grid::inverse_neg_laplacian_symbol() const noexcept {
  return impl_->inverse_neg_laplacian;
}
std::span<const double> Grid::dealias_mask() const noexcept { return impl_->mask; }
std::span<const double> Grid::multiplicity() const noexcept {
  return impl_->multiplicity;
}
std::span<const double> Grid::sobolev_weight(int order) const {
  if (order < 0 || order > 2) throw Error("Sobolev order must be 0, 1 or 2");
  return impl_->sobolev[static_cast<std::size_t>(order)];
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), values_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, RealVector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) {
    throw Error("field length " + std::to_string(values_.size()) +
                " does not match grid size " + std::to_string(grid_->size()));
  }
}

ScalarField::ScalarField(GridPtr grid, Uninitialized)
    : grid_(std::move(grid)), values_(grid_->size()) {}

ScalarField ScalarField::sample(
    GridPtr grid, const std::function<double(const std::array<double, 3>&)>& f) {
  ScalarField out(grid);
  const int d = grid->dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = grid->coordinate(i, a);
    out.values_[i] = f(x);
  }
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  K().add(data(), o.data(), data(), size());
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  K().sub(data(), o.data(), data(), size());
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  K().mul(data(), o.data(), data(), size());
  return *this;
}
ScalarField& ScalarField::operator/=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  K().div(data(), o.data(), data(), size());
  return *this;
}
ScalarField& ScalarField::operator*=(double s) {
  K().scale(data(), s, data(), size());
  return *this;
}
ScalarField& ScalarField::operator+=(double s) {
  K().shift(data(), s, data(), size());
  return *this;
}
ScalarField& ScalarField::axpy(double alpha, const ScalarField& x) {
  require_same_grid(grid_, x.grid_);
  K().axpy(alpha, x.data(), data(), size());
  return *this;
}

double ScalarField::sum() const { return K().sum(data(), size()); }
double ScalarField::mean() const { return sum() / static_cast<double>(size()); }
double ScalarField::integral() const { return sum() * grid_->cell_volume(); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::max_abs() const { return K().max_abs(data(), size()); }
bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator/(ScalarField a, const ScalarField& b) { return a /= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator+(ScalarField a, double s) { return a += s; }
ScalarField operator+(double s, ScalarField a) { return a += s; }
ScalarField operator-(ScalarField a, double s) { return a += -s; }
ScalarField operator-(double s, const ScalarField& a) {
  ScalarField out(a.grid(), s);
  return out -= a;
}
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator/(double s, const ScalarField& a) {
  ScalarField out(a.grid(), s);
  return out /= a;
}

double inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid());
  return K().dot(f.data(), g.data(), f.size()) * f.grid()->cell_volume();
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(GridPtr grid, double value) {
  const int d = grid->dim();
  components_.reserve(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) components_.emplace_back(grid, value);
}

VectorField::VectorField(std::vector<ScalarField> components)
    : components_(std::move(components)) {
  if (components_.empty() ||
      static_cast<int>(components_.size()) != components_.front().grid()->dim()) {
    throw Error("vector field needs exactly dim components");
  }
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (int a = 0; a < dim(); ++a) components_[a] += o[a];
  return *this;
}
VectorField& VectorField::operator-=(const VectorField& o) {
  for (int a = 0; a < dim(); ++a) components_[a] -= o[a];
  return *this;
}
VectorField& VectorField::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}
VectorField& VectorField::operator*=(const ScalarField& s) {
  for (auto& c : components_) c *= s;
  return *this;
}
VectorField& VectorField::operator/=(const ScalarField& s) {
  for (auto& c : components_) c /= s;
  return *this;
}
VectorField& VectorField::axpy(double alpha, const VectorField& x) {
  for (int a = 0; a < dim(); ++a) components_[a].axpy(alpha, x[a]);
  return *this;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : components_) m = std::max(m, c.max_abs());
  return m;
}

bool VectorField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarField& c) { return c.all_finite(); });
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }
VectorField operator*(const ScalarField& s, VectorField a) { return a *= s; }
VectorField operator/(VectorField a, const ScalarField& s) { return a /= s; }
VectorField operator-(VectorField a) { return a *= -1.0; }

ScalarField dot(const VectorField& a, const VectorField& b) {
  ScalarField out = a[0] * b[0];
  for (int i = 1; i < a.dim(); ++i) out += a[i] * b[i];
  return out;
}

double inner_product(const VectorField& a, const VectorField& b) {
  double total = 0.0;
  for (int i = 0; i < a.dim(); ++i) total += inner_product(a[i], b[i]);
  return total;
}

// ------------------------------------------------------------------- Spectrum

Spectrum::Spectrum(const ScalarField& f)
    : grid_(f.grid()), coeffs_(f.grid()->spectral_size()) {
  grid_->forward(f.data(), coeffs_.data());
}

Spectrum& Spectrum::truncate() {
  K().cmul_real(as_doubles(coeffs_.data()), grid_->dealias_mask().data(),
                as_doubles(coeffs_.data()), coeffs_.size());
  return *this;
}

namespace {

// Per-thread spectral work buffer; the inverse transform consumes it.
ComplexVector& scratch(std::size_t modes) {
  thread_local ComplexVector buffer;
  if (buffer.size() != modes) buffer.resize(modes);
  return buffer;
}

ScalarField synthesize(const GridPtr& grid, ComplexVector& work) {
  ScalarField out(grid, ScalarField::uninitialized);
  grid->inverse(work.data(), out.data());
  out *= 1.0 / static_cast<double>(grid->size());
  return out;
}

}  // namespace

ScalarField Spectrum::field() const {
  ComplexVector& work = scratch(coeffs_.size());
  std::copy(coeffs_.begin(), coeffs_.end(), work.begin());
  return synthesize(grid_, work);
}

ScalarField Spectrum::derivative(int axis, Dealias mode) const {
  ComplexVector& work = scratch(coeffs_.size());
  const auto k = mode == Dealias::On ? grid_->truncated_wavenumber(axis)
                                     : grid_->wavenumber(axis);
  K().cmul_imag(as_doubles(coeffs_.data()), k.data(), as_doubles(work.data()),
                coeffs_.size());
  return synthesize(grid_, work);
}

VectorField Spectrum::gradient(Dealias mode) const {
  std::vector<ScalarField> comps;
  comps.reserve(static_cast<std::size_t>(grid_->dim()));
  for (int a = 0; a < grid_->dim(); ++a) comps.push_back(derivative(a, mode));
  return VectorField(std::move(comps));
}

ScalarField Spectrum::laplacian() const { return apply(grid_->laplacian_symbol()); }

ScalarField Spectrum::apply(std::span<const double> symbol) const {
  ComplexVector& work = scratch(coeffs_.size());
  K().cmul_real(as_doubles(coeffs_.data()), symbol.data(),
                as_doubles(work.data()), coeffs_.size());
  return synthesize(grid_, work);
}

double Spectrum::weighted_norm_squared(std::span<const double> w) const {
  const double n = static_cast<double>(grid_->size());
  return K().weighted_power(as_doubles(coeffs_.data()), w.data(), coeffs_.size()) *
         grid_->cell_volume() / n;
}

VectorField gradient(const ScalarField& f, Dealias mode) {
  return Spectrum(f).gradient(mode);
}

ScalarField laplacian(const ScalarField& f) { return Spectrum(f).laplacian(); }

ScalarField divergence(const VectorField& v, Dealias mode) {
  const GridPtr& grid = v.grid();
  const std::size_t m = grid->spectral_size();
  ComplexVector acc(m, Complex(0.0, 0.0));
  ComplexVector& work = scratch(m);
  for (int a = 0; a < v.dim(); ++a) {
    grid->forward(v[a].data(), work.data());
    const auto k = mode == Dealias::On ? grid->truncated_wavenumber(a)
                                       : grid->wavenumber(a);
    K().cmul_imag_acc(as_doubles(work.data()), k.data(), as_doubles(acc.data()), m);
  }
  return synthesize(grid, acc);
}

ScalarField dealias(const ScalarField& f) { return Spectrum(f).truncate().field(); }

VectorField dealias(const VectorField& v) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < v.dim(); ++a) comps.push_back(dealias(v[a]));
  return VectorField(std::move(comps));
}

ScalarField remove_mean(const ScalarField& f) { return f - f.mean(); }

double spectral_l2_squared(const ScalarField& f) {
  return Spectrum(f).weighted_norm_squared(f.grid()->multiplicity());
}

double norm(const ScalarField& f, NormKind kind) {
  switch (kind.kind) {
    case NormKind::Kind::L2:
      return std::sqrt(inner_product(f, f));
    case NormKind::Kind::Lp: {
      if (!(kind.p >= 1.0)) {
        throw ConfigError("Lp norm requires p >= 1 (got " + std::to_string(kind.p) + ")");
      }
      const double scale = f.max_abs();
      if (scale == 0.0) return 0.0;
      double acc = 0.0;
      for (double v : f.values()) acc += std::pow(std::abs(v) / scale, kind.p);
      return scale * std::pow(acc * f.grid()->cell_volume(), 1.0 / kind.p);
    }
    case NormKind::Kind::H1:
      return std::sqrt(Spectrum(f).weighted_norm_squared(f.grid()->sobolev_weight(1)));
    case NormKind::Kind::H2:
      return std::sqrt(Spectrum(f).weighted_norm_squared(f.grid()->sobolev_weight(2)));
  }
  return 0.0;
}

}  // namespace pnpf
