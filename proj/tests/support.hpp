#pragma once

// Shared fixtures and dense oracles for the unit tests. The oracles build
// explicit matrices from trigonometric sums and never call the FFT path.

#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "pnpf/dynamics.hpp"
#include "pnpf/fields.hpp"
#include "pnpf/grid.hpp"
#include "pnpf/initial.hpp"

namespace pnpf::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline GridPtr make_grid(int dim, int n, double length = kTwoPi) {
  return Grid::create(GridSpec{dim, n, length});
}

inline State random_state(const GridPtr& grid, double amplitude, int band = 1,
                          std::uint64_t seed = 1) {
  InitialCondition ic;
  ic.kind = InitialCondition::Kind::RandomBand;
  ic.random_band = RandomBandIC{seed, amplitude, band};
  return build_initial_state(grid, ic);
}

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() /
              ("pnpf-" + tag + "-" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  return (a - b).max_abs();
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
  return (a - b).max_abs();
}

/// Periodic spectral first-derivative matrix on N points with the Nyquist
/// mode dropped: D[j][l] = (1/N) sum_m i k_m exp(2 pi i m (j - l) / N).
inline Eigen::MatrixXd derivative_matrix(int n, double length) {
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      double acc = 0.0;
      for (int m = 1; m < n / 2; ++m) {
        const double k = kTwoPi * m / length;
        acc += -2.0 * k * std::sin(kTwoPi * m * (j - l) / n);
      }
      d(j, l) = acc / n;
    }
  }
  return d;
}

/// Spectral second-derivative matrix keeping the Nyquist mode.
inline Eigen::MatrixXd second_derivative_matrix(int n, double length) {
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      double acc = 0.0;
      for (int m = 1; m < n / 2; ++m) {
        const double k = kTwoPi * m / length;
        acc += -2.0 * k * k * std::cos(kTwoPi * m * (j - l) / n);
      }
      const double nyquist = std::numbers::pi * n / length;
      acc += -nyquist * nyquist * (((j - l) % 2 == 0) ? 1.0 : -1.0);
      d(j, l) = acc / n;
    }
  }
  return d;
}

/// Applies a 1D matrix along `axis` of a row-major field.
inline ScalarField apply_along(const Eigen::MatrixXd& m, const ScalarField& f, int axis) {
  const Grid& g = *f.grid();
  const int n = g.points_per_axis();
  const int dim = g.dim();
  std::size_t stride = 1;
  for (int a = dim - 1; a > axis; --a) stride *= static_cast<std::size_t>(n);
  ScalarField out(f.grid(), 0.0);
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const int i = g.index(flat, axis);
    const std::size_t base = flat - static_cast<std::size_t>(i) * stride;
    double acc = 0.0;
    for (int l = 0; l < n; ++l) acc += m(i, l) * f[base + static_cast<std::size_t>(l) * stride];
    out[flat] = acc;
  }
  return out;
}

/// Dense Laplacian on the whole grid (Kronecker sum of 1D second derivatives).
inline Eigen::MatrixXd dense_laplacian(const Grid& g) {
  const int n = g.points_per_axis();
  const Eigen::MatrixXd d2 = second_derivative_matrix(n, g.box_length());
  const auto size = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(size, size);
  for (int axis = 0; axis < g.dim(); ++axis) {
    std::size_t stride = 1;
    for (int a = g.dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(n);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
      const int i = g.index(flat, axis);
      const std::size_t base = flat - static_cast<std::size_t>(i) * stride;
      for (int l = 0; l < n; ++l) {
        lap(static_cast<Eigen::Index>(flat),
            static_cast<Eigen::Index>(base + static_cast<std::size_t>(l) * stride)) += d2(i, l);
      }
    }
  }
  return lap;
}

/// Solves Laplacian(phi) = v subject to sum(phi) = 0 by a bordered dense
/// system [A 1; 1^T 0].
inline std::vector<double> dense_poisson(const Grid& g, const ScalarField& v) {
  const auto size = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size + 1, size + 1);
  m.topLeftCorner(size, size) = dense_laplacian(g);
  m.block(0, size, size, 1).setOnes();
  m.block(size, 0, 1, size).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size + 1);
  for (Eigen::Index i = 0; i < size; ++i) rhs(i) = v[static_cast<std::size_t>(i)];
  const Eigen::VectorXd x = m.partialPivLu().solve(rhs);
  return std::vector<double>(x.data(), x.data() + size);
}

}  // namespace pnpf::test
