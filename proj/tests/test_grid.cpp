#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pnpf/errors.hpp"
#include "pnpf/grid.hpp"
#include "pnpf/initial.hpp"
#include "support.hpp"

using namespace pnpf;
using pnpf::test::kTwoPi;
using pnpf::test::make_grid;
using pnpf::test::max_abs_diff;

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(validate(GridSpec{3, 8, 1.0}));
  CHECK_THROWS_AS(validate(GridSpec{0, 8, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{4, 8, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{3, 4, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{3, 12, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{3, 8, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{3, 8, -1.0}), ConfigError);
  CHECK_THROWS_AS(validate(GridSpec{3, 512, 1.0}), ConfigError);
  CHECK_THROWS_AS(Grid::create(GridSpec{2, 6, 1.0}), ConfigError);
}

TEST_CASE("row-major layout and geometry") {
  const auto g = make_grid(3, 8, 2.0);
  CHECK(g->size() == 512);
  CHECK(g->spectral_size() == 8 * 8 * 5);
  CHECK(g->spacing() == doctest::Approx(0.25));
  CHECK(g->cell_volume() == doctest::Approx(0.015625));
  CHECK(g->volume() == doctest::Approx(8.0));
  const std::size_t flat = (3 * 8 + 5) * 8 + 6;
  CHECK(g->index(flat, 0) == 3);
  CHECK(g->index(flat, 1) == 5);
  CHECK(g->index(flat, 2) == 6);
  CHECK(g->coordinate(flat, 1) == doctest::Approx(1.25));
}

TEST_CASE("forward and inverse transforms round trip") {
  const auto g = make_grid(3, 8);
  const ScalarField f = random_band_field(g, 3, 0, 2);
  ComplexVector spec(g->spectral_size());
  g->forward(f.data(), spec.data());
  RealVector back(g->size());
  g->inverse(spec.data(), back.data());
  double err = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    err = std::max(err, std::abs(back[i] / static_cast<double>(g->size()) - f[i]));
  }
  CHECK(err < 1e-14);
}

TEST_CASE("gradient") {
  SUBCASE("constant gives zero") {
    const auto g = make_grid(3, 8);
    CHECK(gradient(ScalarField(g, 4.2)).max_abs() == 0.0);
  }
  SUBCASE("single resolved mode") {
    const double L = 3.0;
    const auto g = make_grid(3, 16, L);
    const double k = kTwoPi / L;
    const auto f = ScalarField::sample(g, [&](const auto& x) { return std::sin(k * x[0]); });
    const auto expected =
        ScalarField::sample(g, [&](const auto& x) { return k * std::cos(k * x[0]); });
    const VectorField grad = gradient(f);
    CHECK(max_abs_diff(grad[0], expected) <= 1e-12);
    CHECK(grad[1].max_abs() <= 1e-12);
    CHECK(grad[2].max_abs() <= 1e-12);
  }
  SUBCASE("matches the dense differentiation matrix on 8^3") {
    const double L = 1.7;
    const auto g = make_grid(3, 8, L);
    const ScalarField f = random_band_field(g, 5, 0, 2) + random_band_field(g, 5, 1, 1);
    const Eigen::MatrixXd d = pnpf::test::derivative_matrix(8, L);
    const VectorField grad = gradient(f);
    for (int a = 0; a < 3; ++a) {
      CAPTURE(a);
      CHECK(max_abs_diff(grad[a], pnpf::test::apply_along(d, f, a)) <= 1e-10);
      CHECK(std::abs(grad[a].mean()) <= 1e-14);
    }
  }
  SUBCASE("constant shift leaves the gradient bit-identical") {
    const auto g = make_grid(3, 8);
    const ScalarField f = random_band_field(g, 2, 0, 2);
    const VectorField a = gradient(f);
    const VectorField b = gradient(f + 0.0);
    CHECK(max_abs_diff(a, b) == 0.0);
    // A nonzero shift only moves the mean coefficient; what remains is the
    // rounding of f + 3 itself.
    CHECK(max_abs_diff(a, gradient(f + 3.0)) <= 1e-13);
  }
}

TEST_CASE("laplacian and divergence") {
  const auto g = make_grid(3, 16, 2.5);
  const double k = kTwoPi / 2.5;
  SUBCASE("constants") {
    CHECK(laplacian(ScalarField(g, 1.5)).max_abs() == 0.0);
    CHECK(divergence(VectorField(g, 2.0)).max_abs() == 0.0);
  }
  SUBCASE("eigenfunction") {
    const auto f = ScalarField::sample(g, [&](const auto& x) { return std::sin(k * x[0]); });
    CHECK(max_abs_diff(laplacian(f), -k * k * f) <= 1e-12);
  }
  SUBCASE("divergence of gradient equals laplacian") {
    const auto g2 = make_grid(3, 16);
    const ScalarField f = random_band_field(g2, 9, 0, 2);
    CHECK(max_abs_diff(divergence(gradient(f)), laplacian(f)) <= 1e-12);
  }
  SUBCASE("divergence has zero mean") {
    const VectorField v({random_band_field(g, 4, 0, 3) + 1.0, random_band_field(g, 4, 1, 3),
                         random_band_field(g, 4, 2, 3) - 2.0});
    CHECK(std::abs(divergence(v).mean()) <= 1e-14);
  }
  SUBCASE("laplacian matches the dense matrix on 8^3") {
    const auto g8 = make_grid(3, 8, 1.3);
    const ScalarField f = random_band_field(g8, 6, 0, 2);
    const Eigen::MatrixXd lap = pnpf::test::dense_laplacian(*g8);
    Eigen::VectorXd x(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) x(static_cast<Eigen::Index>(i)) = f[i];
    const Eigen::VectorXd y = lap * x;
    const ScalarField got = laplacian(f);
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      err = std::max(err, std::abs(got[i] - y(static_cast<Eigen::Index>(i))));
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("works in one and two dimensions") {
  for (int dim : {1, 2}) {
    CAPTURE(dim);
    const auto g = make_grid(dim, 32, 4.0);
    const double k = kTwoPi * 3 / 4.0;
    const auto f = ScalarField::sample(g, [&](const auto& x) { return std::cos(k * x[0]); });
    const auto df = ScalarField::sample(g, [&](const auto& x) { return -k * std::sin(k * x[0]); });
    CHECK(max_abs_diff(gradient(f)[0], df) <= 1e-12);
    CHECK(norm(f, NormKind::l2()) == doctest::Approx(std::sqrt(0.5 * g->volume())).epsilon(1e-13));
  }
}

TEST_CASE("norms") {
  SUBCASE("zero field") {
    const auto g = make_grid(3, 8);
    const ScalarField z(g, 0.0);
    for (auto kind : {NormKind::l2(), NormKind::lp(1.0), NormKind::lp(3.5), NormKind::h1(),
                      NormKind::h2()}) {
      CHECK(norm(z, kind) == 0.0);
    }
  }
  SUBCASE("unit box sine") {
    const auto g = make_grid(3, 16, 1.0);
    const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(kTwoPi * x[0]); });
    CHECK(std::abs(norm(f, NormKind::l2()) - std::sqrt(0.5)) <= 1e-12);
    const double k2 = kTwoPi * kTwoPi;
    CHECK(norm(f, NormKind::h1()) == doctest::Approx(std::sqrt(0.5 * (1 + k2))).epsilon(1e-13));
    CHECK(norm(f, NormKind::h2()) ==
          doctest::Approx(std::sqrt(0.5 * (1 + k2 + k2 * k2))).epsilon(1e-13));
  }
  SUBCASE("Lp norms") {
    const auto g = make_grid(2, 8, 2.0);
    const ScalarField f = random_band_field(g, 8, 0, 2);
    CHECK(norm(f, NormKind::lp(2.0)) == doctest::Approx(norm(f, NormKind::l2())).epsilon(1e-14));
    double acc = 0.0;
    for (double x : f.values()) acc += std::pow(std::abs(x), 3.0);
    CHECK(norm(f, NormKind::lp(3.0)) ==
          doctest::Approx(std::cbrt(acc * g->cell_volume())).epsilon(1e-13));
    CHECK_THROWS_AS(norm(f, NormKind::lp(0.5)), ConfigError);
  }
  SUBCASE("Parseval") {
    const auto g = make_grid(3, 8, 1.9);
    const ScalarField f = random_band_field(g, 12, 0, 2) + 0.4;
    const double physical = inner_product(f, f);
    CHECK(std::abs(spectral_l2_squared(f) - physical) <= 1e-12 * physical);
  }
  SUBCASE("H2 matches dense derivative quadrature on 8^3") {
    const double L = 2.2;
    const auto g = make_grid(3, 8, L);
    const ScalarField f = random_band_field(g, 13, 0, 2) + random_band_field(g, 13, 1, 1);
    const Eigen::MatrixXd d = pnpf::test::derivative_matrix(8, L);
    double h2 = inner_product(f, f);
    for (int a = 0; a < 3; ++a) {
      const ScalarField fa = pnpf::test::apply_along(d, f, a);
      h2 += inner_product(fa, fa);
      for (int b = a; b < 3; ++b) {
        const ScalarField fab = pnpf::test::apply_along(d, fa, b);
        h2 += inner_product(fab, fab);
      }
    }
    CHECK(std::abs(norm(f, NormKind::h2()) - std::sqrt(h2)) <= 1e-10);
  }
}

TEST_CASE("dealias mask follows the two-thirds rule") {
  const auto g = make_grid(2, 16);
  const auto mask = g->dealias_mask();
  for (std::size_t m = 0; m < g->spectral_size(); ++m) {
    const bool keep = 3 * std::abs(g->integer_wavenumber(m, 0)) < 16 &&
                      3 * std::abs(g->integer_wavenumber(m, 1)) < 16;
    CHECK(mask[m] == (keep ? 1.0 : 0.0));
  }
  const ScalarField f = random_band_field(g, 1, 0, 5);
  CHECK(max_abs_diff(dealias(f), f) <= 1e-14 * f.max_abs());
  const auto high = ScalarField::sample(g, [](const auto& x) { return std::cos(7.0 * x[1]); });
  CHECK(dealias(high).max_abs() <= 1e-14);
}

TEST_CASE("field arithmetic") {
  const auto g = make_grid(1, 8);
  ScalarField a(g, 2.0);
  const ScalarField b(g, 0.5);
  CHECK((a * b).max() == 1.0);
  CHECK((a / b).min() == 4.0);
  CHECK((1.0 - a).max() == -1.0);
  a.axpy(2.0, b);
  CHECK(a.mean() == 3.0);
  CHECK(a.integral() == doctest::Approx(3.0 * kTwoPi));
  CHECK(remove_mean(a).max_abs() == 0.0);
  a[3] = std::nan("");
  CHECK_FALSE(a.all_finite());
}
