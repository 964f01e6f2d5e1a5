#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "pnpf/dynamics.hpp"
#include "pnpf/errors.hpp"
#include "pnpf/initial.hpp"
#include "pnpf/poisson.hpp"
#include "support.hpp"

using namespace pnpf;
using pnpf::test::kTwoPi;
using pnpf::test::make_grid;
using pnpf::test::max_abs_diff;
using pnpf::test::random_state;

namespace {

double relative_diff(const ScalarField& a, const ScalarField& b) {
  const double scale = std::max(a.max_abs(), b.max_abs());
  return scale > 0.0 ? max_abs_diff(a, b) / scale : 0.0;
}

// Coefficient of `mode` in f by L2 projection.
double projection(const ScalarField& f, const ScalarField& mode) {
  return inner_product(f, mode) / inner_product(mode, mode);
}

// exp(t A) x for a real 2x2 matrix A.
Eigen::Vector2d propagate(const Eigen::Matrix2d& a, double t, const Eigen::Vector2d& x) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(a);
  const Eigen::Matrix2cd v = es.eigenvectors();
  const Eigen::Vector2cd lambda = es.eigenvalues();
  Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
  e(0, 0) = std::exp(lambda(0) * t);
  e(1, 1) = std::exp(lambda(1) * t);
  return (v * e * v.inverse() * x.cast<std::complex<double>>()).real();
}

}  // namespace

TEST_CASE("stepper configuration validation") {
  CHECK_NOTHROW(validate(StepperConfig{}));
  CHECK_THROWS_AS(validate(StepperConfig{Scheme::RK4, 0.0, 1.0, true, 1e-8}), ConfigError);
  CHECK_THROWS_AS(validate(StepperConfig{Scheme::RK4, 1e-3, -1.0, true, 1e-8}), ConfigError);
  CHECK_THROWS_AS(validate(StepperConfig{Scheme::RK4, 1e-3, 1.0, true, -1.0}), ConfigError);
  CHECK_THROWS_AS(require_perturbation_params(PhysParams{1.5, 2.0, 1, 1, 1, 1}), ConfigError);
  CHECK_THROWS_AS(require_perturbation_params(PhysParams{1.5, 1.5, 1, 1, 2, 1}), ConfigError);
}

TEST_CASE("equilibrium is a fixed point of both formulations") {
  const auto g = make_grid(3, 16);
  const PhysParams params;
  const State eq = equilibrium_state(g);
  for (Dealias mode : {Dealias::Off, Dealias::On}) {
    const PrimitiveRates r = rhs_primitive(eq, params, mode);
    CHECK(r.dn.max_abs() <= 1e-13);
    CHECK(r.dp.max_abs() <= 1e-13);
    CHECK(r.dtheta.max_abs() <= 1e-13);
    const PerturbationRates q = rhs_perturbation(convert(eq), params, mode);
    CHECK(q.du_tilde.max_abs() <= 1e-13);
    CHECK(q.dv.max_abs() <= 1e-13);
    CHECK(q.dtheta_tilde.max_abs() <= 1e-13);
  }
  for (Scheme scheme : {Scheme::RK4, Scheme::IMEX1}) {
    const StepperConfig cfg{scheme, 1e-3, 1.0, true, kDefaultPositivityFloor};
    State s = eq;
    PerturbationState ps = convert(eq);
    for (int k = 0; k < 5; ++k) {
      s = step(s, cfg, params);
      ps = step(ps, cfg, params);
    }
    CHECK(max_abs_diff(s.theta, eq.theta) == 0.0);
    CHECK(max_abs_diff(s.n, eq.n) == 0.0);
    CHECK(ps.u_tilde.max_abs() == 0.0);
    CHECK(ps.theta_tilde.max_abs() == 0.0);
  }
}

TEST_CASE("primitive right-hand side") {
  SUBCASE("pure diffusion of n theta on a temperature slice") {
    const double L = 2.0;
    const auto g = make_grid(3, 16, L);
    const double k = kTwoPi / L;
    const ScalarField wave = sine_mode(g, 0, 1);
    const State s = make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), 1.0 + 0.01 * wave);
    const PrimitiveRates r = rhs_primitive(s, PhysParams{});
    CHECK(max_abs_diff(r.dn, -0.01 * k * k * wave) <= 1e-12);
    CHECK(max_abs_diff(r.dp, -0.01 * k * k * wave) <= 1e-12);
  }
  SUBCASE("divergence form conserves mass") {
    const State s = random_state(make_grid(3, 16), 0.05, 3, 11);
    const PhysParams params{1.2, 1.9, 0.8, 1.4, 0.6, 1.0};
    for (Dealias mode : {Dealias::Off, Dealias::On}) {
      const PrimitiveRates r = rhs_primitive(s, params, mode);
      CHECK(std::abs(r.dn.mean()) <= 1e-14);
      CHECK(std::abs(r.dp.mean()) <= 1e-14);
    }
  }
  SUBCASE("the semi-discrete energy rate vanishes") {
    const State s = random_state(make_grid(3, 16), 0.05, 2, 12);
    const PhysParams params{1.2, 1.9, 0.8, 1.4, 0.6, 1.0};
    for (Dealias mode : {Dealias::Off, Dealias::On}) {
      const PrimitiveRates r = rhs_primitive(s, params, mode);
      const ScalarField phi_t = poisson::potential(r.dn - r.dp);
      ScalarField e_t = (params.c_p * r.dp + params.c_n * r.dn) * s.theta;
      e_t += (params.c_p * s.p + params.c_n * s.n) * r.dtheta;
      e_t += 0.5 * ((r.dp - r.dn) * s.phi + (s.p - s.n) * phi_t);
      CHECK(std::abs(e_t.integral()) <= 1e-13 * e_t.max_abs() * s.grid()->volume());
    }
  }
}

TEST_CASE("perturbation right-hand side") {
  const PhysParams params;
  const auto g = make_grid(3, 16, 3.0);
  SUBCASE("zero perturbation") {
    const PerturbationState z = convert(equilibrium_state(g));
    const PerturbationRates r = rhs_perturbation(z, params);
    CHECK(r.du_tilde.max_abs() == 0.0);
    CHECK(r.dv.max_abs() == 0.0);
    CHECK(r.dtheta_tilde.max_abs() == 0.0);
  }
  SUBCASE("charge mode is screened at rate k^2 + 2") {
    const double k = kTwoPi / 3.0;
    const double a = 1e-3;
    const ScalarField wave = sine_mode(g, 2, 1);
    const PerturbationState ps =
        make_perturbation_state(ScalarField(g, 0.0), a * wave, ScalarField(g, 0.0));
    const PerturbationRates r = rhs_perturbation(ps, params);
    CHECK(max_abs_diff(r.dv, -a * (k * k + 2.0) * wave) <= 1e-15);
  }
  SUBCASE("sign of the screening pairing") {
    const PerturbationState ps = convert(random_state(g, 1e-2, 2, 5));
    const ScalarField lin = laplacian(ps.v) - 2.0 * ps.v;
    const VectorField gp = gradient(ps.phi);
    const double expected = inner_product(ps.v, ps.v) + 2.0 * inner_product(gp, gp);
    CHECK(std::abs(inner_product(lin, ps.phi) - expected) <= 1e-12 * expected);
    CHECK(max_abs_diff(laplacian(ps.phi), ps.v) <= 1e-12);
  }
  SUBCASE("agrees with the primitive form") {
    const auto g16 = make_grid(3, 16);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      CAPTURE(seed);
      const State s = random_state(g16, 1e-3, 1, seed);
      const PrimitiveRates r = rhs_primitive(s, params, Dealias::Off);
      const PerturbationRates q = rhs_perturbation(convert(s), params, Dealias::Off);
      CHECK(relative_diff(q.du_tilde, r.dn + r.dp) <= 1e-10);
      CHECK(relative_diff(q.dv, r.dn - r.dp) <= 1e-10);
      CHECK(relative_diff(q.dtheta_tilde, r.dtheta) <= 1e-10);
    }
  }
}

TEST_CASE("conversion between formulations") {
  const auto g = make_grid(3, 8);
  const PerturbationState z = convert(equilibrium_state(g));
  CHECK(z.u_tilde.max_abs() == 0.0);
  CHECK(z.v.max_abs() == 0.0);
  CHECK(z.theta_tilde.max_abs() == 0.0);

  const auto g1 = make_grid(1, 8);
  State s{ScalarField(g1, 1.1), ScalarField(g1, 0.9), ScalarField(g1, 1.05), ScalarField(g1, 0.0)};
  const PerturbationState ps = convert(s);
  CHECK(ps.u_tilde.max_abs() <= 1e-15);
  CHECK(max_abs_diff(ps.v, ScalarField(g1, 0.2)) <= 1e-15);
  CHECK(max_abs_diff(ps.theta_tilde, ScalarField(g1, 0.05)) <= 1e-15);

  const State r = random_state(g, 0.1, 2, 3);
  const State back = convert_back(convert(r));
  CHECK(max_abs_diff(back.n, r.n) <= 1e-15);
  CHECK(max_abs_diff(back.p, r.p) <= 1e-15);
  CHECK(max_abs_diff(back.theta, r.theta) <= 1e-15);
  CHECK(max_abs_diff(back.phi, r.phi) <= 1e-15);
}

TEST_CASE("linearized eigenmode decay") {
  // A tiny single-mode perturbation follows the constant-coefficient linear
  // system: (u~, theta~)' = -k^2 [[1, 2], [1/(2c), 3/(2c)]] (u~, theta~) and
  // v' = -(k^2 + 2) v.
  const PhysParams params;
  const double c = params.c_p;
  const double L = kTwoPi;
  const auto g = make_grid(3, 16, L);
  const double k = kTwoPi / L;
  const double a = 1e-6;
  const ScalarField wave = sine_mode(g, 0, 1);
  const PerturbationState ps0 =
      make_perturbation_state(0.5 * a * wave, a * wave, a * wave);

  Eigen::Matrix2d m;
  m << 1.0, 2.0, 0.5 / c, 1.5 / c;
  const double t_end = 0.5;
  const Eigen::Vector2d exact = propagate(-k * k * m, t_end, Eigen::Vector2d(0.5 * a, a));
  const double v_exact = a * std::exp(-(k * k + 2.0) * t_end);

  SUBCASE("RK4") {
    const StepperConfig cfg{Scheme::RK4, 0.005, t_end, true, kDefaultPositivityFloor};
    PerturbationState ps = ps0;
    for (int i = 0; i < 100; ++i) ps = step(ps, cfg, params);
    CHECK(projection(ps.u_tilde, wave) == doctest::Approx(exact(0)).epsilon(1e-5));
    CHECK(projection(ps.theta_tilde, wave) == doctest::Approx(exact(1)).epsilon(1e-5));
    CHECK(projection(ps.v, wave) == doctest::Approx(v_exact).epsilon(1e-5));
  }
  SUBCASE("IMEX1 is first order") {
    auto error_at = [&](double dt) {
      const StepperConfig cfg{Scheme::IMEX1, dt, t_end, true, kDefaultPositivityFloor};
      PerturbationState ps = ps0;
      const int steps = static_cast<int>(std::lround(t_end / dt));
      for (int i = 0; i < steps; ++i) ps = step(ps, cfg, params);
      return std::abs(projection(ps.theta_tilde, wave) - exact(1));
    };
    const double ratio = error_at(0.02) / error_at(0.01);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("primitive form follows the same modes") {
    const StepperConfig cfg{Scheme::RK4, 0.005, t_end, true, kDefaultPositivityFloor};
    State s = convert_back(ps0);
    for (int i = 0; i < 100; ++i) s = step(s, cfg, params);
    CHECK(projection(s.theta - 1.0, wave) == doctest::Approx(exact(1)).epsilon(1e-5));
    CHECK(projection(s.n - s.p, wave) == doctest::Approx(v_exact).epsilon(1e-5));
  }
}

TEST_CASE("step guards") {
  const auto g = make_grid(3, 16);
  const PhysParams params;
  const State s = random_state(g, 1e-2, 2, 2);
  const double bound = stability_bound(s, Scheme::RK4, params);
  CHECK(bound > 0.0);
  CHECK(stability_bound(s, Scheme::IMEX1, params) > bound);
  CHECK_THROWS_AS(step(s, StepperConfig{Scheme::RK4, 1.5 * bound, 1.0, true, 1e-8}, params),
                  StabilityViolation);
  CHECK_NOTHROW(step(s, StepperConfig{Scheme::RK4, 0.9 * bound, 1.0, true, 1e-8}, params));
  CHECK_THROWS_AS(step(s, StepperConfig{Scheme::RK4, 0.5 * bound, 1.0, true, 1.0}, params),
                  PositivityViolation);

  State bad = s;
  bad.theta[5] = std::nan("");
  CHECK_THROWS_AS(step(bad, StepperConfig{Scheme::RK4, 1e-4, 1.0, true, 1e-8}, params),
                  NumericalBlowup);
}

TEST_CASE("mass and neutrality over many steps") {
  const auto g = make_grid(3, 8);
  const PhysParams params;
  State s = random_state(g, 0.05, 2, 21);
  const double n0 = s.n.integral(), p0 = s.p.integral();
  const StepperConfig cfg{Scheme::RK4, 0.5 * stability_bound(s, Scheme::RK4, params), 1.0,
                          true, kDefaultPositivityFloor};
  for (int i = 0; i < 200; ++i) s = step(s, cfg, params);
  CHECK(std::abs(s.n.integral() - n0) <= 1e-12 * n0);
  CHECK(std::abs(s.p.integral() - p0) <= 1e-12 * p0);
  CHECK(std::abs((s.n - s.p).mean()) <= 1e-13);
}
