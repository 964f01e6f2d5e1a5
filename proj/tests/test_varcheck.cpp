#include <cmath>

#include <doctest.h>

#include "pnpf/errors.hpp"
#include "pnpf/poisson.hpp"
#include "pnpf/varcheck.hpp"
#include "support.hpp"

using namespace pnpf;
using pnpf::test::make_grid;
using pnpf::test::max_abs_diff;
using pnpf::test::random_state;

TEST_CASE("entropy functional") {
  const PhysParams params;
  const auto g = make_grid(3, 8, 2.0);
  const ScalarField one(g, 1.0);
  const double c = params.c_p + params.c_n;
  CHECK(entropy_functional(one, one, ScalarField(g, c), params) == doctest::Approx(0.0));
  CHECK(entropy_functional(one, one, ScalarField(g, 2.0 * c), params) ==
        doctest::Approx(c * std::log(2.0) * 8.0).epsilon(1e-14));

  const PhysParams asym{1.2, 1.9, 0.8, 1.4, 0.6, 1.0};
  const State s = random_state(g, 0.05, 2, 6);
  const ScalarField e = energy_density(s, asym);
  CHECK(max_abs_diff(temperature_from_energy(s.p, s.n, e, asym), s.theta) <= 1e-13);
  CHECK(entropy_functional(s.p, s.n, e, asym) ==
        doctest::Approx(entropy_density(s, asym).integral()).epsilon(1e-13));
}

TEST_CASE("closed-form forces") {
  const PhysParams params;
  const auto g = make_grid(3, 8);
  const ForceSet eq = conservative_force_closed(equilibrium_state(g), params);
  CHECK(eq.f_p.max_abs() == 0.0);
  CHECK(eq.f_n.max_abs() == 0.0);
  CHECK(eq.f_e.max_abs() == 0.0);

  SUBCASE("temperature slice") {
    const ScalarField theta = 1.0 + 1e-2 * sine_mode(g, 0, 1);
    const State s = make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), theta);
    const ForceSet f = conservative_force_closed(s, params);
    // log(theta) and 1/theta are not band-limited; the bound is the
    // truncation error of their spectral gradients on 8 points.
    const VectorField gt = gradient(theta);
    CHECK(max_abs_diff(f.f_p, params.c_p * gt / theta) <= 1e-10);
    CHECK(max_abs_diff(f.f_n, params.c_n * gt / theta) <= 1e-10);
    CHECK(max_abs_diff(f.f_e, -1.0 * gt / (theta * theta)) <= 1e-10);
  }
  SUBCASE("pure heat flux at rest") {
    const State s = equilibrium_state(g);
    const VectorField zero(g, 0.0);
    VectorField unit(g, 0.0);
    unit[0] = ScalarField(g, 1.0);
    const FluxSet fl{zero, zero, unit, unit, zero, zero};
    const ForceSet f = dissipative_force_closed(s, fl, params);
    CHECK(max_abs_diff(f.f_e, unit) <= 1e-15);
    CHECK(max_abs_diff(f.f_p, -(params.c_p + 1.0) * unit) <= 1e-14);
    CHECK(dissipation_functional(s, zero, zero, unit, params) ==
          doctest::Approx(g->volume()).epsilon(1e-14));
  }
}

TEST_CASE("heat-flux elimination recovers the constitutive heat flux") {
  const PhysParams params{1.2, 1.9, 0.8, 1.4, 0.6, 1.0};
  const State s = random_state(make_grid(3, 16), 1e-3, 1, 8);
  const FluxSet fl = constitutive_fluxes(s, params);
  const VectorField q = eliminate_heat_flux(s, fl.j_p, fl.j_n, fl.j_e, params);
  CHECK(max_abs_diff(q, fl.q) <= 1e-10 * fl.q.max_abs());
}

TEST_CASE("directional derivative probes") {
  const PhysParams params;
  const auto g = make_grid(3, 8);
  const State s = random_state(g, 1e-3, 1, 2);
  for (std::uint64_t i = 0; i < 2; ++i) {
    CAPTURE(i);
    const FlowMapProbe probe = random_probe(g, 11, 16 * i, 1, 1.0);
    const ProbeReport c = check_conservative_probe(s, probe, params, 1e-6);
    CHECK(c.pass);
    CHECK(c.best_error <= 1e-6);
    CHECK(c.scan.size() == 3);
    const ProbeReport d = check_dissipative_probe(s, probe, params, 1e-6);
    CHECK(d.pass);
    CHECK(d.best_error <= 1e-10);
  }
  const FlowMapProbe probe = random_probe(g, 11, 0, 1, 1.0);
  CHECK(probe.dJ_p.max_abs() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(check_conservative_probe(s, probe, params, 0.0).pass);
}

TEST_CASE("pairing is linear in the probe") {
  const PhysParams params;
  const auto g = make_grid(3, 8);
  const ForceSet f = conservative_force_closed(random_state(g, 1e-2, 2, 3), params);
  const FlowMapProbe a = random_probe(g, 5, 0, 2, 1.0);
  const FlowMapProbe b = random_probe(g, 5, 16, 2, 1.0);
  const FlowMapProbe sum{a.dJ_p + b.dJ_p, a.dJ_n + b.dJ_n, a.dJ_e + b.dJ_e, {}};
  const double lhs = pairing(f, sum);
  CHECK(std::abs(lhs - pairing(f, a) - pairing(f, b)) <= 1e-12 * std::abs(lhs));
}

TEST_CASE("force balance") {
  const PhysParams params;
  CHECK(force_balance_residual(equilibrium_state(make_grid(3, 8)), params) == 0.0);
  CHECK(force_balance_residual(random_state(make_grid(3, 16), 1e-3, 1, 1), params) <= 1e-10);
  CHECK(force_balance_residual(random_state(make_grid(3, 16), 1e-3, 2, 1), params) <= 1e-8);
  const auto g = make_grid(3, 16);
  const State slice =
      make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), 1.0 + 1e-3 * sine_mode(g, 2, 1));
  CHECK(force_balance_residual(slice, params) <= 1e-10);
}

TEST_CASE("varcheck configuration and report") {
  const GridSpec spec{3, 8, 6.0};
  VarcheckConfig cfg;
  CHECK_NOTHROW(validate(cfg, spec));
  cfg.probes = 0;
  CHECK_THROWS_AS(validate(cfg, spec), ConfigError);
  cfg = VarcheckConfig{};
  cfg.eps_scan = {};
  CHECK_THROWS_AS(validate(cfg, spec), ConfigError);
  cfg = VarcheckConfig{};
  cfg.threshold = -1.0;
  CHECK_THROWS_AS(validate(cfg, spec), ConfigError);

  cfg = VarcheckConfig{};
  cfg.probes = 1;
  const VarcheckReport r = run_varcheck(equilibrium_state(make_grid(3, 8)), PhysParams{}, cfg);
  CHECK(r.pass);
  const auto j = r.to_json();
  CHECK(j.at("conservative").size() == 1);
  CHECK(j.at("force_balance").at("pass") == true);
}
