#include <cmath>

#include <doctest.h>

#include "pnpf/errors.hpp"
#include "pnpf/initial.hpp"
#include "support.hpp"

using namespace pnpf;
using pnpf::test::make_grid;
using pnpf::test::max_abs_diff;

namespace {

// Independent SplitMix64 reference.
std::uint64_t splitmix(std::uint64_t state) {
  std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TEST_CASE("counter-based stream reference values") {
  CHECK(CounterRng::bits(0, 0) == 0xe220a8397b1dcdafULL);
  CHECK(CounterRng::bits(1, 0) == 0x910a2dec89025cc1ULL);
  CHECK(CounterRng::bits(1, 1) == 0xbeeb8da1658eec67ULL);
  CHECK(CounterRng::bits(1, 2) == 0xf893a2eefb32555eULL);
  CHECK(CounterRng::bits(42, std::uint64_t{1} << 32) == 0xbf98ac77734bec1dULL);

  CounterRng a(1);
  CHECK(a.next_uniform() == 0.5665615751722809);
  CounterRng b(7, 3);
  CHECK(b.next_symmetric() == -0.6813825626660943);
}

TEST_CASE("stream equals sequential SplitMix64") {
  // Draw c of a seed is the (c + 1)-th output of SplitMix64 seeded with it.
  std::uint64_t state = 12345;
  CounterRng rng(12345);
  for (int c = 0; c < 100; ++c) {
    const std::uint64_t expected = splitmix(state);
    state += 0x9E3779B97F4A7C15ULL;
    REQUIRE(rng.next_bits() == expected);
  }
  CounterRng s0(5, 0), s1(5, 1);
  CHECK(s0.next_bits() != s1.next_bits());
  for (int i = 0; i < 1000; ++i) {
    const double u = s0.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("random band fields") {
  const auto g = make_grid(3, 16, 3.0);
  const ScalarField f = random_band_field(g, 9, 2, 3);
  CHECK(max_abs_diff(f, random_band_field(g, 9, 2, 3)) == 0.0);
  CHECK(max_abs_diff(f, random_band_field(g, 9, 3, 3)) > 0.1);
  CHECK(std::abs(f.mean()) <= 1e-13);

  Spectrum spec(f);
  const auto c = spec.coefficients();
  double outside = 0.0, inside = 0.0;
  for (std::size_t m = 0; m < g->spectral_size(); ++m) {
    bool in_band = true;
    for (int a = 0; a < 3; ++a) in_band = in_band && std::abs(g->integer_wavenumber(m, a)) <= 3;
    (in_band ? inside : outside) = std::max(in_band ? inside : outside, std::abs(c[m]));
  }
  CHECK(inside > 1.0);
  CHECK(outside <= 1e-10 * inside);

  CHECK_THROWS_AS(random_band_field(g, 1, 0, 0), ConfigError);
  CHECK_THROWS_AS(random_band_field(g, 1, 0, 6), ConfigError);
}

TEST_CASE("single mode 1D field follows the documented draw order") {
  const auto g = make_grid(1, 8, 2.0 * std::numbers::pi);
  // Band 1 in 1D draws (alpha, beta) for m = -1 and then m = +1.
  CounterRng rng(3, 0);
  const double a_minus = rng.next_symmetric(), b_minus = rng.next_symmetric();
  const double a_plus = rng.next_symmetric(), b_plus = rng.next_symmetric();
  const auto expected = ScalarField::sample(g, [&](const auto& x) {
    return a_minus * std::cos(-x[0]) + b_minus * std::sin(-x[0]) + a_plus * std::cos(x[0]) +
           b_plus * std::sin(x[0]);
  });
  CHECK(max_abs_diff(random_band_field(g, 3, 0, 1), expected) <= 1e-15);
}

TEST_CASE("initial states") {
  const auto g = make_grid(3, 8, 2.0);
  InitialCondition ic;
  CHECK(max_abs_diff(build_initial_state(g, ic).n, ScalarField(g, 1.0)) == 0.0);

  ic.kind = InitialCondition::Kind::SingleMode;
  ic.single_mode = SingleModeIC{"v", 1, 0.02, 2};
  const State sv = build_initial_state(g, ic);
  CHECK(max_abs_diff(sv.n - sv.p, 0.02 * sine_mode(g, 1, 2)) <= 1e-16);
  CHECK(max_abs_diff(sv.n + sv.p, ScalarField(g, 2.0)) <= 1e-15);
  CHECK(sv.phi.max_abs() > 0.0);

  ic.single_mode = SingleModeIC{"u", 0, 0.02, 1};
  const State su = build_initial_state(g, ic);
  CHECK(max_abs_diff(su.n, su.p) == 0.0);
  CHECK(su.phi.max_abs() == 0.0);

  ic.single_mode = SingleModeIC{"w", 0, 0.02, 1};
  CHECK_THROWS_AS(build_initial_state(g, ic), ConfigError);
  ic.single_mode = SingleModeIC{"theta", 3, 0.02, 1};
  CHECK_THROWS_AS(build_initial_state(g, ic), ConfigError);
  ic.single_mode = SingleModeIC{"theta", 0, 2.0, 1};
  CHECK_THROWS_AS(build_initial_state(g, ic), PositivityViolation);

  ic.kind = InitialCondition::Kind::RandomBand;
  ic.random_band = RandomBandIC{4, 0.03, 2};
  const State sr = build_initial_state(g, ic);
  CHECK((sr.n - 1.0).max_abs() == doctest::Approx(0.03).epsilon(1e-14));
  CHECK((sr.theta - 1.0).max_abs() == doctest::Approx(0.03).epsilon(1e-14));

  ic.kind = InitialCondition::Kind::Equilibrium;
  ic.background = Background{1.1, 1.0, 1.0};
  CHECK_THROWS_AS(build_initial_state(g, ic), NonNeutralSource);
}
