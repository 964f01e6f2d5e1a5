#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "pnpf/errors.hpp"
#include "pnpf/thermo_audit.hpp"
#include "support.hpp"

using namespace pnpf;
using pnpf::test::make_grid;
using pnpf::test::random_state;
using pnpf::test::ScratchDir;

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

AuditRecord synthetic(long step, double t) {
  AuditRecord r;
  r.step = step;
  r.t = t;
  r.E = 5.0 + 0.1 * t;
  r.S = t * t;
  r.Delta = 2.0 * t;
  return r;
}

}  // namespace

TEST_CASE("totals at equilibrium") {
  const auto g = make_grid(3, 8, 2.0);
  const PhysParams params;
  const Totals t = totals(equilibrium_state(g), params);
  CHECK(t.mass_n == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(t.mass_p == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(t.E == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(t.S == 0.0);
  CHECK(t.Delta == 0.0);

  const State hot = make_state(ScalarField(g, 1.0), ScalarField(g, 1.0), ScalarField(g, 2.0));
  const Totals th = totals(hot, params);
  CHECK(th.S == doctest::Approx(3.0 * std::log(2.0) * 8.0).epsilon(1e-14));
  CHECK(th.E == doctest::Approx(48.0).epsilon(1e-15));
}

TEST_CASE("sampled derivatives") {
  const std::vector<double> t{0.0, 0.1, 0.25, 0.3, 0.7, 1.0};
  std::vector<double> y;
  for (double x : t) y.push_back(3.0 * x * x - x + 2.0);
  const auto d = sampled_derivative(t, y);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(d[i] == doctest::Approx(6.0 * t[i] - 1.0).epsilon(1e-12));
  CHECK_THROWS_AS(sampled_derivative({0.0, 1.0}, {0.0, 1.0}), Error);

  std::vector<double> S, Delta;
  for (double x : t) {
    S.push_back(x * x);
    Delta.push_back(2.0 * x);
  }
  for (double r : clausius_duhem_residual(t, S, Delta)) CHECK(std::abs(r) <= 1e-13);

  const auto e = energy_conservation_residual({2.0, 2.2, 1.8});
  CHECK(e[0] == 0.0);
  CHECK(e[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(e[2] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("Onsager structure") {
  const PhysParams params{1.2, 1.9, 0.8, 1.4, 0.6, 1.0};
  const State s = random_state(make_grid(3, 16), 1e-3, 1, 4);
  CHECK(onsager_residual(s, params) <= 1e-10);

  OnsagerBlock broken = onsager_block(s, params);
  broken.L_ptheta *= 1.01;
  CHECK(onsager_residual(s, broken, params) > 1e-3);

  CHECK(onsager_residual(equilibrium_state(make_grid(3, 8)), params) == 0.0);
}

TEST_CASE("audit writer") {
  ScratchDir dir("audit");
  const auto path = dir / "audit.csv";
  {
    AuditWriter w(path);
    for (int i = 0; i < 3; ++i) w.add(synthetic(i, 0.1 * i));
    // The newest row waits for its successor so it can use a centred stencil.
    CHECK(read_lines(path).size() == 3);
    w.add(synthetic(3, 0.35));
    w.add(synthetic(4, 0.5));
    w.finish();
    CHECK(w.records().size() == 5);
    for (const auto& r : w.records()) CHECK(std::abs(r.dSdt_minus_Delta) <= 1e-13);
    CHECK(w.records()[4].energy_drift_rel == doctest::Approx(0.05 / 5.0).epsilon(1e-12));
  }
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] ==
        "step,t,mass_n,mass_p,E,S,Delta,dSdt_minus_Delta,energy_drift_rel,onsager_residual,"
        "lyapunov");
  CHECK(lines[2].rfind("1,0.10000000000000001,0,0,5.0099999999999998,", 0) == 0);

  SUBCASE("short trails are still flushed") {
    const auto p2 = dir / "short.csv";
    AuditWriter w(p2);
    w.add(synthetic(0, 0.0));
    w.add(synthetic(1, 0.5));
    w.finish();
    CHECK(read_lines(p2).size() == 3);
    CHECK(w.records()[1].dSdt_minus_Delta == doctest::Approx(0.5 - 1.0));
  }
  CHECK_THROWS_AS(AuditWriter(dir / "missing" / "x.csv"), Error);
}

TEST_CASE("audit records are deterministic") {
  const PhysParams params;
  const State s = random_state(make_grid(3, 8), 1e-2, 2, 9);
  const AuditRecord a = audit_state(7, 0.25, s, params);
  const AuditRecord b = audit_state(7, 0.25, s, params);
  CHECK(a.E == b.E);
  CHECK(a.S == b.S);
  CHECK(a.Delta == b.Delta);
  CHECK(a.lyapunov == b.lyapunov);
  CHECK(a.Delta > 0.0);
  CHECK(a.S < 0.0);
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}
