#include "pnpf/fields.hpp"

#include <algorithm>
#include <cmath>

#include "pnpf/errors.hpp"
#include "pnpf/poisson.hpp"

namespace pnpf {
namespace {

void require_positive(const char* name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string("params.") + name + " must be positive and finite");
  }
}

ScalarField log_of(const ScalarField& f) {
  return f.map([](double x) { return std::log(x); });
}

double max_abs_difference(const VectorField& a, const VectorField& b) {
  return (a - b).max_abs();
}

}  // namespace

void validate(const PhysParams& params) {
  require_positive("c_p", params.c_p);
  require_positive("c_n", params.c_n);
  require_positive("D_p", params.D_p);
  require_positive("D_n", params.D_n);
  require_positive("k", params.k);
  if (params.eps != 1.0) {
    throw ConfigError("params.eps other than 1 is not supported");
  }
}

void check_state(const State& s, double floor) {
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"n", &s.n}, {"p", &s.p}, {"theta", &s.theta}};
  for (const auto& [name, f] : fields) {
    if (!f->all_finite()) {
      throw NumericalBlowup(std::string("NumericalBlowup: non-finite values in ") + name);
    }
  }
  if (!s.phi.all_finite()) throw NumericalBlowup("NumericalBlowup: non-finite values in phi");
  for (const auto& [name, f] : fields) {
    const double m = f->min();
    if (m < floor) throw PositivityViolation(name, m);
  }
}

State make_state(ScalarField n, ScalarField p, ScalarField theta, double floor) {
  ScalarField phi = poisson::potential(n - p);
  State s{std::move(n), std::move(p), std::move(theta), std::move(phi)};
  check_state(s, floor);
  return s;
}

State equilibrium_state(const GridPtr& grid) {
  return State{ScalarField(grid, 1.0), ScalarField(grid, 1.0),
               ScalarField(grid, 1.0), ScalarField(grid, 0.0)};
}

ScalarField potential_rate(const VectorField& j_p, const VectorField& j_n) {
  ScalarField source = divergence(j_p - j_n);
  source -= source.mean();
  return poisson::potential(source);
}

FluxSet constitutive_fluxes(const State& s, const PhysParams& params) {
  check_state(s);
  const VectorField grad_phi = gradient(s.phi);

  VectorField j_p = gradient(s.p * s.theta) + s.p * grad_phi;
  j_p *= -params.D_p;
  VectorField j_n = gradient(s.n * s.theta) - s.n * grad_phi;
  j_n *= -params.D_n;
  VectorField q = gradient(s.theta);
  q *= -params.k;

  const ScalarField phi_t = potential_rate(j_p, j_n);
  const ScalarField a_p = (params.c_p + 1.0) * s.theta + s.phi;
  const ScalarField a_n = (params.c_n + 1.0) * s.theta - s.phi;
  VectorField j_e = a_p * j_p + a_n * j_n + q;
  j_e.axpy(0.5, phi_t * grad_phi);
  j_e.axpy(-0.5, s.phi * gradient(phi_t));

  VectorField v_p = j_p / s.p;
  VectorField v_n = j_n / s.n;
  return FluxSet{std::move(j_p), std::move(j_n), std::move(q),
                 std::move(j_e), std::move(v_p), std::move(v_n)};
}

ScalarField energy_density(const State& s, const PhysParams& params) {
  ScalarField e = (params.c_p * s.p + params.c_n * s.n) * s.theta;
  e += 0.5 * ((s.p - s.n) * s.phi);
  return e;
}

ScalarField entropy_density(const State& s, const PhysParams& params) {
  check_state(s);
  const ScalarField log_theta = log_of(s.theta);
  ScalarField eta = s.p * (log_of(s.p) - params.c_p * log_theta);
  eta += s.n * (log_of(s.n) - params.c_n * log_theta);
  return -eta;
}

ScalarField entropy_production_density(const FluxSet& fl, const State& s,
                                       const PhysParams& params) {
  check_state(s);
  ScalarField d = dot(fl.j_p, fl.j_p) / (params.D_p * (s.p * s.theta));
  d += dot(fl.j_n, fl.j_n) / (params.D_n * (s.n * s.theta));
  d += dot(fl.q, fl.q) / (params.k * (s.theta * s.theta));
  return d;
}

OnsagerBlock onsager_block(const State& s, const PhysParams& params) {
  check_state(s);
  const GridPtr& g = s.grid();
  const ScalarField log_theta = log_of(s.theta);
  const ScalarField a_p = (params.c_p + 1.0) * s.theta + s.phi;
  const ScalarField a_n = (params.c_n + 1.0) * s.theta - s.phi;

  OnsagerBlock b;
  b.L_pp = params.D_p * (s.p * s.theta);
  b.L_nn = params.D_n * (s.n * s.theta);
  b.L_pn = ScalarField(g, 0.0);
  b.L_np = b.L_pn;
  b.L_ptheta = a_p * b.L_pp;
  b.L_thetap = b.L_ptheta;
  b.L_ntheta = a_n * b.L_nn;
  b.L_thetan = b.L_ntheta;
  b.L_thetatheta = a_p * a_p * b.L_pp + a_n * a_n * b.L_nn +
                   params.k * (s.theta * s.theta);
  b.mu_p = s.theta * (log_of(s.p) - params.c_p * log_theta) + s.phi;
  b.mu_n = s.theta * (log_of(s.n) - params.c_n * log_theta) - s.phi;
  return b;
}

double flux_reconstruction_residual(const State& s, const OnsagerBlock& b,
                                    const PhysParams& params) {
  const FluxSet fl = constitutive_fluxes(s, params);
  const VectorField x_p = gradient(b.mu_p / s.theta);
  const VectorField x_n = gradient(b.mu_n / s.theta);
  const VectorField y = gradient(1.0 / s.theta);

  const VectorField j_p = b.L_ptheta * y - b.L_pp * x_p - b.L_pn * x_n;
  const VectorField j_n = b.L_ntheta * y - b.L_np * x_p - b.L_nn * x_n;

  const double scale = std::max(fl.j_p.max_abs(), fl.j_n.max_abs());
  const double diff =
      max_abs_difference(j_p, fl.j_p) + max_abs_difference(j_n, fl.j_n);
  // Without a flux scale the absolute deviation is reported.
  return scale == 0.0 ? diff : diff / scale;
}

double flux_reconstruction_residual(const State& s, const PhysParams& params) {
  return flux_reconstruction_residual(s, onsager_block(s, params), params);
}

}  // namespace pnpf
