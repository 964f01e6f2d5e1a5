#include "pnpf/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "pnpf/errors.hpp"
#include "pnpf/poisson.hpp"

namespace pnpf {
namespace {

using Triple = std::array<ScalarField, 3>;
using Matrix3 = std::array<std::array<double, 3>, 3>;

ScalarField truncated(const ScalarField& f, Dealias mode) {
  return mode == Dealias::On ? dealias(f) : f;
}

Matrix3 primitive_block(const PhysParams& p) {
  const double c = p.c_p + p.c_n;
  return {{{p.D_n, 0.0, p.D_n},
           {0.0, p.D_p, p.D_p},
           {p.D_n / c, p.D_p / c, (p.k + p.D_p + p.D_n) / c}}};
}

Matrix3 perturbation_block(const PhysParams& p) {
  const double c = p.c_p;
  return {{{1.0, 0.0, 2.0}, {0.0, 1.0, 0.0}, {0.5 / c, 0.0, 1.5 / c}}};
}

double inf_norm(const Matrix3& m) {
  double r = 0.0;
  for (const auto& row : m) {
    r = std::max(r, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  }
  return r;
}

// Upper bound rho(M) <= ||M^(2^j)||^(1 / 2^j), tight for j large.
double spectral_radius_bound(Matrix3 m) {
  double log_scale = 0.0;
  double power = 1.0;
  for (int j = 0; j < 6; ++j) {
    const double s = inf_norm(m);
    if (s == 0.0) return 0.0;
    for (auto& row : m) {
      for (double& x : row) x /= s;
    }
    log_scale += std::log(s) / power;
    Matrix3 sq{};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        for (int c = 0; c < 3; ++c) sq[a][b] += m[a][c] * m[c][b];
      }
    }
    m = sq;
    power *= 2.0;
  }
  return std::exp(log_scale + std::log(inf_norm(m)) / power);
}

double max_wavenumber_squared(const Grid& g) {
  const double kmax = std::numbers::pi * g.points_per_axis() / g.box_length();
  return g.dim() * kmax * kmax;
}

void require_stable(double dt, double bound) {
  if (dt > bound) {
    throw StabilityViolation("StabilityViolation: dt = " + std::to_string(dt) +
                             " exceeds stability bound " + std::to_string(bound));
  }
}

// y + alpha * x
ScalarField shifted(const ScalarField& y, double alpha, const ScalarField& x) {
  ScalarField out = y;
  out.axpy(alpha, x);
  return out;
}

template <class Rhs, class Build>
Triple rk4(const Triple& y0, double dt, const Triple& k1, Rhs rhs, Build build) {
  auto stage = [&](double h, const Triple& k) {
    return rhs(build(Triple{shifted(y0[0], h, k[0]), shifted(y0[1], h, k[1]),
                            shifted(y0[2], h, k[2])}));
  };
  const Triple k2 = stage(0.5 * dt, k1);
  const Triple k3 = stage(0.5 * dt, k2);
  const Triple k4 = stage(dt, k3);
  Triple y = y0;
  for (std::size_t i = 0; i < 3; ++i) {
    ScalarField incr = k1[i];
    incr.axpy(2.0, k2[i]);
    incr.axpy(2.0, k3[i]);
    incr += k4[i];
    y[i].axpy(dt / 6.0, incr);
  }
  return y;
}

// Solves (I - dt lambda M) y = x for every spectral mode, where
// x = X + dt (F - lambda M X).
Triple imex1(const Triple& x0, const Triple& f0, double dt, const Matrix3& m) {
  const GridPtr& grid = x0[0].grid();
  const auto lambda = grid->laplacian_symbol();
  std::array<Spectrum, 3> x{Spectrum(x0[0]), Spectrum(x0[1]), Spectrum(x0[2])};
  const std::array<Spectrum, 3> f{Spectrum(f0[0]), Spectrum(f0[1]), Spectrum(f0[2])};
  std::array<std::span<Complex>, 3> xc{x[0].coefficients(), x[1].coefficients(),
                                       x[2].coefficients()};
  std::array<std::span<const Complex>, 3> fc{
      f[0].coefficients(), f[1].coefficients(), f[2].coefficients()};

  for (std::size_t k = 0; k < grid->spectral_size(); ++k) {
    const double s = dt * lambda[k];
    Matrix3 a{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - s * m[i][j];
    }
    std::array<Complex, 3> b;
    for (int i = 0; i < 3; ++i) {
      Complex mx = m[i][0] * xc[0][k] + m[i][1] * xc[1][k] + m[i][2] * xc[2][k];
      b[i] = xc[i][k] + dt * fc[i][k] - s * mx;
    }
    const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    const Matrix3 inv{{{c00 / det, (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det,
                        (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det},
                       {c01 / det, (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det,
                        (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det},
                       {c02 / det, (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det,
                        (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det}}};
    for (int i = 0; i < 3; ++i) {
      xc[i][k] = inv[i][0] * b[0] + inv[i][1] * b[1] + inv[i][2] * b[2];
    }
  }
  return Triple{x[0].field(), x[1].field(), x[2].field()};
}

double max_deviation_from_one(const ScalarField& f) {
  return std::max(std::abs(f.max() - 1.0), std::abs(f.min() - 1.0));
}

}  // namespace

void validate(const StepperConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw ConfigError("stepper.dt must be positive and finite");
  }
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
    throw ConfigError("stepper.t_end must be positive and finite");
  }
  if (!(cfg.positivity_floor >= 0.0)) {
    throw ConfigError("stepper.positivity_floor must be nonnegative");
  }
}

void require_perturbation_params(const PhysParams& params) {
  validate(params);
  if (params.c_p != params.c_n || params.D_p != 1.0 || params.D_n != 1.0 ||
      params.k != 1.0) {
    throw ConfigError(
        "the perturbation formulation needs c_p = c_n and D_p = D_n = k = 1");
  }
}

PrimitiveRates rhs_primitive(const State& s, const PhysParams& params,
                             Dealias mode) {
  check_state(s);
  const VectorField grad_phi = gradient(s.phi, mode);
  const Spectrum theta_hat(s.theta);
  const VectorField grad_theta = theta_hat.gradient(mode);
  const ScalarField lap_theta = theta_hat.laplacian();

  const ScalarField p_theta = s.p * s.theta;
  const ScalarField n_theta = s.n * s.theta;
  VectorField j_p = gradient(p_theta, mode) + s.p * grad_phi;
  j_p *= -params.D_p;
  VectorField j_n = gradient(n_theta, mode) - s.n * grad_phi;
  j_n *= -params.D_n;

  ScalarField dp = -divergence(j_p, mode);
  ScalarField dn = -divergence(j_n, mode);

  ScalarField num = params.k * lap_theta;
  num += dot(j_p, j_p) / (params.D_p * s.p);
  num += dot(j_n, j_n) / (params.D_n * s.n);
  num -= p_theta * divergence(j_p / s.p, mode);
  num -= n_theta * divergence(j_n / s.n, mode);
  num -= dot(params.c_p * j_p + params.c_n * j_n, grad_theta);
  ScalarField dtheta = num / (params.c_p * s.p + params.c_n * s.n);
  return PrimitiveRates{std::move(dn), std::move(dp), std::move(dtheta)};
}

PerturbationRates rhs_perturbation(const PerturbationState& ps,
                                   const PhysParams& params, Dealias mode) {
  require_perturbation_params(params);
  check_state(ps);
  const double c = params.c_p;
  const ScalarField& u = ps.u_tilde;
  const ScalarField& v = ps.v;
  const ScalarField& th = ps.theta_tilde;

  const Spectrum u_hat(u), v_hat(v), th_hat(th);
  const VectorField gu = u_hat.gradient(), gv = v_hat.gradient(), gth = th_hat.gradient();
  const ScalarField lu = u_hat.laplacian(), lv = v_hat.laplacian(), lth = th_hat.laplacian();
  const VectorField gphi = gradient(ps.phi);

  const ScalarField gth_gu = dot(gth, gu);
  const ScalarField gth_gv = dot(gth, gv);
  const ScalarField gv_gphi = dot(gv, gphi);
  const ScalarField gu_gphi = dot(gu, gphi);
  const ScalarField gth_gphi = dot(gth, gphi);

  ScalarField nl_u = th * lu + u * lth;
  nl_u.axpy(2.0, gth_gu);
  nl_u -= gv_gphi;
  nl_u -= v * v;

  ScalarField nl_v = th * lv + v * lth;
  nl_v.axpy(2.0, gth_gv);
  nl_v -= gu_gphi;
  nl_v -= u * v;

  const ScalarField inv_two_u = 1.0 / (2.0 + u);
  const ScalarField one_th = 1.0 + th;
  ScalarField nl_t = th * lth;
  nl_t -= (0.5 * u) * inv_two_u * lth;
  nl_t += (0.5 * (2.0 * (th * th) + 4.0 * th - u)) * inv_two_u * lu;
  nl_t.axpy(c + 1.0, dot(gth, gth));
  nl_t.axpy(c + 3.0, one_th * inv_two_u * gth_gu);
  nl_t.axpy(-2.0, one_th * inv_two_u * gv_gphi);
  nl_t.axpy(-(c + 2.0), v * inv_two_u * gth_gphi);
  nl_t -= one_th * (v * v) * inv_two_u;
  nl_t += dot(gphi, gphi);

  ScalarField du = lu;
  du.axpy(2.0, lth);
  du += truncated(nl_u, mode);

  ScalarField dv = lv;
  dv.axpy(-2.0, v);
  dv += truncated(nl_v, mode);

  ScalarField dth = 1.5 * lth;
  dth.axpy(0.5, lu);
  dth += truncated(nl_t, mode);
  dth *= 1.0 / c;
  return PerturbationRates{std::move(du), std::move(dv), std::move(dth)};
}

PerturbationState convert(const State& s) {
  ScalarField u = s.n + s.p;
  u -= 2.0;
  return PerturbationState{std::move(u), s.n - s.p, s.theta - 1.0, s.phi};
}

State convert_back(const PerturbationState& ps) {
  ScalarField n = ps.u_tilde + ps.v;
  n *= 0.5;
  n += 1.0;
  ScalarField p = ps.u_tilde - ps.v;
  p *= 0.5;
  p += 1.0;
  return State{std::move(n), std::move(p), ps.theta_tilde + 1.0, ps.phi};
}

void check_state(const PerturbationState& ps, double floor) {
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"u_tilde", &ps.u_tilde}, {"v", &ps.v}, {"theta_tilde", &ps.theta_tilde},
      {"phi", &ps.phi}};
  for (const auto& [name, f] : fields) {
    if (!f->all_finite()) {
      throw NumericalBlowup(std::string("NumericalBlowup: non-finite values in ") + name);
    }
  }
  double min_n = INFINITY, min_p = INFINITY;
  for (std::size_t i = 0; i < ps.v.size(); ++i) {
    min_n = std::min(min_n, 1.0 + 0.5 * (ps.u_tilde[i] + ps.v[i]));
    min_p = std::min(min_p, 1.0 + 0.5 * (ps.u_tilde[i] - ps.v[i]));
  }
  if (min_n < floor) throw PositivityViolation("n", min_n);
  if (min_p < floor) throw PositivityViolation("p", min_p);
  const double min_theta = 1.0 + ps.theta_tilde.min();
  if (min_theta < floor) throw PositivityViolation("theta", min_theta);
}

PerturbationState make_perturbation_state(ScalarField u_tilde, ScalarField v,
                                          ScalarField theta_tilde, double floor) {
  ScalarField phi = poisson::potential(v);
  PerturbationState ps{std::move(u_tilde), std::move(v), std::move(theta_tilde),
                       std::move(phi)};
  check_state(ps, floor);
  return ps;
}

double implicit_block_radius_primitive(const PhysParams& params) {
  return spectral_radius_bound(primitive_block(params));
}

double implicit_block_radius_perturbation(const PhysParams& params) {
  return spectral_radius_bound(perturbation_block(params));
}

namespace {

double bound_from(double rho, Scheme scheme, double max_theta, double deviation,
                  double max_u, double d_max, double k2) {
  const double reaction = max_u * d_max;
  if (scheme == Scheme::RK4) return 2.78 / (rho * max_theta * k2 + reaction);
  return 2.0 / (rho * deviation * k2 + reaction);
}

}  // namespace

double stability_bound(const State& s, Scheme scheme, const PhysParams& params) {
  const double deviation = std::max(
      {max_deviation_from_one(s.n), max_deviation_from_one(s.p),
       max_deviation_from_one(s.theta)});
  return bound_from(implicit_block_radius_primitive(params), scheme, s.theta.max(),
                    deviation, (s.n + s.p).max(), std::max(params.D_p, params.D_n),
                    max_wavenumber_squared(*s.grid()));
}

double stability_bound(const PerturbationState& ps, Scheme scheme,
                       const PhysParams& params) {
  const double half_dev = 0.5 * (ps.u_tilde.max_abs() + ps.v.max_abs());
  const double deviation = std::max(half_dev, ps.theta_tilde.max_abs());
  return bound_from(implicit_block_radius_perturbation(params), scheme,
                    1.0 + ps.theta_tilde.max(), deviation, 2.0 + ps.u_tilde.max(),
                    std::max(params.D_p, params.D_n),
                    max_wavenumber_squared(*ps.grid()));
}

State step(const State& s, const StepperConfig& cfg, const PhysParams& params) {
  require_stable(cfg.dt, stability_bound(s, cfg.scheme, params));
  const Dealias mode = cfg.dealias_mode();
  auto build = [&](Triple y) {
    return make_state(std::move(y[0]), std::move(y[1]), std::move(y[2]),
                      cfg.positivity_floor);
  };
  auto rhs = [&](const State& st) {
    PrimitiveRates r = rhs_primitive(st, params, mode);
    return Triple{std::move(r.dn), std::move(r.dp), std::move(r.dtheta)};
  };
  check_state(s, cfg.positivity_floor);
  const Triple y0{s.n, s.p, s.theta};
  const Triple k1 = rhs(s);
  if (cfg.scheme == Scheme::RK4) return build(rk4(y0, cfg.dt, k1, rhs, build));
  return build(imex1(y0, k1, cfg.dt, primitive_block(params)));
}

PerturbationState step(const PerturbationState& ps, const StepperConfig& cfg,
                       const PhysParams& params) {
  require_perturbation_params(params);
  require_stable(cfg.dt, stability_bound(ps, cfg.scheme, params));
  const Dealias mode = cfg.dealias_mode();
  auto build = [&](Triple y) {
    return make_perturbation_state(std::move(y[0]), std::move(y[1]),
                                   std::move(y[2]), cfg.positivity_floor);
  };
  auto rhs = [&](const PerturbationState& st) {
    PerturbationRates r = rhs_perturbation(st, params, mode);
    return Triple{std::move(r.du_tilde), std::move(r.dv), std::move(r.dtheta_tilde)};
  };
  check_state(ps, cfg.positivity_floor);
  const Triple y0{ps.u_tilde, ps.v, ps.theta_tilde};
  const Triple k1 = rhs(ps);
  if (cfg.scheme == Scheme::RK4) return build(rk4(y0, cfg.dt, k1, rhs, build));
  return build(imex1(y0, k1, cfg.dt, perturbation_block(params)));
}

}  // namespace pnpf
