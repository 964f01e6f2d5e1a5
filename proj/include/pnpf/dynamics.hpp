#pragma once

// Right-hand sides of both formulations and the time steppers.
//
// Primitive form (general parameters), divergence form for the densities:
//   n_t = -div(j_n),  p_t = -div(j_p)
//   (c_p p + c_n n) theta_t = k Lap(theta) + |j_p|^2/(D_p p) + |j_n|^2/(D_n n)
//       - p theta div(v_p) - n theta div(v_n) - (c_p j_p + c_n j_n) . grad(theta)
// Perturbation form (c_p = c_n = c, D_p = D_n = k = 1) in
//   u~ = n + p - 2,  v = n - p,  theta~ = theta - 1,  Lap(phi) = v.
//
// With Dealias::On the primitive form differentiates only 2/3-truncated
// spectra (fluxes, velocities, potential and temperature gradients); the
// Laplacian of theta and the pointwise theta_t quotient are left untruncated,
// which keeps total mass and energy exactly conserved by the semi-discrete
// system. The perturbation form truncates each nonlinear remainder.

#include "pnpf/fields.hpp"
#include "pnpf/grid.hpp"

namespace pnpf {

enum class Scheme { RK4, IMEX1 };

struct StepperConfig {
  Scheme scheme = Scheme::RK4;
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = true;
  double positivity_floor = kDefaultPositivityFloor;

  Dealias dealias_mode() const noexcept { return dealias ? Dealias::On : Dealias::Off; }
};

/// Throws ConfigError for nonpositive dt/t_end or a negative floor.
void validate(const StepperConfig& cfg);

struct PerturbationState {
  ScalarField u_tilde;
  ScalarField v;
  ScalarField theta_tilde;
  ScalarField phi;

  const GridPtr& grid() const noexcept { return v.grid(); }
};

struct PrimitiveRates {
  ScalarField dn, dp, dtheta;
};

struct PerturbationRates {
  ScalarField du_tilde, dv, dtheta_tilde;
};

PrimitiveRates rhs_primitive(const State& s, const PhysParams& params,
                             Dealias mode = Dealias::On);

/// Throws ConfigError unless c_p = c_n and D_p = D_n = k = 1.
PerturbationRates rhs_perturbation(const PerturbationState& ps,
                                   const PhysParams& params,
                                   Dealias mode = Dealias::On);

/// Requires params usable by the perturbation form.
void require_perturbation_params(const PhysParams& params);

PerturbationState convert(const State& s);
State convert_back(const PerturbationState& ps);

/// Builds a perturbation state from (u~, v, theta~), solving for phi.
PerturbationState make_perturbation_state(ScalarField u_tilde, ScalarField v,
                                          ScalarField theta_tilde,
                                          double floor = kDefaultPositivityFloor);

/// Throws PositivityViolation/NumericalBlowup if the implied n, p, theta are
/// not finite or fall below `floor`.
void check_state(const PerturbationState& ps, double floor = kDefaultPositivityFloor);

/// Spectral radius of the constant matrix M whose -|k|^2 M block is treated
/// implicitly by IMEX1, for each formulation.
double implicit_block_radius_primitive(const PhysParams& params);
double implicit_block_radius_perturbation(const PhysParams& params);

/// Largest admissible dt. With K2 = dim (pi N / L)^2 and rho the radius of M:
///   RK4:   2.78 / (rho max(theta) K2 + max(n + p) max(D))
///   IMEX1: 2 / (rho delta K2 + max(n + p) max(D)),
/// where delta = max(|n - 1|, |p - 1|, |theta - 1|).
double stability_bound(const State& s, Scheme scheme, const PhysParams& params);
double stability_bound(const PerturbationState& ps, Scheme scheme,
                       const PhysParams& params);

/// One time step. Throws StabilityViolation if cfg.dt exceeds the bound at
/// the current state, PositivityViolation or NumericalBlowup if any stage
/// leaves the admissible set.
State step(const State& s, const StepperConfig& cfg, const PhysParams& params);
PerturbationState step(const PerturbationState& ps, const StepperConfig& cfg,
                       const PhysParams& params);

}  // namespace pnpf
