#pragma once

// Physical state, constitutive fluxes and derived thermodynamic densities.
//
// Conventions: phi solves Laplacian(phi) = n - p with zero mean. With
//   a_p = (c_p + 1) theta + phi,   a_n = (c_n + 1) theta - phi
// the fluxes are
//   j_p = -D_p [grad(p theta) + p grad(phi)]
//   j_n = -D_n [grad(n theta) - n grad(phi)]
//   q   = -k grad(theta)
//   j_e = a_p j_p + a_n j_n + q + (phi_t grad(phi) - phi grad(phi_t)) / 2
// where Laplacian(phi_t) = div(j_p - j_n), so that e_t = -div(j_e).

#include <string>

#include "pnpf/grid.hpp"

namespace pnpf {

inline constexpr double kDefaultPositivityFloor = 1e-8;

struct PhysParams {
  double c_p = 1.5;
  double c_n = 1.5;
  double D_p = 1.0;
  double D_n = 1.0;
  double k = 1.0;
  /// Dielectric coefficient. Only eps = 1 is supported.
  double eps = 1.0;
};

/// Throws ConfigError unless every coefficient is positive and eps == 1.
void validate(const PhysParams& params);

struct State {
  ScalarField n;
  ScalarField p;
  ScalarField theta;
  ScalarField phi;

  const GridPtr& grid() const noexcept { return n.grid(); }
};

/// Builds a State, solving for phi. Throws NonNeutralSource or
/// PositivityViolation.
State make_state(ScalarField n, ScalarField p, ScalarField theta,
                 double floor = kDefaultPositivityFloor);

/// n = p = theta = 1, phi = 0.
State equilibrium_state(const GridPtr& grid);

/// Throws PositivityViolation naming the first field whose minimum is below
/// `floor`, or NumericalBlowup if any field is not finite.
void check_state(const State& s, double floor = kDefaultPositivityFloor);

struct FluxSet {
  VectorField j_p;
  VectorField j_n;
  VectorField q;
  VectorField j_e;
  VectorField v_p;
  VectorField v_n;
};

FluxSet constitutive_fluxes(const State& s, const PhysParams& params);

/// Time derivative of phi implied by the continuity equations.
ScalarField potential_rate(const VectorField& j_p, const VectorField& j_n);

/// e = (c_p p + c_n n) theta + (p - n) phi / 2
ScalarField energy_density(const State& s, const PhysParams& params);
/// eta = -p (log p - c_p log theta) - n (log n - c_n log theta)
ScalarField entropy_density(const State& s, const PhysParams& params);
/// |j_p|^2 / (D_p p theta) + |j_n|^2 / (D_n n theta) + |q|^2 / (k theta^2)
ScalarField entropy_production_density(const FluxSet& fl, const State& s,
                                       const PhysParams& params);

/// Pointwise Onsager coefficients and chemical potentials. With
/// X_s = grad(mu_s / theta) and Y = grad(1 / theta):
///   j_p = -L_pp X_p - L_pn X_n + L_ptheta Y
///   j_n = -L_np X_p - L_nn X_n + L_ntheta Y
///   j_e(local) = -L_thetap X_p - L_thetan X_n + L_thetatheta Y
/// where j_e(local) = a_p j_p + a_n j_n + q and
///   L_thetatheta = a_p^2 L_pp + a_n^2 L_nn + k theta^2.
struct OnsagerBlock {
  ScalarField L_pp, L_pn, L_np, L_nn;
  ScalarField L_ptheta, L_thetap, L_ntheta, L_thetan, L_thetatheta;
  ScalarField mu_p, mu_n;
};

OnsagerBlock onsager_block(const State& s, const PhysParams& params);

/// max|j_p(reconstructed) - j_p| + max|j_n(reconstructed) - j_n|, divided by
/// the largest flux component; 0 when every flux vanishes.
double flux_reconstruction_residual(const State& s, const PhysParams& params);
double flux_reconstruction_residual(const State& s, const OnsagerBlock& block,
                                    const PhysParams& params);

}  // namespace pnpf
