#pragma once

// Numerical check of the variational force identities.
//
// Kernel: G = (-Laplacian)^{-1} on zero-mean fields (means are removed
// before G is applied). Flow-map probes dJ perturb densities by
// dp = -div(dJ_p), dn = -div(dJ_n), de = -div(dJ_e).
//
// Entropy as a functional of (p, n, e):
//   phi = G(p - n),  theta = (e - (p - n) phi / 2) / (c_p p + c_n n)
// Conservative forces (their pairing with dJ is dS/d eps along the probe):
//   f_p = -grad[log p - c_p log theta + phi/(2 theta) + G((p - n)/(2 theta))]
//   f_n = -grad[log n - c_n log theta - phi/(2 theta) - G((p - n)/(2 theta))]
//   f_e =  grad(1 / theta)
// Dissipation as a functional of (j_p, j_n, j_e) with
//   q = j_e - a_p j_p - a_n j_n - (phi_t grad(phi) - phi grad(phi_t)) / 2,
//   phi_t = -G div(j_p - j_n).
// With w = q / (k theta^2), h = w . grad(phi) + div(phi w), H = G(h):
//   f_p = j_p / (D_p p theta) - a_p w - grad(H) / 2
//   f_n = j_n / (D_n n theta) - a_n w + grad(H) / 2
//   f_e = w
// whose pairing with dj is half the derivative of the dissipation along dj.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnpf/fields.hpp"

namespace pnpf {

/// Derived temperature; throws PositivityViolation if it is not positive.
ScalarField temperature_from_energy(const ScalarField& p, const ScalarField& n,
                                    const ScalarField& e, const PhysParams& params);

double entropy_functional(const ScalarField& p, const ScalarField& n,
                          const ScalarField& e, const PhysParams& params);

struct ForceSet {
  VectorField f_p;
  VectorField f_n;
  VectorField f_e;
};

ForceSet conservative_force_closed(const State& s, const PhysParams& params);

/// Heat flux implied by (j_p, j_n, j_e) at state s.
VectorField eliminate_heat_flux(const State& s, const VectorField& j_p,
                                const VectorField& j_n, const VectorField& j_e,
                                const PhysParams& params);

/// Total entropy production of the flux triple, q eliminated.
double dissipation_functional(const State& s, const VectorField& j_p,
                              const VectorField& j_n, const VectorField& j_e,
                              const PhysParams& params);

/// Uses fl.j_p, fl.j_n and fl.j_e; fl.q is recomputed by elimination.
ForceSet dissipative_force_closed(const State& s, const FluxSet& fl,
                                  const PhysParams& params);

/// max over p, n, e of max|f_dis - f_con| for the constitutive fluxes,
/// divided by the largest conservative force component (absolute when the
/// forces vanish).
double force_balance_residual(const State& s, const PhysParams& params);

struct FlowMapProbe {
  VectorField dJ_p;
  VectorField dJ_n;
  VectorField dJ_e;
  std::vector<double> eps_scan{1e-3, 1e-4, 1e-5};
};

/// Band-limited random probe. Flow maps are ordered p, n, e; component a of
/// flow map m uses random stream first_stream + dim m + a. Each component is
/// scaled to max |.| = amplitude.
FlowMapProbe random_probe(const GridPtr& grid, std::uint64_t seed,
                          std::uint64_t first_stream, int band, double amplitude);

/// sum over flow maps of the cell-volume weighted pairing <f, dJ>.
double pairing(const ForceSet& f, const FlowMapProbe& probe);

struct ScanEntry {
  double eps = 0.0;
  double finite_difference = 0.0;
  double error = 0.0;
  /// Error floor explained by roundoff in the two functional evaluations.
  double noise_floor = 0.0;
};

struct ProbeReport {
  std::string kind;
  int index = 0;
  double closed_form = 0.0;
  std::vector<ScanEntry> scan;
  double best_eps = 0.0;
  double best_error = 0.0;
  /// Smallest observed order over the informative consecutive eps pairs
  /// (NaN when every pair is noise limited).
  double order = 0.0;
  bool relative = true;
  bool converged = false;
  bool pass = false;
};

/// Minimum order required of informative eps pairs.
inline constexpr double kMinimumObservedOrder = 1.5;

/// Compares <f_con, dJ> with central differences of S along the probe.
ProbeReport check_conservative_probe(const State& s, const FlowMapProbe& probe,
                                     const PhysParams& params, double threshold);

/// Compares <f_dis, dj> with half the central difference of the dissipation
/// functional at the constitutive fluxes along the probe.
ProbeReport check_dissipative_probe(const State& s, const FlowMapProbe& probe,
                                    const PhysParams& params, double threshold);

struct VarcheckConfig {
  int probes = 3;
  std::uint64_t seed = 11;
  int band = 1;
  double probe_amplitude = 1.0;
  std::vector<double> eps_scan{1e-3, 1e-4, 1e-5};
  double threshold = 1e-6;
  double balance_threshold = 1e-8;
};

void validate(const VarcheckConfig& cfg, const GridSpec& grid);

struct VarcheckReport {
  std::vector<ProbeReport> conservative;
  std::vector<ProbeReport> dissipative;
  double force_balance = 0.0;
  bool balance_pass = false;
  bool pass = false;

  nlohmann::json to_json() const;
};

VarcheckReport run_varcheck(const State& s, const PhysParams& params,
                            const VarcheckConfig& cfg);

}  // namespace pnpf
