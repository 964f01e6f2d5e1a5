#pragma once

// Small-perturbation decay experiments in the perturbation variables.
//
// Lyapunov functional:
//   Lambda = |u~|_H2^2 + |v|_H2^2 + 2c |theta~|_H2^2 + |grad phi|_L2^2
// Dissipation ledger:
//   d1 = sum_i |d_i (u~, v, theta~)|_H2^2,  d2 = |v|_H2^2,  d3 = |grad phi|_L2^2
// All norms use spectral derivatives (see norm()).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnpf/dynamics.hpp"

namespace pnpf {

/// Initial sizes above this are flagged as outside the smallness regime.
inline constexpr double kSmallnessLimit = 0.1;
/// Relative slack allowed per sample in the monotonicity verdict.
inline constexpr double kMonotoneTolerance = 1e-10;

double lyapunov(const PerturbationState& ps, const PhysParams& params);

struct DissipationLedger {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

DissipationLedger dissipation_ledger(const PerturbationState& ps,
                                     const PhysParams& params);

/// |grad phi|_L2^2
double grad_phi_squared(const PerturbationState& ps);

enum class ModeProfile { SingleMode, RandomBand };

struct DecayExperiment {
  double delta0 = 1e-2;
  std::uint64_t seed = 1;
  ModeProfile mode_profile = ModeProfile::RandomBand;
  int band = 2;
  StepperConfig cfg{Scheme::RK4, 1e-3, 5.0, true, kDefaultPositivityFloor};
  int sample_every = 10;
};

/// Throws ConfigError for delta0 < 0, sample_every < 1 or invalid stepper
/// settings, and for parameters the perturbation form cannot use (c_p = c_n
/// = c > 1, D_p = D_n = k = 1).
void validate(const DecayExperiment& exp, const PhysParams& params);

/// Size |(n - 1, p - 1, theta - 1)|_H2 + |grad phi|_L2 of a state.
double perturbation_size(const PerturbationState& ps);

/// single_mode: a charge mode n = 1 + a/2 sin(2 pi x_0 / L), p = 1 - a/2 sin(..);
/// random_band: independent band-limited n, p, theta deviations. Either
/// profile is scaled so perturbation_size() equals delta0.
PerturbationState decay_initial_state(const GridPtr& grid, const DecayExperiment& exp);

struct FittedRates {
  double lyapunov = 0.0;
  double v_l2 = 0.0;
  double grad_phi_l2 = 0.0;
  double u_l2 = 0.0;
  double u_h2 = 0.0;
  double theta_h2 = 0.0;
};

struct DecaySeries {
  std::vector<double> t, lyapunov, v_l2, grad_phi_l2, u_l2, u_h2, theta_h2;
  std::vector<double> d1, d2, d3;
  FittedRates rates;
  bool outside_smallness = false;
  bool truncated = false;
  std::string failure;
  bool monotone = true;
};

/// Exponential rate r of y ~ exp(-r t) by least squares on log(y) over the
/// samples with t >= t_last / 2. NaN when fewer than two positive samples.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y);

/// y[j + 1] <= y[j] (1 + tolerance) for every j.
bool monotone_nonincreasing(const std::vector<double>& y,
                            double tolerance = kMonotoneTolerance);

/// Integrates the experiment, sampling every sample_every steps plus the
/// final state. Stepper aborts end the series early with truncated = true.
DecaySeries run_decay(const GridPtr& grid, const DecayExperiment& exp,
                      const PhysParams& params);

/// Terminal-Lambda ratio of two runs and whether it lies in 4 +/- 20%.
struct ScalingVerdict {
  double ratio = 0.0;
  bool pass = false;
};
ScalingVerdict scaling_verdict(const DecaySeries& full, const DecaySeries& half);

}  // namespace pnpf
