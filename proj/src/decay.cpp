#include "pnpf/decay.hpp"

#include <cmath>
#include <limits>

#include "pnpf/errors.hpp"
#include "pnpf/initial.hpp"

namespace pnpf {
namespace {

double h2_squared(const ScalarField& f) {
  return Spectrum(f).weighted_norm_squared(f.grid()->sobolev_weight(2));
}

// Weight of sum_i |d_i f|_H2^2: |k|^2 times the H2 weight (Nyquist-zeroed).
RealVector gradient_h2_weight(const Grid& g) {
  const auto s0 = g.sobolev_weight(0);
  const auto s1 = g.sobolev_weight(1);
  const auto s2 = g.sobolev_weight(2);
  RealVector w(s0.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = (s1[k] - s0[k]) * s2[k] / s0[k];
  return w;
}

double mean_heat_capacity(const PhysParams& params) {
  return 0.5 * (params.c_p + params.c_n);
}

}  // namespace

double grad_phi_squared(const PerturbationState& ps) {
  const VectorField g = gradient(ps.phi);
  return inner_product(g, g);
}

double lyapunov(const PerturbationState& ps, const PhysParams& params) {
  const double c = mean_heat_capacity(params);
  return h2_squared(ps.u_tilde) + h2_squared(ps.v) +
         2.0 * c * h2_squared(ps.theta_tilde) + grad_phi_squared(ps);
}

DissipationLedger dissipation_ledger(const PerturbationState& ps, const PhysParams&) {
  const RealVector w = gradient_h2_weight(*ps.grid());
  double d1 = 0.0;
  for (const ScalarField* f : {&ps.u_tilde, &ps.v, &ps.theta_tilde}) {
    d1 += Spectrum(*f).weighted_norm_squared(w);
  }
  return DissipationLedger{d1, h2_squared(ps.v), grad_phi_squared(ps)};
}

void validate(const DecayExperiment& exp, const PhysParams& params) {
  if (!(exp.delta0 >= 0.0) || !std::isfinite(exp.delta0)) {
    throw ConfigError("decay.delta0 must be nonnegative");
  }
  if (exp.sample_every < 1) throw ConfigError("decay.sample_every must be >= 1");
  validate(exp.cfg);
  require_perturbation_params(params);
  if (!(params.c_p > 1.0)) throw ConfigError("decay experiments need c > 1");
}

double perturbation_size(const PerturbationState& ps) {
  ScalarField n = ps.u_tilde + ps.v;
  n *= 0.5;
  ScalarField p = ps.u_tilde - ps.v;
  p *= 0.5;
  const double h2 = std::sqrt(h2_squared(n) + h2_squared(p) + h2_squared(ps.theta_tilde));
  return h2 + std::sqrt(grad_phi_squared(ps));
}

PerturbationState decay_initial_state(const GridPtr& grid, const DecayExperiment& exp) {
  ScalarField n_dev(grid, 0.0), p_dev(grid, 0.0), theta_dev(grid, 0.0);
  if (exp.mode_profile == ModeProfile::SingleMode) {
    const ScalarField wave = sine_mode(grid, 0, 1);
    n_dev.axpy(0.5, wave);
    p_dev.axpy(-0.5, wave);
  } else {
    n_dev = random_band_field(grid, exp.seed, 0, exp.band);
    p_dev = random_band_field(grid, exp.seed, 1, exp.band);
    theta_dev = random_band_field(grid, exp.seed, 2, exp.band);
  }
  auto assemble = [&](double scale) {
    ScalarField u = n_dev + p_dev;
    ScalarField v = n_dev - p_dev;
    ScalarField th = theta_dev;
    u *= scale;
    v *= scale;
    th *= scale;
    return make_perturbation_state(std::move(u), std::move(v), std::move(th),
                                   exp.cfg.positivity_floor);
  };
  if (exp.delta0 == 0.0) return assemble(0.0);
  const double unit = perturbation_size(assemble(1.0e-6)) / 1.0e-6;
  return assemble(exp.delta0 / unit);
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double start = 0.5 * t.back();
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < start || !(y[i] > 0.0)) continue;
    const double ly = std::log(y[i]);
    n += 1.0;
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  const double denom = n * stt - st * st;
  if (n < 2.0 || denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -(n * sty - st * sy) / denom;
}

bool monotone_nonincreasing(const std::vector<double>& y, double tolerance) {
  for (std::size_t j = 0; j + 1 < y.size(); ++j) {
    if (y[j + 1] > y[j] * (1.0 + tolerance)) return false;
  }
  return true;
}

DecaySeries run_decay(const GridPtr& grid, const DecayExperiment& exp,
                      const PhysParams& params) {
  validate(exp, params);
  DecaySeries series;
  series.outside_smallness = exp.delta0 > kSmallnessLimit;

  auto sample = [&](double t, const PerturbationState& ps) {
    const DissipationLedger d = dissipation_ledger(ps, params);
    series.t.push_back(t);
    series.lyapunov.push_back(lyapunov(ps, params));
    series.v_l2.push_back(norm(ps.v, NormKind::l2()));
    series.grad_phi_l2.push_back(std::sqrt(d.d3));
    series.u_l2.push_back(norm(ps.u_tilde, NormKind::l2()));
    series.u_h2.push_back(norm(ps.u_tilde, NormKind::h2()));
    series.theta_h2.push_back(norm(ps.theta_tilde, NormKind::h2()));
    series.d1.push_back(d.d1);
    series.d2.push_back(d.d2);
    series.d3.push_back(d.d3);
  };

  const long steps = static_cast<long>(std::ceil(exp.cfg.t_end / exp.cfg.dt - 1e-9));
  try {
    PerturbationState ps = decay_initial_state(grid, exp);
    sample(0.0, ps);
    for (long k = 1; k <= steps; ++k) {
      ps = step(ps, exp.cfg, params);
      if (k % exp.sample_every == 0 || k == steps) {
        sample(static_cast<double>(k) * exp.cfg.dt, ps);
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    series.truncated = true;
    series.failure = e.what();
  }

  series.monotone = monotone_nonincreasing(series.lyapunov);
  series.rates = FittedRates{fit_decay_rate(series.t, series.lyapunov),
                             fit_decay_rate(series.t, series.v_l2),
                             fit_decay_rate(series.t, series.grad_phi_l2),
                             fit_decay_rate(series.t, series.u_l2),
                             fit_decay_rate(series.t, series.u_h2),
                             fit_decay_rate(series.t, series.theta_h2)};
  return series;
}

ScalingVerdict scaling_verdict(const DecaySeries& full, const DecaySeries& half) {
  if (full.lyapunov.empty() || half.lyapunov.empty() || !(half.lyapunov.back() > 0.0)) {
    return ScalingVerdict{std::numeric_limits<double>::quiet_NaN(), false};
  }
  const double ratio = full.lyapunov.back() / half.lyapunov.back();
  return ScalingVerdict{ratio, std::abs(ratio - 4.0) <= 0.8};
}

}  // namespace pnpf
