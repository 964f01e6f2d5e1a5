#include "pnpf/varcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pnpf/errors.hpp"
#include "pnpf/initial.hpp"
#include "pnpf/poisson.hpp"

namespace pnpf {
namespace {

// Roundoff of a functional evaluation is modelled as independent per-point
// errors of this many ulps of the integrand scale, so it grows like the
// root-sum-square of that scale.
constexpr double kNoiseUlps = 4.0;

ScalarField log_field(const ScalarField& f) {
  return f.map([](double x) { return std::log(x); });
}

ScalarField abs_field(const ScalarField& f) {
  return f.map([](double x) { return std::abs(x); });
}

// G applied after removing the mean.
ScalarField kernel(const ScalarField& g) {
  return -poisson::potential(remove_mean(g));
}

struct Densities {
  ScalarField p, n, e;
};

double root_sum_square(const ScalarField& m) {
  return std::sqrt(inner_product(m, m) * m.grid()->cell_volume());
}

// Per-point scale of the entropy integrand, including the rounding of the
// densities themselves.
double entropy_noise_scale(const Densities& d, const PhysParams& params) {
  const ScalarField log_theta = log_field(temperature_from_energy(d.p, d.n, d.e, params));
  ScalarField m = d.p * (1.0 + abs_field(log_field(d.p)));
  m += d.n * (1.0 + abs_field(log_field(d.n)));
  m += (params.c_p * d.p + params.c_n * d.n) * (1.0 + abs_field(log_theta));
  return root_sum_square(m);
}

Densities shifted(const Densities& base, const Densities& dir, double eps) {
  Densities out{base.p, base.n, base.e};
  out.p.axpy(eps, dir.p);
  out.n.axpy(eps, dir.n);
  out.e.axpy(eps, dir.e);
  return out;
}

double max_abs_difference(const VectorField& a, const VectorField& b) {
  return (a - b).max_abs();
}

void finish_report(ProbeReport& r, double threshold) {
  r.relative = r.closed_form != 0.0;
  const double scale = r.relative ? std::abs(r.closed_form) : 1.0;
  for (auto& e : r.scan) {
    e.error = std::abs(e.finite_difference - r.closed_form) / scale;
    e.noise_floor /= scale;
  }
  auto best = std::min_element(r.scan.begin(), r.scan.end(),
                               [](const ScanEntry& a, const ScanEntry& b) {
                                 return a.error < b.error;
                               });
  r.best_eps = best->eps;
  r.best_error = best->error;

  r.order = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < r.scan.size(); ++i) {
    const ScanEntry& a = r.scan[i];
    const ScanEntry& b = r.scan[i + 1];
    if (!(a.error > a.noise_floor && b.error > b.noise_floor)) continue;
    const double order = std::log(a.error / b.error) / std::log(a.eps / b.eps);
    if (std::isnan(r.order) || order < r.order) r.order = order;
  }
  r.converged = std::isnan(r.order) || r.order >= kMinimumObservedOrder;
  r.pass = r.converged && r.best_error <= threshold;
}

nlohmann::json probe_json(const ProbeReport& r) {
  nlohmann::json scan = nlohmann::json::array();
  for (const auto& e : r.scan) {
    scan.push_back({{"eps", e.eps},
                    {"finite_difference", e.finite_difference},
                    {"error", e.error},
                    {"noise_floor", e.noise_floor}});
  }
  nlohmann::json j{{"kind", r.kind},
                   {"index", r.index},
                   {"closed_form", r.closed_form},
                   {"error_is_relative", r.relative},
                   {"scan", scan},
                   {"best_eps", r.best_eps},
                   {"best_error", r.best_error},
                   {"converged", r.converged},
                   {"pass", r.pass}};
  j["order"] = std::isnan(r.order) ? nlohmann::json(nullptr) : nlohmann::json(r.order);
  return j;
}

}  // namespace

ScalarField temperature_from_energy(const ScalarField& p, const ScalarField& n,
                                    const ScalarField& e, const PhysParams& params) {
  const ScalarField phi = poisson::potential(n - p);
  ScalarField theta = e - 0.5 * ((p - n) * phi);
  theta /= params.c_p * p + params.c_n * n;
  if (!theta.all_finite()) throw NumericalBlowup("derived temperature is not finite");
  if (!(theta.min() > 0.0)) {
    throw PositivityViolation("theta", theta.min());
  }
  return theta;
}

double entropy_functional(const ScalarField& p, const ScalarField& n,
                          const ScalarField& e, const PhysParams& params) {
  if (!(p.min() > 0.0)) throw PositivityViolation("p", p.min());
  if (!(n.min() > 0.0)) throw PositivityViolation("n", n.min());
  const ScalarField log_theta = log_field(temperature_from_energy(p, n, e, params));
  ScalarField eta = p * (log_field(p) - params.c_p * log_theta);
  eta += n * (log_field(n) - params.c_n * log_theta);
  return -eta.integral();
}

ForceSet conservative_force_closed(const State& s, const PhysParams& params) {
  check_state(s);
  const ScalarField log_theta = log_field(s.theta);
  const ScalarField half_phi_over_theta = 0.5 * (s.phi / s.theta);
  const ScalarField nonlocal = kernel(0.5 * ((s.p - s.n) / s.theta));
  const ScalarField coupling = half_phi_over_theta + nonlocal;

  ScalarField mu_p = log_field(s.p) - params.c_p * log_theta + coupling;
  ScalarField mu_n = log_field(s.n) - params.c_n * log_theta - coupling;
  return ForceSet{-gradient(mu_p), -gradient(mu_n), gradient(1.0 / s.theta)};
}

VectorField eliminate_heat_flux(const State& s, const VectorField& j_p,
                                const VectorField& j_n, const VectorField& j_e,
                                const PhysParams& params) {
  const ScalarField phi_t = potential_rate(j_p, j_n);
  const ScalarField a_p = (params.c_p + 1.0) * s.theta + s.phi;
  const ScalarField a_n = (params.c_n + 1.0) * s.theta - s.phi;
  VectorField q = j_e - a_p * j_p - a_n * j_n;
  q.axpy(-0.5, phi_t * gradient(s.phi));
  q.axpy(0.5, s.phi * gradient(phi_t));
  return q;
}

namespace {

ScalarField dissipation_density(const State& s, const VectorField& j_p,
                                const VectorField& j_n, const VectorField& j_e,
                                const PhysParams& params) {
  check_state(s);
  const VectorField q = eliminate_heat_flux(s, j_p, j_n, j_e, params);
  ScalarField density = dot(j_p, j_p) / (params.D_p * (s.p * s.theta));
  density += dot(j_n, j_n) / (params.D_n * (s.n * s.theta));
  density += dot(q, q) / (params.k * (s.theta * s.theta));
  return density;
}

// Per-point scale of the dissipation integrand; the heat flux term uses the
// magnitudes of the flux terms that cancel when q is eliminated.
ScalarField dissipation_noise_density(const State& s, const VectorField& j_p,
                                      const VectorField& j_n, const VectorField& j_e,
                                      const PhysParams& params) {
  auto magnitude = [](const VectorField& v) {
    return dot(v, v).map([](double x) { return std::sqrt(x); });
  };
  const ScalarField a_p = (params.c_p + 1.0) * s.theta + s.phi;
  const ScalarField a_n = (params.c_n + 1.0) * s.theta - s.phi;
  const ScalarField jp = magnitude(j_p);
  const ScalarField jn = magnitude(j_n);
  const ScalarField q = magnitude(j_e) + abs_field(a_p) * jp + abs_field(a_n) * jn;
  ScalarField m = jp * jp / (params.D_p * (s.p * s.theta));
  m += jn * jn / (params.D_n * (s.n * s.theta));
  m += q * q / (params.k * (s.theta * s.theta));
  return m;
}

}  // namespace

double dissipation_functional(const State& s, const VectorField& j_p,
                              const VectorField& j_n, const VectorField& j_e,
                              const PhysParams& params) {
  return dissipation_density(s, j_p, j_n, j_e, params).integral();
}

ForceSet dissipative_force_closed(const State& s, const FluxSet& fl,
                                  const PhysParams& params) {
  check_state(s);
  const VectorField q = eliminate_heat_flux(s, fl.j_p, fl.j_n, fl.j_e, params);
  const VectorField w = q / (params.k * (s.theta * s.theta));
  const ScalarField h = dot(w, gradient(s.phi)) + divergence(s.phi * w);
  const VectorField half_grad_H = 0.5 * gradient(kernel(h));

  const ScalarField a_p = (params.c_p + 1.0) * s.theta + s.phi;
  const ScalarField a_n = (params.c_n + 1.0) * s.theta - s.phi;
  VectorField f_p = fl.j_p / (params.D_p * (s.p * s.theta)) - a_p * w - half_grad_H;
  VectorField f_n = fl.j_n / (params.D_n * (s.n * s.theta)) - a_n * w + half_grad_H;
  return ForceSet{std::move(f_p), std::move(f_n), w};
}

double force_balance_residual(const State& s, const PhysParams& params) {
  const ForceSet con = conservative_force_closed(s, params);
  const ForceSet dis = dissipative_force_closed(s, constitutive_fluxes(s, params), params);
  const double diff = std::max({max_abs_difference(con.f_p, dis.f_p),
                                max_abs_difference(con.f_n, dis.f_n),
                                max_abs_difference(con.f_e, dis.f_e)});
  const double scale =
      std::max({con.f_p.max_abs(), con.f_n.max_abs(), con.f_e.max_abs()});
  return scale > 0.0 ? diff / scale : diff;
}

FlowMapProbe random_probe(const GridPtr& grid, std::uint64_t seed,
                          std::uint64_t first_stream, int band, double amplitude) {
  const int dim = grid->dim();
  auto flow_map = [&](int m) {
    std::vector<ScalarField> comps;
    for (int a = 0; a < dim; ++a) {
      const std::uint64_t stream =
          first_stream + static_cast<std::uint64_t>(dim * m + a);
      ScalarField c = random_band_field(grid, seed, stream, band);
      const double peak = c.max_abs();
      if (peak > 0.0) c *= amplitude / peak;
      comps.push_back(std::move(c));
    }
    return VectorField(std::move(comps));
  };
  return FlowMapProbe{flow_map(0), flow_map(1), flow_map(2)};
}

double pairing(const ForceSet& f, const FlowMapProbe& probe) {
  return inner_product(f.f_p, probe.dJ_p) + inner_product(f.f_n, probe.dJ_n) +
         inner_product(f.f_e, probe.dJ_e);
}

ProbeReport check_conservative_probe(const State& s, const FlowMapProbe& probe,
                                     const PhysParams& params, double threshold) {
  ProbeReport r;
  r.kind = "conservative";
  r.closed_form = pairing(conservative_force_closed(s, params), probe);

  const Densities base{s.p, s.n, energy_density(s, params)};
  const Densities dir{-divergence(probe.dJ_p), -divergence(probe.dJ_n),
                      -divergence(probe.dJ_e)};
  for (double eps : probe.eps_scan) {
    const Densities plus = shifted(base, dir, eps);
    const Densities minus = shifted(base, dir, -eps);
    const double s_plus = entropy_functional(plus.p, plus.n, plus.e, params);
    const double s_minus = entropy_functional(minus.p, minus.n, minus.e, params);
    const double magnitude =
        std::max(entropy_noise_scale(plus, params), entropy_noise_scale(minus, params));
    ScanEntry e;
    e.eps = eps;
    e.finite_difference = (s_plus - s_minus) / (2.0 * eps);
    e.noise_floor =
        kNoiseUlps * std::numeric_limits<double>::epsilon() * magnitude / eps;
    r.scan.push_back(e);
  }
  finish_report(r, threshold);
  return r;
}

ProbeReport check_dissipative_probe(const State& s, const FlowMapProbe& probe,
                                    const PhysParams& params, double threshold) {
  ProbeReport r;
  r.kind = "dissipative";
  const FluxSet fl = constitutive_fluxes(s, params);
  r.closed_form = pairing(dissipative_force_closed(s, fl, params), probe);

  for (double eps : probe.eps_scan) {
    auto at = [&](double sign) {
      VectorField j_p = fl.j_p, j_n = fl.j_n, j_e = fl.j_e;
      j_p.axpy(sign * eps, probe.dJ_p);
      j_n.axpy(sign * eps, probe.dJ_n);
      j_e.axpy(sign * eps, probe.dJ_e);
      return std::pair{dissipation_functional(s, j_p, j_n, j_e, params),
                       root_sum_square(
                           dissipation_noise_density(s, j_p, j_n, j_e, params))};
    };
    const auto [d_plus, noise_plus] = at(1.0);
    const auto [d_minus, noise_minus] = at(-1.0);
    ScanEntry e;
    e.eps = eps;
    e.finite_difference = 0.5 * (d_plus - d_minus) / (2.0 * eps);
    e.noise_floor = kNoiseUlps * std::numeric_limits<double>::epsilon() *
                    std::max(noise_plus, noise_minus) / eps;
    r.scan.push_back(e);
  }
  finish_report(r, threshold);
  return r;
}

void validate(const VarcheckConfig& cfg, const GridSpec& grid) {
  if (cfg.probes < 1) throw ConfigError("varcheck.probes must be >= 1");
  if (cfg.band < 1 || 3 * cfg.band >= grid.points_per_axis) {
    throw ConfigError("varcheck.band must satisfy 1 <= band and 3 band < N");
  }
  if (!(cfg.probe_amplitude > 0.0) || !std::isfinite(cfg.probe_amplitude)) {
    throw ConfigError("varcheck.probe_amplitude must be positive");
  }
  if (cfg.eps_scan.empty()) throw ConfigError("varcheck.eps_scan must not be empty");
  for (std::size_t i = 0; i < cfg.eps_scan.size(); ++i) {
    if (!(cfg.eps_scan[i] > 0.0) ||
        (i > 0 && !(cfg.eps_scan[i] < cfg.eps_scan[i - 1]))) {
      throw ConfigError("varcheck.eps_scan must be positive and strictly decreasing");
    }
  }
  if (!(cfg.threshold >= 0.0) || !(cfg.balance_threshold >= 0.0)) {
    throw ConfigError("varcheck thresholds must be nonnegative");
  }
}

nlohmann::json VarcheckReport::to_json() const {
  nlohmann::json con = nlohmann::json::array();
  nlohmann::json dis = nlohmann::json::array();
  for (const auto& r : conservative) con.push_back(probe_json(r));
  for (const auto& r : dissipative) dis.push_back(probe_json(r));
  return nlohmann::json{{"conservative", con},
                        {"dissipative", dis},
                        {"force_balance", {{"residual", force_balance},
                                           {"pass", balance_pass}}},
                        {"pass", pass}};
}

VarcheckReport run_varcheck(const State& s, const PhysParams& params,
                            const VarcheckConfig& cfg) {
  validate(params);
  const GridPtr& grid = s.grid();
  validate(cfg, grid->spec());
  VarcheckReport report;
  bool all = true;
  for (int i = 0; i < cfg.probes; ++i) {
    FlowMapProbe probe = random_probe(grid, cfg.seed,
                                      static_cast<std::uint64_t>(i) * 16u, cfg.band,
                                      cfg.probe_amplitude);
    probe.eps_scan = cfg.eps_scan;
    ProbeReport con = check_conservative_probe(s, probe, params, cfg.threshold);
    ProbeReport dis = check_dissipative_probe(s, probe, params, cfg.threshold);
    con.index = dis.index = i;
    all = all && con.pass && dis.pass;
    report.conservative.push_back(std::move(con));
    report.dissipative.push_back(std::move(dis));
  }
  report.force_balance = force_balance_residual(s, params);
  report.balance_pass = report.force_balance <= cfg.balance_threshold;
  report.pass = all && report.balance_pass;
  return report;
}

}  // namespace pnpf
