#include "pnpf/thermo_audit.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <limits>

#include "pnpf/decay.hpp"
#include "pnpf/dynamics.hpp"
#include "pnpf/errors.hpp"

namespace pnpf {
namespace {

// Derivative at t[at] of the quadratic through samples i, i+1, i+2.
double three_point(const std::vector<double>& t, const std::vector<double>& y,
                   std::size_t i, std::size_t at) {
  const double x0 = t[i], x1 = t[i + 1], x2 = t[i + 2], x = t[at];
  return y[i] * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
         y[i + 1] * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
         y[i + 2] * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
}

double relative_to(double defect, double scale) {
  return scale > 0.0 ? defect / scale : defect;
}

std::vector<double> column(const std::vector<TrajectorySample>& traj,
                           const PhysParams& params, double Totals::*member) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& sample : traj) out.push_back(totals(sample.state, params).*member);
  return out;
}

}  // namespace

Totals totals(const State& s, const PhysParams& params) {
  const FluxSet fl = constitutive_fluxes(s, params);
  return Totals{s.n.integral(), s.p.integral(), energy_density(s, params).integral(),
                entropy_density(s, params).integral(),
                entropy_production_density(fl, s, params).integral()};
}

std::vector<double> sampled_derivative(const std::vector<double>& t,
                                       const std::vector<double>& y) {
  if (t.size() < 3 || t.size() != y.size()) {
    throw Error("sampled derivative needs at least 3 samples of equal length");
  }
  const std::size_t n = t.size();
  std::vector<double> d(n);
  d[0] = three_point(t, y, 0, 0);
  for (std::size_t j = 1; j + 1 < n; ++j) d[j] = three_point(t, y, j - 1, j);
  d[n - 1] = three_point(t, y, n - 3, n - 1);
  return d;
}

std::vector<double> clausius_duhem_residual(const std::vector<double>& t,
                                            const std::vector<double>& S,
                                            const std::vector<double>& Delta) {
  const std::vector<double> dsdt = sampled_derivative(t, S);
  double scale = std::numeric_limits<double>::epsilon();
  for (double d : Delta) scale = std::max(scale, std::abs(d));
  std::vector<double> r(t.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = (dsdt[j] - Delta[j]) / scale;
  return r;
}

std::vector<double> clausius_duhem_residual(const std::vector<TrajectorySample>& traj,
                                            const PhysParams& params) {
  std::vector<double> t;
  for (const auto& sample : traj) t.push_back(sample.t);
  std::vector<double> S, Delta;
  for (const auto& sample : traj) {
    const Totals tot = totals(sample.state, params);
    S.push_back(tot.S);
    Delta.push_back(tot.Delta);
  }
  return clausius_duhem_residual(t, S, Delta);
}

std::vector<double> energy_conservation_residual(const std::vector<double>& E) {
  std::vector<double> r;
  r.reserve(E.size());
  for (double e : E) r.push_back(E.empty() ? 0.0 : std::abs(e - E.front()) / std::abs(E.front()));
  return r;
}

std::vector<double> energy_conservation_residual(
    const std::vector<TrajectorySample>& traj, const PhysParams& params) {
  return energy_conservation_residual(column(traj, params, &Totals::E));
}

double onsager_residual(const State& s, const OnsagerBlock& b, const PhysParams& params) {
  const double sym_p = relative_to((b.L_ptheta - b.L_thetap).max_abs(), b.L_ptheta.max_abs());
  const double sym_n = relative_to((b.L_ntheta - b.L_thetan).max_abs(), b.L_ntheta.max_abs());
  const double cross = relative_to(b.L_pn.max_abs() + b.L_np.max_abs(),
                                   std::max(b.L_pp.max_abs(), b.L_nn.max_abs()));
  const double recon = flux_reconstruction_residual(s, b, params);
  return std::max({sym_p, sym_n, cross, recon});
}

double onsager_residual(const State& s, const PhysParams& params) {
  return onsager_residual(s, onsager_block(s, params), params);
}

AuditRecord audit_state(long step, double t, const State& s, const PhysParams& params) {
  const Totals tot = totals(s, params);
  AuditRecord r;
  r.step = step;
  r.t = t;
  r.mass_n = tot.mass_n;
  r.mass_p = tot.mass_p;
  r.E = tot.E;
  r.S = tot.S;
  r.Delta = tot.Delta;
  r.onsager_residual = onsager_residual(s, params);
  r.lyapunov = lyapunov(convert(s), params);
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& AuditWriter::columns() {
  static const std::vector<std::string> names{
      "step", "t", "mass_n", "mass_p", "E", "S", "Delta", "dSdt_minus_Delta",
      "energy_drift_rel", "onsager_residual", "lyapunov"};
  return names;
}

AuditWriter::AuditWriter(const std::filesystem::path& path)
    : file_(std::fopen(path.c_str(), "w")) {
  if (file_ == nullptr) {
    throw Error("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::string header;
  for (const auto& c : columns()) header += (header.empty() ? "" : ",") + c;
  std::fprintf(file_, "%s\n", header.c_str());
  std::fflush(file_);
}

AuditWriter::~AuditWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void AuditWriter::add(AuditRecord record) {
  const double e0 = records_.empty() ? record.E : records_.front().E;
  record.energy_drift_rel = std::abs(record.E - e0) / std::abs(e0);
  records_.push_back(record);
  const std::size_t n = records_.size();
  if (n < 3) return;
  std::vector<double> t, S;
  for (std::size_t i = n - 3; i < n; ++i) {
    t.push_back(records_[i].t);
    S.push_back(records_[i].S);
  }
  while (written_ + 1 < n) {
    // Rows before the newest one; the first row uses a one-sided stencil.
    const std::size_t at = written_ - (n - 3);
    write_row(written_, three_point(t, S, 0, at));
  }
}

void AuditWriter::finish() {
  const std::size_t n = records_.size();
  while (written_ < n) {
    double dsdt = std::numeric_limits<double>::quiet_NaN();
    if (n == 2) {
      dsdt = (records_[1].S - records_[0].S) / (records_[1].t - records_[0].t);
    } else if (n >= 3) {
      std::vector<double> t, S;
      for (std::size_t i = n - 3; i < n; ++i) {
        t.push_back(records_[i].t);
        S.push_back(records_[i].S);
      }
      dsdt = three_point(t, S, 0, written_ - (n - 3));
    }
    write_row(written_, dsdt);
  }
}

void AuditWriter::write_row(std::size_t index, double dsdt) {
  AuditRecord& r = records_[index];
  r.dSdt_minus_Delta = dsdt - r.Delta;
  const double values[] = {r.t, r.mass_n, r.mass_p, r.E, r.S, r.Delta,
                           r.dSdt_minus_Delta, r.energy_drift_rel,
                           r.onsager_residual, r.lyapunov};
  std::string line = std::to_string(r.step);
  for (double v : values) line += "," + format_double(v);
  std::fprintf(file_, "%s\n", line.c_str());
  std::fflush(file_);
  ++written_;
}

}  // namespace pnpf
