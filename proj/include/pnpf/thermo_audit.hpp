#pragma once

// Conservation, entropy and Onsager audits of a trajectory.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pnpf/fields.hpp"

namespace pnpf {

struct Totals {
  double mass_n = 0.0;
  double mass_p = 0.0;
  double E = 0.0;
  double S = 0.0;
  double Delta = 0.0;
};

/// Cell-sum quadratures of n, p, e, eta and the entropy production density.
Totals totals(const State& s, const PhysParams& params);

struct TrajectorySample {
  double t = 0.0;
  State state;
};

/// Three-point derivative estimates of y(t) at every sample: centered in the
/// interior, one-sided second order at both ends (Lagrange weights, so
/// nonuniform spacing is allowed). Throws Error for fewer than 3 samples.
std::vector<double> sampled_derivative(const std::vector<double>& t,
                                       const std::vector<double>& y);

/// (dS/dt - Delta) / max(max|Delta|, machine epsilon) per sample.
std::vector<double> clausius_duhem_residual(const std::vector<double>& t,
                                            const std::vector<double>& S,
                                            const std::vector<double>& Delta);
std::vector<double> clausius_duhem_residual(const std::vector<TrajectorySample>& traj,
                                            const PhysParams& params);

/// |E(t) - E(0)| / |E(0)| per sample.
std::vector<double> energy_conservation_residual(const std::vector<double>& E);
std::vector<double> energy_conservation_residual(
    const std::vector<TrajectorySample>& traj, const PhysParams& params);

/// Largest of the relative L-symmetry defects, the relative size of L_pn and
/// L_np, and the flux reconstruction residual.
double onsager_residual(const State& s, const PhysParams& params);
double onsager_residual(const State& s, const OnsagerBlock& block,
                        const PhysParams& params);

struct AuditRecord {
  long step = 0;
  double t = 0.0;
  double mass_n = 0.0;
  double mass_p = 0.0;
  double E = 0.0;
  double S = 0.0;
  double Delta = 0.0;
  double dSdt_minus_Delta = 0.0;
  double energy_drift_rel = 0.0;
  double onsager_residual = 0.0;
  double lyapunov = 0.0;
};

/// Everything in the record except the dS/dt column, which needs neighbours.
AuditRecord audit_state(long step, double t, const State& s, const PhysParams& params);

/// Streams AuditRecords to CSV. A row is written once its right neighbour is
/// known (so dS/dt can be centered); finish() writes the last pending row.
/// Every written row is flushed immediately.
class AuditWriter {
 public:
  static const std::vector<std::string>& columns();

  explicit AuditWriter(const std::filesystem::path& path);
  AuditWriter(const AuditWriter&) = delete;
  AuditWriter& operator=(const AuditWriter&) = delete;
  ~AuditWriter();

  /// Adds a sample; energy_drift_rel is filled in relative to the first one.
  void add(AuditRecord record);
  /// Writes pending rows. With a single sample its dS/dt column is NaN.
  void finish();
  const std::vector<AuditRecord>& records() const noexcept { return records_; }

 private:
  void write_row(std::size_t index, double dsdt);
  std::FILE* file_ = nullptr;
  std::vector<AuditRecord> records_;
  std::size_t written_ = 0;
};

/// Formats a double with 17 significant digits ("nan"/"inf" for non-finite).
std::string format_double(double x);

}  // namespace pnpf
