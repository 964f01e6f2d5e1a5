#include "pnpf/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "pnpf/errors.hpp"
#include "pnpf/snapshot.hpp"
#include "pnpf/thermo_audit.hpp"

namespace pnpf::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path prepare_output(const RunConfig& cfg) {
  const fs::path dir = output_directory(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

long step_count(const StepperConfig& s) {
  return static_cast<long>(std::ceil(s.t_end / s.dt - 1e-9));
}

std::vector<NamedField> state_fields(const State& s) {
  return {{"n", s.n}, {"p", s.p}, {"theta", s.theta}, {"phi", s.phi}};
}

json snapshot_metadata(const RunConfig& cfg, long step, double t) {
  const json c = to_json(cfg);
  return {{"t", t}, {"step", step}, {"params", c["params"]}, {"config", c}};
}

json null_if_nan(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

void write_decay_csv(const fs::path& path, const DecaySeries& s) {
  CsvTable table;
  table.header = {"t", "lyapunov", "v_l2", "grad_phi_l2", "u_l2",
                  "u_h2", "theta_h2", "d1", "d2", "d3"};
  const std::vector<const std::vector<double>*> cols{
      &s.t, &s.lyapunov, &s.v_l2, &s.grad_phi_l2, &s.u_l2,
      &s.u_h2, &s.theta_h2, &s.d1, &s.d2, &s.d3};
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    std::vector<std::string> row;
    for (const auto* c : cols) row.push_back(format_double((*c)[i]));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

json series_summary(const DecayExperiment& exp, const DecaySeries& s) {
  const FittedRates& r = s.rates;
  return {{"delta0", exp.delta0},
          {"samples", s.t.size()},
          {"outside_smallness_regime", s.outside_smallness},
          {"truncated", s.truncated},
          {"failure", s.failure},
          {"monotonicity", s.monotone ? "pass" : "fail"},
          {"terminal_lyapunov", s.lyapunov.empty() ? json(nullptr) : json(s.lyapunov.back())},
          {"fitted_rates",
           {{"lyapunov", null_if_nan(r.lyapunov)},
            {"v_l2", null_if_nan(r.v_l2)},
            {"grad_phi_l2", null_if_nan(r.grad_phi_l2)},
            {"u_l2", null_if_nan(r.u_l2)},
            {"u_h2", null_if_nan(r.u_h2)},
            {"theta_h2", null_if_nan(r.theta_h2)}}},
          {"rate_ordering",
           {{"v_faster_than_u", r.v_l2 > r.u_l2},
            {"grad_phi_faster_than_u", r.grad_phi_l2 > r.u_l2}}}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NonNeutralSource& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "aborted: " << e.what() << '\n';
    return kRuntimeAbort;
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const GridPtr grid = Grid::create(cfg.grid);
  State s = build_initial_state(grid, cfg.initial_condition, cfg.stepper.positivity_floor);
  const fs::path dir = prepare_output(cfg);
  write_json(dir / "config.json", to_json(cfg));
  if (cfg.checkpoint_every > 0) fs::create_directories(dir / "checkpoints");

  const long steps = step_count(cfg.stepper);
  AuditWriter audit(dir / "audit.csv");
  audit.add(audit_state(0, 0.0, s, cfg.params));
  try {
    for (long k = 1; k <= steps; ++k) {
      s = step(s, cfg.stepper, cfg.params);
      const double t = static_cast<double>(k) * cfg.stepper.dt;
      if (k % cfg.audit_every == 0 || k == steps) audit.add(audit_state(k, t, s, cfg.params));
      if (cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0) {
        char name[32];
        std::snprintf(name, sizeof name, "step-%08ld.bin", k);
        write_snapshot(dir / "checkpoints" / name, state_fields(s),
                       snapshot_metadata(cfg, k, t));
      }
    }
  } catch (...) {
    audit.finish();
    throw;
  }
  audit.finish();
  write_snapshot(dir / "final.bin", state_fields(s),
                 snapshot_metadata(cfg, steps, static_cast<double>(steps) * cfg.stepper.dt));
  log << "run: " << steps << " steps, artifacts in " << dir.string() << '\n';
  return kOk;
}

int cmd_varcheck(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const GridPtr grid = Grid::create(cfg.grid);
  const State s =
      build_initial_state(grid, cfg.initial_condition, cfg.stepper.positivity_floor);
  const VarcheckReport report = run_varcheck(s, cfg.params, cfg.varcheck);
  const fs::path dir = prepare_output(cfg);
  json j = report.to_json();
  j["config"] = to_json(cfg);
  write_json(dir / "varcheck-report.json", j);
  log << "varcheck: " << (report.pass ? "pass" : "FAIL") << ", force balance residual "
      << report.force_balance << '\n';
  return report.pass ? kOk : kCheckFailed;
}

int cmd_decay(const RunConfig& cfg, std::ostream& log) {
  validate(cfg.grid);
  validate(cfg.params);
  const DecayExperiment& exp = cfg.decay.experiment;
  validate(exp, cfg.params);
  const GridPtr grid = Grid::create(cfg.grid);
  const fs::path dir = prepare_output(cfg);

  const DecaySeries full = run_decay(grid, exp, cfg.params);
  write_decay_csv(dir / "decay.csv", full);
  json summary = series_summary(exp, full);
  summary["scaling"] = nullptr;
  bool truncated = full.truncated;
  if (cfg.decay.compare_half && exp.delta0 > 0.0) {
    DecayExperiment half = exp;
    half.delta0 = 0.5 * exp.delta0;
    const DecaySeries hs = run_decay(grid, half, cfg.params);
    write_decay_csv(dir / "decay-half.csv", hs);
    const ScalingVerdict v = scaling_verdict(full, hs);
    summary["half"] = series_summary(half, hs);
    summary["scaling"] = {{"ratio", null_if_nan(v.ratio)},
                          {"expected", 4.0},
                          {"tolerance", 0.8},
                          {"verdict", v.pass ? "pass" : "fail"}};
    truncated = truncated || hs.truncated;
  }
  summary["config"] = to_json(cfg)["decay"];
  write_json(dir / "decay-summary.json", summary);
  log << "decay: monotonicity " << (full.monotone ? "pass" : "fail")
      << (full.outside_smallness ? " (outside smallness regime)" : "") << '\n';
  if (truncated) {
    log << "decay: series truncated: " << full.failure << '\n';
    return kRuntimeAbort;
  }
  return kOk;
}

int cmd_plotdata(const fs::path& run_dir, std::ostream& log) {
  if (!fs::is_directory(run_dir)) {
    throw ConfigError("run directory " + run_dir.string() + " does not exist");
  }
  int converted = 0;
  for (const char* stem : {"audit", "decay", "decay-half"}) {
    const fs::path wide = run_dir / (std::string(stem) + ".csv");
    if (!fs::exists(wide)) continue;
    const fs::path out = run_dir / (std::string(stem) + "-long.csv");
    write_csv(out, tidy(read_csv(wide)));
    log << "plotdata: " << out.string() << '\n';
    ++converted;
  }
  if (converted == 0) {
    throw ConfigError("no audit.csv or decay.csv in " + run_dir.string());
  }
  return kOk;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error("CSV has no column " + name);
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + " is empty");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_csv_line(line);
    if (row.size() != t.header.size()) {
      throw Error(path.string() + ": row width does not match header");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream out(path);
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  if (!out) throw Error("cannot write " + path.string());
}

CsvTable tidy(const CsvTable& wide, const std::string& key) {
  const std::size_t k = wide.column(key);
  CsvTable out;
  out.header = {"series", key, "value"};
  for (const auto& row : wide.rows) {
    for (std::size_t c = 0; c < wide.header.size(); ++c) {
      if (c != k) out.rows.push_back({wide.header[c], row[k], row[c]});
    }
  }
  return out;
}

CsvTable pivot(const CsvTable& long_table) {
  if (long_table.header.size() != 3 || long_table.header[0] != "series" ||
      long_table.header[2] != "value") {
    throw Error("pivot expects columns series,<key>,value");
  }
  std::vector<std::string> series;
  std::map<std::string, std::size_t> series_index;
  std::vector<std::string> keys;
  std::map<std::string, std::size_t> key_index;
  for (const auto& row : long_table.rows) {
    if (series_index.emplace(row[0], series.size()).second) series.push_back(row[0]);
    if (key_index.emplace(row[1], keys.size()).second) keys.push_back(row[1]);
  }
  CsvTable out;
  out.header.push_back(long_table.header[1]);
  out.header.insert(out.header.end(), series.begin(), series.end());
  out.rows.assign(keys.size(), std::vector<std::string>(out.header.size()));
  for (std::size_t i = 0; i < keys.size(); ++i) out.rows[i][0] = keys[i];
  for (const auto& row : long_table.rows) {
    out.rows[key_index[row[1]]][1 + series_index[row[0]]] = row[2];
  }
  return out;
}

}  // namespace pnpf::cli
