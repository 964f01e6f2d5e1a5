#pragma once

// Command implementations behind the pnpf executable.
//
// Output layout under the output directory:
//   run       audit.csv, config.json, final.bin (+ .json), checkpoints/step-*.bin
//   varcheck  varcheck-report.json
//   decay     decay.csv, decay-half.csv (when compare_half), decay-summary.json
//   plotdata  <name>-long.csv for every audit.csv / decay*.csv in the directory

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnpf/config.hpp"

namespace pnpf::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeAbort = 3 };

/// Runs `command`, mapping ConfigError to kConfigError and any other
/// exception to kRuntimeAbort after printing it to `err`.
int guarded(const std::function<int()>& command, std::ostream& err);

int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_varcheck(const RunConfig& cfg, std::ostream& log);
int cmd_decay(const RunConfig& cfg, std::ostream& log);
/// Throws ConfigError when the directory holds no audit or decay CSV.
int cmd_plotdata(const std::filesystem::path& run_dir, std::ostream& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Wide table to (series, <key>, value) rows: one row per cell outside the
/// key column, row by row. Values are copied verbatim.
CsvTable tidy(const CsvTable& wide, const std::string& key = "t");
/// Inverse of tidy: key column first, then series in order of appearance.
CsvTable pivot(const CsvTable& long_table);

}  // namespace pnpf::cli
