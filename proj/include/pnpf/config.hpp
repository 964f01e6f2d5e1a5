#pragma once

// Run configuration: JSON file merged over defaults, then validated.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pnpf/decay.hpp"
#include "pnpf/dynamics.hpp"
#include "pnpf/fields.hpp"
#include "pnpf/grid.hpp"
#include "pnpf/initial.hpp"
#include "pnpf/varcheck.hpp"

namespace pnpf {

struct DecayConfig {
  DecayExperiment experiment;
  /// Also run delta0 / 2 and report the terminal-Lambda scaling verdict.
  bool compare_half = true;
};

struct RunConfig {
  GridSpec grid;
  PhysParams params;
  StepperConfig stepper;
  InitialCondition initial_condition;
  /// Output directory; empty means $PNPF_OUT, then "pnpf-out".
  std::string outputs;
  int audit_every = 10;
  /// Steps between checkpoints; 0 disables them.
  int checkpoint_every = 0;
  VarcheckConfig varcheck;
  DecayConfig decay;
};

RunConfig default_config();

/// Overlays `j` on `base`. Unknown keys and mistyped values throw ConfigError
/// naming the offending path.
RunConfig merge_config(RunConfig base, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "a.b.c=value" overrides; value is parsed as JSON, falling back
/// to a plain string.
RunConfig apply_overrides(RunConfig cfg, const std::vector<std::string>& assignments);

nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json config_schema();

void validate(const RunConfig& cfg);

std::filesystem::path output_directory(const RunConfig& cfg);

std::string_view scheme_name(Scheme s) noexcept;
std::string_view kind_name(InitialCondition::Kind k) noexcept;
std::string_view profile_name(ModeProfile p) noexcept;

}  // namespace pnpf
