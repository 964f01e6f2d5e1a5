#include "pnpf/config.hpp"

#include <array>
#include <cstdlib>
#include <exception>
#include <limits>
#include <fstream>
#include <set>

#include "pnpf/errors.hpp"

namespace pnpf {
namespace {

using nlohmann::json;

// Typed view of one JSON object that remembers which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown key " + where(key));
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  Section child(const std::string& key) { return Section(j_.at(key), where(key)); }

  void read(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    out = v.get<double>();
  }

  void read(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ConfigError(where(key) + " is out of range");
    }
    out = static_cast<int>(x);
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(where(key) + " must be a nonnegative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void read(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be a boolean");
    out = v.get<bool>();
  }

  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    out = v.get<std::string>();
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(x.get<double>());
    }
  }

  template <class Enum, std::size_t M>
  void read_enum(const std::string& key, Enum& out,
                 const std::array<std::pair<std::string_view, Enum>, M>& names) {
    std::string text;
    if (!has(key)) return;
    read(key, text);
    for (const auto& [name, value] : names) {
      if (text == name) {
        out = value;
        return;
      }
    }
    std::string allowed;
    for (const auto& [name, value] : names) {
      allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw ConfigError(where(key) + " must be one of " + allowed);
  }

 private:
  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr std::array<std::pair<std::string_view, Scheme>, 2> kSchemes{
    {{"rk4", Scheme::RK4}, {"imex1", Scheme::IMEX1}}};
constexpr std::array<std::pair<std::string_view, InitialCondition::Kind>, 3> kKinds{
    {{"equilibrium", InitialCondition::Kind::Equilibrium},
     {"single_mode", InitialCondition::Kind::SingleMode},
     {"random_band", InitialCondition::Kind::RandomBand}}};
constexpr std::array<std::pair<std::string_view, ModeProfile>, 2> kProfiles{
    {{"single_mode", ModeProfile::SingleMode}, {"random_band", ModeProfile::RandomBand}}};

template <class Enum, std::size_t M>
std::string_view name_of(Enum e, const std::array<std::pair<std::string_view, Enum>, M>& names) {
  for (const auto& [name, value] : names) {
    if (value == e) return name;
  }
  return "?";
}

template <class Enum, std::size_t M>
json names_of(const std::array<std::pair<std::string_view, Enum>, M>& names) {
  json out = json::array();
  for (const auto& entry : names) out.push_back(std::string(entry.first));
  return out;
}

void read_stepper(Section sec, StepperConfig& s) {
  sec.read_enum("scheme", s.scheme, kSchemes);
  sec.read("dt", s.dt);
  sec.read("t_end", s.t_end);
  sec.read("dealias", s.dealias);
  sec.read("positivity_floor", s.positivity_floor);
}

json stepper_json(const StepperConfig& s) {
  return {{"scheme", std::string(scheme_name(s.scheme))},
          {"dt", s.dt},
          {"t_end", s.t_end},
          {"dealias", s.dealias},
          {"positivity_floor", s.positivity_floor}};
}

// Schema fragment inferred from a default value.
json schema_of(const json& value, const std::string& key) {
  if (value.is_object()) {
    json props = json::object();
    for (const auto& [k, v] : value.items()) props[k] = schema_of(v, k);
    return {{"type", "object"}, {"additionalProperties", false}, {"properties", props}};
  }
  json s;
  if (value.is_boolean()) {
    s["type"] = "boolean";
  } else if (value.is_number_integer()) {
    s["type"] = "integer";
    if (value.is_number_unsigned()) s["minimum"] = 0;
  } else if (value.is_number()) {
    s["type"] = "number";
  } else if (value.is_string()) {
    s["type"] = "string";
  } else if (value.is_array()) {
    s["type"] = "array";
    s["items"] = {{"type", "number"}};
  }
  if (key == "scheme") s["enum"] = names_of(kSchemes);
  if (key == "kind") s["enum"] = names_of(kKinds);
  if (key == "mode_profile") s["enum"] = names_of(kProfiles);
  if (key == "field") s["enum"] = {"n", "p", "theta", "u", "v"};
  s["default"] = value;
  return s;
}

}  // namespace

std::string_view scheme_name(Scheme s) noexcept { return name_of(s, kSchemes); }
std::string_view kind_name(InitialCondition::Kind k) noexcept { return name_of(k, kKinds); }
std::string_view profile_name(ModeProfile p) noexcept { return name_of(p, kProfiles); }

RunConfig default_config() { return RunConfig{}; }

RunConfig merge_config(RunConfig cfg, const json& j) {
  Section root(j, "");
  if (root.has("grid")) {
    Section g = root.child("grid");
    g.read("dim", cfg.grid.dim);
    g.read("points_per_axis", cfg.grid.points_per_axis);
    g.read("box_length", cfg.grid.box_length);
  }
  if (root.has("params")) {
    Section p = root.child("params");
    p.read("c_p", cfg.params.c_p);
    p.read("c_n", cfg.params.c_n);
    p.read("D_p", cfg.params.D_p);
    p.read("D_n", cfg.params.D_n);
    p.read("k", cfg.params.k);
    p.read("eps", cfg.params.eps);
  }
  if (root.has("stepper")) read_stepper(root.child("stepper"), cfg.stepper);
  if (root.has("initial_condition")) {
    Section ic = root.child("initial_condition");
    auto& out = cfg.initial_condition;
    ic.read_enum("kind", out.kind, kKinds);
    if (ic.has("background")) {
      Section b = ic.child("background");
      b.read("n", out.background.n);
      b.read("p", out.background.p);
      b.read("theta", out.background.theta);
    }
    if (ic.has("single_mode")) {
      Section s = ic.child("single_mode");
      s.read("field", out.single_mode.field);
      s.read("axis", out.single_mode.axis);
      s.read("amplitude", out.single_mode.amplitude);
      s.read("mode", out.single_mode.mode);
    }
    if (ic.has("random_band")) {
      Section r = ic.child("random_band");
      r.read("seed", out.random_band.seed);
      r.read("amplitude", out.random_band.amplitude);
      r.read("band", out.random_band.band);
    }
  }
  root.read("outputs", cfg.outputs);
  root.read("audit_every", cfg.audit_every);
  root.read("checkpoint_every", cfg.checkpoint_every);
  if (root.has("varcheck")) {
    Section v = root.child("varcheck");
    v.read("probes", cfg.varcheck.probes);
    v.read("seed", cfg.varcheck.seed);
    v.read("band", cfg.varcheck.band);
    v.read("probe_amplitude", cfg.varcheck.probe_amplitude);
    v.read("eps_scan", cfg.varcheck.eps_scan);
    v.read("threshold", cfg.varcheck.threshold);
    v.read("balance_threshold", cfg.varcheck.balance_threshold);
  }
  if (root.has("decay")) {
    Section d = root.child("decay");
    auto& e = cfg.decay.experiment;
    d.read("delta0", e.delta0);
    d.read("seed", e.seed);
    d.read_enum("mode_profile", e.mode_profile, kProfiles);
    d.read("band", e.band);
    d.read("sample_every", e.sample_every);
    d.read("compare_half", cfg.decay.compare_half);
    if (d.has("stepper")) read_stepper(d.child("stepper"), e.cfg);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return merge_config(default_config(), j);
}

RunConfig apply_overrides(RunConfig cfg, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + a + "' must look like key.path=value");
    }
    json value;
    const std::string text = a.substr(eq + 1);
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json patch = value;
    std::string path = a.substr(0, eq);
    while (!path.empty()) {
      const auto dot = path.rfind('.');
      const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
      if (key.empty()) throw ConfigError("override '" + a + "' has an empty key");
      patch = json{{key, patch}};
      path = dot == std::string::npos ? "" : path.substr(0, dot);
    }
    cfg = merge_config(std::move(cfg), patch);
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  const auto& ic = cfg.initial_condition;
  const auto& v = cfg.varcheck;
  const auto& e = cfg.decay.experiment;
  return {
      {"grid",
       {{"dim", cfg.grid.dim},
        {"points_per_axis", cfg.grid.points_per_axis},
        {"box_length", cfg.grid.box_length}}},
      {"params",
       {{"c_p", cfg.params.c_p},
        {"c_n", cfg.params.c_n},
        {"D_p", cfg.params.D_p},
        {"D_n", cfg.params.D_n},
        {"k", cfg.params.k},
        {"eps", cfg.params.eps}}},
      {"stepper", stepper_json(cfg.stepper)},
      {"initial_condition",
       {{"kind", std::string(kind_name(ic.kind))},
        {"background",
         {{"n", ic.background.n}, {"p", ic.background.p}, {"theta", ic.background.theta}}},
        {"single_mode",
         {{"field", ic.single_mode.field},
          {"axis", ic.single_mode.axis},
          {"amplitude", ic.single_mode.amplitude},
          {"mode", ic.single_mode.mode}}},
        {"random_band",
         {{"seed", ic.random_band.seed},
          {"amplitude", ic.random_band.amplitude},
          {"band", ic.random_band.band}}}}},
      {"outputs", cfg.outputs},
      {"audit_every", cfg.audit_every},
      {"checkpoint_every", cfg.checkpoint_every},
      {"varcheck",
       {{"probes", v.probes},
        {"seed", v.seed},
        {"band", v.band},
        {"probe_amplitude", v.probe_amplitude},
        {"eps_scan", v.eps_scan},
        {"threshold", v.threshold},
        {"balance_threshold", v.balance_threshold}}},
      {"decay",
       {{"delta0", e.delta0},
        {"seed", e.seed},
        {"mode_profile", std::string(profile_name(e.mode_profile))},
        {"band", e.band},
        {"sample_every", e.sample_every},
        {"compare_half", cfg.decay.compare_half},
        {"stepper", stepper_json(e.cfg)}}},
  };
}

json config_schema() {
  json s = schema_of(to_json(default_config()), "");
  s["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  s["title"] = "pnpf run configuration";
  return s;
}

void validate(const RunConfig& cfg) {
  validate(cfg.grid);
  validate(cfg.params);
  validate(cfg.stepper);
  validate(cfg.initial_condition, cfg.grid);
  if (cfg.audit_every < 1) throw ConfigError("audit_every must be >= 1");
  if (cfg.checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

std::filesystem::path output_directory(const RunConfig& cfg) {
  if (!cfg.outputs.empty()) return cfg.outputs;
  if (const char* env = std::getenv("PNPF_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "pnpf-out";
}

}  // namespace pnpf
