#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnpf/aligned.hpp"
#include "pnpf/cli.hpp"
#include "pnpf/config.hpp"
#include "pnpf/errors.hpp"
#include "pnpf/simd.hpp"

namespace {

struct CommonOptions {
  std::string config_file;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-c,--config", opts.config_file, "JSON configuration file")
      ->check(CLI::ExistingFile);
  sub->add_option("-o,--out", opts.out, "output directory (default: $PNPF_OUT or pnpf-out)");
  sub->add_option("-s,--set", opts.overrides,
                  "override a config value, e.g. --set stepper.dt=5e-4 (repeatable)");
}

pnpf::RunConfig resolve(const CommonOptions& opts) {
  pnpf::RunConfig cfg = opts.config_file.empty() ? pnpf::default_config()
                                                 : pnpf::load_config(opts.config_file);
  cfg = pnpf::apply_overrides(std::move(cfg), opts.overrides);
  if (!opts.out.empty()) cfg.outputs = opts.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  pnpf::retain_freed_buffers();
  CLI::App app{"Non-isothermal Poisson-Nernst-Planck-Fourier simulator and audits"};
  app.require_subcommand(1);
  std::string simd;
  app.add_option("--simd", simd, "kernel set: scalar, avx2, neon (default: best available)");

  CommonOptions run_opts, varcheck_opts, decay_opts;
  CLI::App* run = app.add_subcommand("run", "integrate and write audit.csv and snapshots");
  add_common(run, run_opts);
  CLI::App* varcheck = app.add_subcommand("varcheck", "check the variational force identities");
  add_common(varcheck, varcheck_opts);
  CLI::App* decay = app.add_subcommand("decay", "small-perturbation Lyapunov decay experiment");
  add_common(decay, decay_opts);

  std::string run_dir;
  CLI::App* plotdata = app.add_subcommand("plotdata", "reshape run CSVs into long format");
  plotdata->add_option("run_dir", run_dir, "directory holding audit.csv or decay.csv")
      ->required();

  bool schema = false;
  CLI::App* defaults = app.add_subcommand("defaults", "print the default configuration");
  defaults->add_flag("--schema", schema, "print the JSON schema instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pnpf::cli::kConfigError;
  }

  using pnpf::cli::guarded;
  return guarded(
      [&]() -> int {
        if (!simd.empty() && !pnpf::simd::select_kernels(simd)) {
          throw pnpf::ConfigError("kernel set '" + simd + "' is not available");
        }
        if (*run) return pnpf::cli::cmd_run(resolve(run_opts), std::cerr);
        if (*varcheck) return pnpf::cli::cmd_varcheck(resolve(varcheck_opts), std::cerr);
        if (*decay) return pnpf::cli::cmd_decay(resolve(decay_opts), std::cerr);
        if (*plotdata) return pnpf::cli::cmd_plotdata(run_dir, std::cerr);
        const auto j = schema ? pnpf::config_schema() : pnpf::to_json(pnpf::default_config());
        std::cout << j.dump(2) << '\n';
        return pnpf::cli::kOk;
      },
      std::cerr);
}
