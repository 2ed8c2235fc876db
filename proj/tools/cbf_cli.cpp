// Command-line front end: run, verify, convergence and the canned taylor-green run.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cbf/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool extended = false;
};

void add_common(CLI::App* cmd, Flags& f, bool config_required) {
  auto* opt = cmd->add_option("--config", f.config, "INI configuration file");
  if (config_required) opt->required();
  cmd->add_option("--seed", f.seed, "override the verification seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--extended-diagnostics", f.extended, "record ||Au||^2 and the weighted gradient integral");
}

void apply_overrides(cbf::RunConfig& c, const Flags& f) {
  if (f.seed) c.verify.seed = *f.seed;
  if (!f.out.empty()) c.output.directory = f.out;
  if (f.extended) {
    c.output.extended_diagnostics = true;
    c.solver.extended_diagnostics = true;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral Galerkin solver and verification harness for damped Navier-Stokes on the torus"};
  app.require_subcommand(1);
  Flags flags;
  auto* run = app.add_subcommand("run", "integrate the configured system");
  auto* verify = app.add_subcommand("verify", "run verification checks");
  auto* conv = app.add_subcommand("convergence", "time-step and truncation ladders");
  auto* tg = app.add_subcommand("taylor-green", "canned 2D Taylor-Green run against the analytic solution");
  add_common(run, flags, true);
  add_common(verify, flags, true);
  add_common(conv, flags, true);
  add_common(tg, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cbf::exit_ok : cbf::exit_usage;
  }

  try {
    cbf::RunConfig cfg = flags.config.empty() ? cbf::taylor_green_config() : cbf::load_config(flags.config);
    apply_overrides(cfg, flags);
    if (*run) return cbf::cmd_run(cfg, std::cout, std::cerr);
    if (*verify) return cbf::cmd_verify(cfg, std::cout);
    if (*conv) return cbf::cmd_convergence(cfg, std::cout);
    return cbf::cmd_taylor_green(cfg, std::cout, std::cerr);
  } catch (const cbf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cbf::exit_usage;
  } catch (const cbf::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return cbf::exit_blowup;
  } catch (const cbf::InvalidArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return cbf::exit_usage;
  } catch (const cbf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cbf::exit_usage;
  }
}
