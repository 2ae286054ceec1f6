// Command-line front end: simulate | stationary | verify | sweep | dim-bound
// | lyapunov, all driven by a flat key=value config file.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gaam/harness.hpp"

namespace {

std::string default_out_root() {
  const char* env = std::getenv("GAAM_OUT_ROOT");
  return env && *env ? env : "out";
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int workers = 1;
  double tol = -1;  // overrides tol.check when >= 0
  double C = -1;    // overrides tol.C when > 0
};

gaam::RunConfig load(const CommonOpts& opts) {
  gaam::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = gaam::load_config(opts.config_path);
  if (opts.tol >= 0) cfg.tol.check = opts.tol;
  if (opts.C > 0) cfg.tol.smallness_C = opts.C;
  return cfg;
}

std::string out_dir_for(const CommonOpts& opts, const std::string& command) {
  return opts.out_dir.empty() ? default_out_root() + "/" + command : opts.out_dir;
}

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--config", opts.config_path, "run configuration file");
  sub->add_option("--out", opts.out_dir, "output directory");
  sub->add_option("--workers", opts.workers, "worker threads (sweep)");
  sub->add_option("--tol", opts.tol, "override tol.check");
  sub->add_option("--C", opts.C, "override the smallness constant tol.C");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral solver and verification harness for the damped "
               "fractional alpha model"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string suite = "energy";

  auto* sim = app.add_subcommand("simulate", "integrate and record a trajectory");
  add_common(sim, opts);
  auto* stat = app.add_subcommand("stationary", "construct a stationary solution");
  add_common(stat, opts);
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, opts);
  verify->add_option("suite", suite, "energy|absorbing|decay|lyapunov|dimension");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep summary table");
  add_common(sweep, opts);
  auto* dim = app.add_subcommand("dim-bound", "print the fractal-dimension bound");
  add_common(dim, opts);
  auto* lyap = app.add_subcommand("lyapunov", "Lyapunov trace inequality report");
  add_common(lyap, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gaam::exit_config_error;
  }

  try {
    const gaam::RunConfig cfg = load(opts);
    if (sim->parsed())
      return gaam::harness::cmd_simulate(cfg, out_dir_for(opts, "simulate"),
                                         std::cout);
    if (stat->parsed())
      return gaam::harness::cmd_stationary(cfg, out_dir_for(opts, "stationary"),
                                           std::cout);
    if (verify->parsed())
      return gaam::harness::cmd_verify(cfg, gaam::harness::parse_suite(suite),
                                       out_dir_for(opts, "verify"), std::cout);
    if (sweep->parsed())
      return gaam::harness::cmd_sweep(cfg, out_dir_for(opts, "sweep"),
                                      opts.workers, std::cout);
    if (dim->parsed()) return gaam::harness::cmd_dim_bound(cfg, std::cout);
    if (lyap->parsed())
      return gaam::harness::cmd_lyapunov(cfg, out_dir_for(opts, "lyapunov"),
                                         std::cout);
  } catch (const gaam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gaam::exit_config_error;
  } catch (const gaam::BlowUp& e) {
    std::cerr << "numerical fault: " << e.what() << "\n";
    return gaam::exit_numerical_fault;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gaam::exit_numerical_fault;
  }
  return gaam::exit_config_error;
}
