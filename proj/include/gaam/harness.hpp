#pragma once

#include <atomic>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <thread>

#include "gaam/attractor.hpp"
#include "gaam/checkpoint.hpp"
#include "gaam/config.hpp"

namespace gaam {

// Exit-status contract shared by every CLI command:
// 0 all checks pass, 1 check violation, 2 usage/config error, 3 numerical
// fault (blow-up guard, non-convergence).
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config_error = 2,
  exit_numerical_fault = 3,
};

namespace harness {

using Field = VectorField<double>;
using Params = ModelParams<double>;

inline GridPtr<double> make_grid(const RunConfig& cfg) {
  cfg.model.validate();
  return SpectralGrid<double>::make(cfg.model);
}

inline Field load_field_checkpoint(const std::string& path,
                                   const GridPtr<double>& grid) {
  if (path.empty()) throw ConfigError("checkpoint path is empty");
  auto data = read_checkpoint<double>(path);
  if (!data.field.grid->compatible(*grid))
    throw ConfigError("checkpoint grid does not match the configured grid: " + path);
  data.field.grid = grid;
  return data.field;
}

inline Field make_forcing(const RunConfig& cfg, const GridPtr<double>& grid) {
  switch (cfg.force.kind) {
    case SourceKind::zero: return Field::zero(grid);
    case SourceKind::random:
      return random_divfree_field(grid, cfg.force.seed, cfg.force.amplitude);
    case SourceKind::checkpoint:
      return load_field_checkpoint(cfg.force.checkpoint_path, grid);
  }
  throw ConfigError("unreachable forcing kind");
}

inline Field make_initial(const RunConfig& cfg, const GridPtr<double>& grid) {
  switch (cfg.init.kind) {
    case SourceKind::zero: return Field::zero(grid);
    case SourceKind::random:
      return random_divfree_field(grid, cfg.init.seed, cfg.init.amplitude);
    case SourceKind::checkpoint:
      return load_field_checkpoint(cfg.init.checkpoint_path, grid);
  }
  throw ConfigError("unreachable init kind");
}

inline StationarySolution<double> solve_stationary(const Field& f,
                                                   const Params& p,
                                                   const ToleranceSpec& tol) {
  auto sol = picard_solve(f, p, tol.stationary);
  if (sol.converged) return sol;
  std::vector<double> schedule;
  for (int i = 0; i <= 20; ++i) schedule.push_back(std::pow(0.5, i));
  schedule.push_back(0.0);
  return continuation_solve(f, p, schedule, tol.stationary);
}

inline std::optional<Field> make_reference(const RunConfig& cfg,
                                           const GridPtr<double>& grid,
                                           const Field& f) {
  switch (cfg.ref.kind) {
    case ReferenceKind::none: return std::nullopt;
    case ReferenceKind::checkpoint:
      return load_field_checkpoint(cfg.ref.checkpoint_path, grid);
    case ReferenceKind::stationary: {
      auto sol = solve_stationary(f, cfg.model, cfg.tol);
      if (!sol.converged)
        throw BlowUp("reference stationary solve did not converge");
      return sol.field;
    }
  }
  throw ConfigError("unreachable reference kind");
}

inline void write_trajectory_csv(const std::string& path,
                                 const TrajectoryRecord<double>& rec) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "t,l2_sq,h_beta2_sq,h_beta2_delta_sq,h_alpha_beta2_sq,energy_residual,"
         "grad_l52";
  if (rec.has_reference) out << ",d_s,d_w";
  out << "\n";
  char buf[40];
  const auto put = [&](double v, bool lead_comma) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (lead_comma) out << ',';
    out << buf;
  };
  for (std::size_t i = 0; i < rec.size(); ++i) {
    put(rec.times[i], false);
    put(rec.l2_sq[i], true);
    put(rec.h_beta_sq[i], true);
    put(rec.h_beta_delta_sq[i], true);
    put(rec.h_alphabeta_sq[i], true);
    put(rec.energy_residual[i], true);
    put(rec.grad_l52[i], true);
    if (rec.has_reference) {
      put(rec.dist_strong[i], true);
      put(rec.dist_weak[i], true);
    }
    out << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

inline void print_report(std::ostream& os, const CheckReport<double>& rep) {
  os << (rep.pass ? "[PASS] " : "[FAIL] ") << rep.name
     << "  max_violation=" << std::scientific << std::setprecision(3)
     << rep.max_violation;
  for (const auto& [k, v] : rep.metrics) os << "  " << k << "=" << v;
  if (!rep.note.empty()) os << "  (" << rep.note << ")";
  os << std::defaultfloat << "\n";
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory: " + dir);
}

// ---------------------------------------------------------------------------
// simulate: trajectory CSV + final checkpoint.
inline int cmd_simulate(const RunConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
  ensure_dir(out_dir);
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const Field u0 = make_initial(cfg, grid);
  const auto ref = make_reference(cfg, grid, f);
  const auto rec =
      simulate(u0, f, cfg.model, cfg.sim, ref ? &*ref : nullptr);
  write_trajectory_csv(out_dir + "/trajectory.csv", rec);
  write_checkpoint(out_dir + "/state.ckpt", rec.final_state, cfg.model,
                   rec.times.back());
  log << "simulate: " << rec.size() << " samples to t=" << rec.times.back()
      << ", final ||u||^2_{H^{beta/2}}=" << rec.h_beta_sq.back()
      << ", max energy residual=" << rec.max_energy_residual << "\n";
  log << "wrote " << out_dir << "/trajectory.csv and " << out_dir
      << "/state.ckpt\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// stationary: checkpoint + structured summary.
inline int cmd_stationary(const RunConfig& cfg, const std::string& out_dir,
                          std::ostream& log) {
  ensure_dir(out_dir);
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const auto sol = solve_stationary(f, cfg.model, cfg.tol);
  const auto small = smallness_report(f, cfg.model, cfg.tol.smallness_C);
  const auto gain = sol.converged
                        ? regularity_gain_diagnostic(sol.field, f, cfg.model)
                        : RegularityGain<double>{};

  std::ostringstream summary;
  summary << "converged = " << (sol.converged ? 1 : 0) << "\n"
          << "iterations = " << sol.iterations << "\n"
          << "residual_l2 = " << detail::fmt_double(sol.residual_l2) << "\n"
          << "energy_ratio = " << detail::fmt_double(sol.energy_ratio) << "\n"
          << "smallness.lhs = " << detail::fmt_double(small.lhs) << "\n"
          << "smallness.rhs_orbital = " << detail::fmt_double(small.rhs_orbital) << "\n"
          << "smallness.rhs_asymptotic = " << detail::fmt_double(small.rhs_asymptotic)
          << "\n"
          << "smallness.C = " << detail::fmt_double(small.C_used) << "\n"
          << "smallness.verdict = " << to_string(small.verdict) << "\n"
          << "regularity.ratio = " << detail::fmt_double(gain.ratio) << "\n"
          << "regularity.tail_fraction = " << detail::fmt_double(gain.tail_fraction)
          << "\n";
  summary << "continuation_path =";
  for (const auto& [eps, res] : sol.continuation_path)
    summary << " (" << detail::fmt_double(eps) << ", " << detail::fmt_double(res)
            << ")";
  summary << "\n";

  std::ofstream txt(out_dir + "/stationary.txt", std::ios::trunc);
  txt << summary.str();
  log << summary.str();

  if (!sol.converged) {
    log << "stationary solve did not converge; partial path written\n";
    write_checkpoint(out_dir + "/stationary.ckpt", sol.field, cfg.model, 0.0);
    return exit_numerical_fault;
  }
  write_checkpoint(out_dir + "/stationary.ckpt", sol.field, cfg.model, 0.0);
  log << "wrote " << out_dir << "/stationary.ckpt\n";
  if (sol.residual_l2 >= cfg.tol.residual) return exit_check_failed;
  return exit_ok;
}

// ---------------------------------------------------------------------------
// verify suites.
enum class VerifySuite { energy, absorbing, decay, lyapunov, dimension };

inline VerifySuite parse_suite(const std::string& s) {
  if (s == "energy") return VerifySuite::energy;
  if (s == "absorbing") return VerifySuite::absorbing;
  if (s == "decay") return VerifySuite::decay;
  if (s == "lyapunov") return VerifySuite::lyapunov;
  if (s == "dimension") return VerifySuite::dimension;
  throw ConfigError("unknown verify suite: " + s +
                    " (expected energy|absorbing|decay|lyapunov|dimension)");
}

inline int finish_suite(const std::vector<CheckReport<double>>& reports,
                        const std::string& out_dir, const std::string& name,
                        std::ostream& log) {
  std::ostringstream doc;
  bool all_pass = true;
  for (const auto& r : reports) {
    print_report(doc, r);
    all_pass = all_pass && r.pass;
  }
  ensure_dir(out_dir);
  std::ofstream out(out_dir + "/verify_" + name + ".txt", std::ios::trunc);
  out << doc.str();
  log << doc.str();
  log << (all_pass ? "suite passed" : "suite FAILED") << "\n";
  return all_pass ? exit_ok : exit_check_failed;
}

inline int verify_energy(const RunConfig& cfg, const std::string& out_dir,
                         std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const Field u0 = make_initial(cfg, grid);

  // The balance residual is an O(dt^2) statement: the run must start inside
  // the asymptotic regime of the stiffest retained mode, and the window
  // quadrature needs samples at step resolution.
  const double lam_max =
      cfg.model.gamma +
      cfg.model.nu * std::pow(grid->k_max() * grid->k_max() * cfg.model.dim,
                              cfg.model.alpha / 2);
  SimulationConfig<double> dense = cfg.sim;
  dense.dt = std::min(cfg.sim.dt, 0.5 / lam_max);
  dense.t_end = std::min(cfg.sim.t_end, std::max(2.0 / cfg.model.gamma, 100 * dense.dt));
  dense.record_stride = 1;
  dense.record_gradients = false;
  const auto rec = simulate(u0, f, cfg.model, dense);

  SimulationConfig<double> half = dense;
  half.dt /= 2;
  const auto rec_half = simulate(u0, f, cfg.model, half);

  std::vector<CheckReport<double>> reports;
  CheckReport<double> balance;
  balance.name = "discrete_energy_balance_order";
  const double ratio =
      rec.max_energy_residual / std::max(rec_half.max_energy_residual, 1e-300);
  balance.metric("dt", dense.dt);
  balance.metric("max_residual", rec.max_energy_residual);
  balance.metric("max_residual_half_dt", rec_half.max_energy_residual);
  balance.metric("reduction_ratio", ratio);
  if (rec.max_energy_residual <
      1e-13 * std::max(1.0, rec.max_energy_flux)) {
    balance.note = "residual at round-off level; ratio not meaningful";
  } else {
    const double rel = rec.max_energy_residual / std::max(rec.max_energy_flux, 1e-300);
    balance.metric("relative_residual", rel);
    // Ceiling scaled by the stiffest rate: the constant in O(dt^2) grows
    // with the data's spectral roughness, the reduction ratio is the sharp
    // order check.
    const double ceiling =
        std::max(10.0 * dense.dt * dense.dt,
                 (dense.dt * lam_max) * (dense.dt * lam_max));
    balance.pass = ratio >= 3.5 && ratio <= 4.5 && rel <= ceiling;
    balance.max_violation = std::abs(ratio - 4.0) / 4.0;
  }
  reports.push_back(balance);
  reports.push_back(energy_decay_check(rec, u0, f, cfg.model, cfg.tol.check));
  reports.push_back(dissipation_window_check(rec, u0, f, cfg.model,
                                         dense.t_end / 4, cfg.tol.check));
  return finish_suite(reports, out_dir, "energy", log);
}

inline int verify_absorbing(const RunConfig& cfg, const std::string& out_dir,
                            std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const Field u0 = make_initial(cfg, grid);
  const auto rec = simulate(u0, f, cfg.model, cfg.sim);
  std::vector<CheckReport<double>> reports;
  reports.push_back(absorbing_entry(rec, absorbing_set_spec(f, cfg.model)));
  reports.push_back(energy_decay_check(rec, u0, f, cfg.model, cfg.tol.check));
  return finish_suite(reports, out_dir, "absorbing", log);
}

inline int verify_decay(const RunConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const auto small = smallness_report(f, cfg.model, cfg.tol.smallness_C);
  if (small.verdict != StabilityVerdict::asymptotic)
    throw ConfigError(
        "verify decay: smallness verdict is not asymptotic for this config "
        "(lhs=" + std::to_string(small.lhs) + ")");
  const auto sol = solve_stationary(f, cfg.model, cfg.tol);
  if (!sol.converged) throw BlowUp("verify decay: stationary solve failed");

  const Field u0 = make_initial(cfg, grid);
  const auto rec = simulate(u0, f, cfg.model, cfg.sim, &sol.field);
  std::vector<CheckReport<double>> reports;
  reports.push_back(stationary_decay_check(rec, cfg.model, cfg.tol.check));
  std::vector<Field> starts;
  for (int i = 0; i < 5; ++i)
    starts.push_back(random_divfree_field(grid, cfg.init.seed + 11 * i + 1,
                                          cfg.init.amplitude));
  reports.push_back(singleton_attractor_check(f, cfg.model, cfg.sim, starts,
                                              sol.field, cfg.tol.singleton));
  return finish_suite(reports, out_dir, "decay", log);
}

inline int verify_lyapunov(const RunConfig& cfg, const std::string& out_dir,
                           std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field u = make_initial(cfg, grid);
  std::vector<Field> raw;
  for (int i = 0; i < 8; ++i)
    raw.push_back(random_divfree_field(grid, cfg.sim.seed + 101 * i + 7, 1.0));
  const auto family = gram_schmidt_delta(raw, cfg.model.beta, cfg.model.delta);
  std::vector<CheckReport<double>> reports;
  for (int n : {1, 2, 4, 8}) {
    OrthonormalFamily<double> sub;
    sub.beta = family.beta;
    sub.delta = family.delta;
    sub.members.assign(family.members.begin(), family.members.begin() + n);
    auto rep = lyapunov_trace_check(u, sub, cfg.model, cfg.tol.check);
    rep.name += "_n" + std::to_string(n);
    reports.push_back(rep);
  }
  return finish_suite(reports, out_dir, "lyapunov", log);
}

inline int verify_dimension(const RunConfig& cfg, const std::string& out_dir,
                            std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  std::vector<CheckReport<double>> reports;

  CheckReport<double> clt;
  clt.name = "lieb_thirring_constant";
  const double via_gamma = lieb_thirring_constant();
  const double pi_d = 3.141592653589793238462643383279502884;
  // Independent route through Gamma(7/2) = (15/8) sqrt(pi), Gamma(5) = 24.
  const double closed =
      3.0 / (5.0 * std::pow(4.0, 2.0 / 3.0)) * std::pow(pi_d, 4.0 / 3.0);
  clt.metric("value", via_gamma);
  clt.metric("closed_form", closed);
  clt.max_violation = std::abs(via_gamma - closed);
  clt.pass = clt.max_violation < 1e-10;
  reports.push_back(clt);

  CheckReport<double> bound;
  bound.name = "fractal_dimension_bound";
  std::ostringstream warn;
  const double value = fractal_dim_bound(f, cfg.model, &warn);
  bound.metric("bound", value);
  bound.metric("frak_c", dimension_bound_constant(cfg.model));
  bound.metric("f_norm_delta",
               sobolev_norm(f, cfg.model.beta / 2, SobolevVariant::delta_weighted,
                            cfg.model.delta));
  bound.pass = std::isfinite(value) && value >= 0;
  bound.note = warn.str().empty() ? "" : "hypothesis warning: " + warn.str();
  reports.push_back(bound);
  return finish_suite(reports, out_dir, "dimension", log);
}

inline int cmd_verify(const RunConfig& cfg, VerifySuite suite,
                      const std::string& out_dir, std::ostream& log) {
  switch (suite) {
    case VerifySuite::energy: return verify_energy(cfg, out_dir, log);
    case VerifySuite::absorbing: return verify_absorbing(cfg, out_dir, log);
    case VerifySuite::decay: return verify_decay(cfg, out_dir, log);
    case VerifySuite::lyapunov: return verify_lyapunov(cfg, out_dir, log);
    case VerifySuite::dimension: return verify_dimension(cfg, out_dir, log);
  }
  throw ConfigError("unreachable suite");
}

// ---------------------------------------------------------------------------
// sweep: one row per parameter cell, cells run on a small worker pool.
struct SweepRow {
  double alpha = 0, beta = 0, gamma = 0, nu = 0, delta = 0, f_norm = 0;
  std::string verdict = "-";
  double residual = 0;
  double spread = 0;
  double dim_bound = 0;
  std::string status = "ok";
};

inline SweepRow run_sweep_cell(RunConfig cfg, double alpha, double beta,
                               double gamma, double nu, double delta,
                               double famp, const std::string& cell_dir) {
  SweepRow row;
  row.alpha = alpha;
  row.beta = beta;
  row.gamma = gamma;
  row.nu = nu;
  row.delta = delta;
  cfg.model.alpha = alpha;
  cfg.model.beta = beta;
  cfg.model.gamma = gamma;
  cfg.model.nu = nu;
  cfg.model.delta = delta;
  cfg.force.amplitude = famp;
  try {
    ensure_dir(cell_dir);
    auto grid = make_grid(cfg);
    const Field f = make_forcing(cfg, grid);
    row.f_norm = sobolev_norm(f, cfg.model.beta / 2);
    const auto small = smallness_report(f, cfg.model, cfg.tol.smallness_C);
    row.verdict = to_string(small.verdict);
    const auto sol = solve_stationary(f, cfg.model, cfg.tol);
    row.residual = sol.residual_l2;
    if (!sol.converged) {
      row.status = "nonconvergent";
      return row;
    }
    write_checkpoint(cell_dir + "/stationary.ckpt", sol.field, cfg.model, 0.0);
    std::vector<Field> starts;
    for (int i = 0; i < cfg.sweep.n_starts; ++i)
      starts.push_back(random_divfree_field(grid, cfg.init.seed + 13 * i + 3,
                                            cfg.init.amplitude));
    SimulationConfig<double> collapse_cfg = cfg.sim;
    collapse_cfg.t_end = 10.0 / cfg.model.gamma;
    const auto rep = singleton_attractor_check(f, cfg.model, collapse_cfg,
                                               starts, sol.field,
                                               cfg.tol.singleton);
    for (const auto& [k, v] : rep.metrics)
      if (k == "spread") row.spread = v;
    row.dim_bound = fractal_dim_bound(f, cfg.model);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

inline int cmd_sweep(const RunConfig& cfg, const std::string& out_dir,
                     int workers, std::ostream& log) {
  ensure_dir(out_dir);
  struct Cell {
    double alpha, beta, gamma, nu, delta, famp;
  };
  std::vector<Cell> cells;
  for (double a : cfg.sweep.alpha)
    for (double b : cfg.sweep.beta)
      for (double g : cfg.sweep.gamma)
        for (double n : cfg.sweep.nu)
          for (double d : cfg.sweep.delta)
            for (double fa : cfg.sweep.f_amplitude)
              cells.push_back({a, b, g, n, d, fa});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const int n_workers = std::max(1, workers);
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const auto& c = cells[i];
      rows[i] = run_sweep_cell(cfg, c.alpha, c.beta, c.gamma, c.nu, c.delta,
                               c.famp, out_dir + "/cell" + std::to_string(i));
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::ostringstream table;
  table << "alpha,beta,gamma,nu,delta,f_norm,verdict,stationary_residual,"
           "collapse_spread,dim_bound,status\n";
  for (const auto& r : rows)
    table << detail::fmt_double(r.alpha) << ',' << detail::fmt_double(r.beta)
          << ',' << detail::fmt_double(r.gamma) << ',' << detail::fmt_double(r.nu)
          << ',' << detail::fmt_double(r.delta) << ','
          << detail::fmt_double(r.f_norm) << ',' << r.verdict << ','
          << detail::fmt_double(r.residual) << ',' << detail::fmt_double(r.spread)
          << ',' << detail::fmt_double(r.dim_bound) << ',' << r.status << "\n";
  std::ofstream out(out_dir + "/sweep.csv", std::ios::trunc);
  out << table.str();
  log << table.str();
  log << "wrote " << out_dir << "/sweep.csv\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
inline int cmd_dim_bound(const RunConfig& cfg, std::ostream& log) {
  auto grid = make_grid(cfg);
  const Field f = make_forcing(cfg, grid);
  const auto dc = derived_constants(cfg.model);
  std::ostringstream warn;
  const double bound = fractal_dim_bound(f, cfg.model, &warn);
  log << "C_LT = " << detail::fmt_double(lieb_thirring_constant()) << "\n"
      << "a = " << dc.a << ", b = " << dc.b << ", c = " << dc.c
      << ", d = " << dc.d << "\n"
      << "frak_c = " << detail::fmt_double(dimension_bound_constant(cfg.model))
      << "\n"
      << "f_norm_delta = "
      << detail::fmt_double(sobolev_norm(f, cfg.model.beta / 2,
                                         SobolevVariant::delta_weighted,
                                         cfg.model.delta))
      << "\n"
      << "dim_bound = " << detail::fmt_double(bound) << "\n";
  if (!warn.str().empty()) log << warn.str();
  return exit_ok;
}

inline int cmd_lyapunov(const RunConfig& cfg, const std::string& out_dir,
                        std::ostream& log) {
  return verify_lyapunov(cfg, out_dir, log);
}

}  // namespace harness
}  // namespace gaam
