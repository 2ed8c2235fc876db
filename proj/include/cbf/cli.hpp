#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cbf/config.hpp"
#include "cbf/io.hpp"
#include "cbf/sampler.hpp"
#include "cbf/snapshot.hpp"
#include "cbf/solver.hpp"
#include "cbf/verification.hpp"

namespace cbf {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_blowup = 3 };

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace detail

/// Initial field and start time described by the [ic] block.
struct InitialCondition {
  SpectralField u;
  double t0 = 0.0;
};

inline InitialCondition build_ic(const RunConfig& c) {
  const TorusGrid grid(c.grid.dim, c.grid.n, c.grid.period);
  if (c.ic.family == "taylor_green") return {taylor_green(grid, c.ic.amplitude), 0.0};
  if (c.ic.family == "random") {
    SamplerOptions opt;
    opt.band_limit = c.ic.band_limit;
    opt.slope = c.ic.slope;
    opt.amplitude = c.ic.amplitude;
    opt.amplitude_spread = 1.0;
    return {FieldSampler(grid, c.ic.seed, opt).sample(0), 0.0};
  }
  Snapshot snap;
  try {
    snap = read_snapshot(resolve_path(c, c.ic.path));
  } catch (const IoError& e) {
    throw ConfigError(std::string("ic.path: ") + e.what(), "ic.path");
  }
  if (!(snap.u.grid() == grid))
    throw ConfigError("ic.path: snapshot grid " + snap.u.grid().describe() + " differs from [grid] " + grid.describe(),
                      "ic.path");
  return {snap.u, snap.time};
}

/// Body force described by the [forcing] block on `grid`; `ic` is the manufactured target.
inline ForcingSpec build_forcing(const RunConfig& c, const TorusGrid& grid, const SpectralField& ic) {
  const auto& f = c.forcing;
  if (f.kind == "zero") return ForcingSpec::zero();
  if (f.kind == "kolmogorov") return ForcingSpec::kolmogorov(f.amplitude, f.wavenumber);
  if (f.kind == "oscillating_kolmogorov") return ForcingSpec::oscillating_kolmogorov(f.amplitude, f.wavenumber, f.omega);
  if (f.kind == "steady_snapshot") {
    Snapshot snap;
    try {
      snap = read_snapshot(resolve_path(c, f.path));
    } catch (const IoError& e) {
      throw ConfigError(std::string("forcing.path: ") + e.what(), "forcing.path");
    }
    if (!(snap.u.grid() == grid)) throw ConfigError("forcing.path: snapshot grid differs from [grid]", "forcing.path");
    return ForcingSpec::steady(snap.u);
  }
  // manufactured: f = G(u*) with u* the (filtered) initial condition, so u* is steady.
  SpectralField target = detail::filter_state(leray_project(ic), c.solver);
  target.set_divergence_free(true);
  OperatorOptions opt;
  opt.dealias = c.solver.dealias;
  SpectralField g = op_G(target, c.params, opt);
  return ForcingSpec::steady(detail::filter_state(g, c.solver));
}

/// Runs the configured simulation, writing outputs under output.directory.
inline int cmd_run(RunConfig c, std::ostream& out, std::ostream& err) {
  const InitialCondition ic = build_ic(c);
  const TorusGrid& grid = ic.u.grid();
  const ForcingSpec forcing = build_forcing(c, grid, ic.u);
  const std::string dir = c.output.directory;
  detail::ensure_directory(dir);
  RunConfig echo = c;
  echo.ic.path = resolve_path(c, c.ic.path);
  echo.forcing.path = resolve_path(c, c.forcing.path);
  write_text(to_ini(echo), dir + "/config.ini");

  const bool ext = c.solver.extended_diagnostics;
  RunHooks hooks;
  hooks.on_warning = [&](const std::string& w) { err << "warning: " << w << '\n'; };
  hooks.on_snapshot = [&](const Snapshot& s, long k) {
    char name[64];
    std::snprintf(name, sizeof name, "/snapshot_%06ld.bin", k);
    write_snapshot(s, dir + name);
  };
  RunResult result;
  try {
    result = run(ic.u, c.params, c.solver, forcing, hooks, ic.t0);
  } catch (const BlowUpError& e) {
    write_diagnostics(e.partial(), dir + "/diagnostics.tsv", ext);
    err << "error: " << e.what() << " (last valid t = " << e.last_valid_time() << ")\n";
    return exit_blowup;
  }
  write_diagnostics(result.diagnostics, dir + "/diagnostics.tsv", ext);
  write_snapshot(Snapshot{result.final_state.t, c.params, result.final_state.u}, dir + "/final.bin");

  const auto& last = result.diagnostics.back();
  double max_step_res = 0.0;
  for (std::size_t k = 1; k < result.diagnostics.size(); ++k)
    max_step_res = std::max(max_step_res, std::abs(result.diagnostics[k].energy_residual -
                                                   result.diagnostics[k - 1].energy_residual));
  const auto apriori = check_apriori_bound(result.diagnostics, c.params);
  out << "steps: " << result.steps << "\n"
      << "t: " << detail::fmt("%.10g", last.t) << "\n"
      << "energy: " << detail::fmt("%.10e", last.energy) << "\n"
      << "int_dissipation: " << detail::fmt("%.10e", last.int_dissipation) << "\n"
      << "int_damping: " << detail::fmt("%.10e", last.int_damping) << "\n"
      << "int_forcing: " << detail::fmt("%.10e", last.int_forcing) << "\n"
      << "energy_residual: " << detail::fmt("%.3e", last.energy_residual) << "\n"
      << "max_residual_between_samples: " << detail::fmt("%.3e", max_step_res) << "\n"
      << "apriori_bound: " << to_string(apriori.status) << " (worst margin " << detail::fmt("%.3e", apriori.worst_margin)
      << ")\n"
      << "output: " << dir << "\n";
  return exit_ok;
}

/// Runs the selected checks and prints one report block per check.
inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifySettings s = verify_settings(c);
  if (c.forcing.kind == "zero" || c.forcing.kind == "kolmogorov" || c.forcing.kind == "oscillating_kolmogorov") {
    s.forcing = build_forcing(c, s.grid, SpectralField::vector(s.grid));
  } else {
    throw ConfigError("forcing.kind: verify supports zero and Kolmogorov forcing only", "forcing.kind");
  }
  const std::vector<std::string> names = c.verify.checks.empty() ? check_names() : c.verify.checks;
  std::string text;
  int failed = 0;
  for (const auto& name : names) {
    const CheckReport rep = run_check(name, s);
    const std::string block = rep.to_text();
    out << block << '\n';
    out.flush();
    text += block + "\n";
    if (!rep.acceptable()) ++failed;
  }
  const std::string summary = "summary: " + std::to_string(names.size() - static_cast<std::size_t>(failed)) + "/" +
                              std::to_string(names.size()) + " checks acceptable\n";
  out << summary;
  text += summary;
  detail::ensure_directory(c.output.directory);
  write_text(text, c.output.directory + "/verify_report.txt");
  return failed == 0 ? exit_ok : exit_check_failed;
}

struct LadderRow {
  double h = 0.0;
  double error = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN();
};

/// Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}).
inline void fill_orders(std::vector<LadderRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    rows[i].order = std::log(rows[i - 1].error / rows[i].error) / std::log(rows[i - 1].h / rows[i].h);
}

/// Error of one run for the configured convergence target.
inline double convergence_error(const RunConfig& c, double dt) {
  RunConfig rc = c;
  rc.solver.dt = dt;
  rc.solver.diagnostics_every = 1 << 30;
  const TorusGrid grid(c.grid.dim, c.grid.n, c.grid.period);
  const double k0 = grid.k0();
  const std::string& target = c.convergence.target;
  if (target == "energy_residual") {
    const InitialCondition ic = build_ic(rc);
    const auto res = run(ic.u, rc.params, rc.solver, build_forcing(rc, ic.u.grid(), ic.u), {}, ic.t0);
    return res.final_state.integrals.abs_residual;
  }
  if (c.params.beta != 0.0)
    throw ConfigError("params.beta: the " + target + " target has a closed form only for beta = 0", "params.beta");
  if (c.forcing.kind != "zero")
    throw ConfigError("forcing.kind: the " + target + " target needs zero forcing", "forcing.kind");
  SpectralField u0;
  double rate = 0.0;
  if (target == "taylor_green") {
    u0 = taylor_green(grid, c.ic.amplitude);
    rate = 2.0 * c.params.mu * k0 * k0 + c.params.alpha;
  } else {
    u0 = to_spectral(sample_field(grid, grid.dim(), [&](const std::array<double, 3>& x, std::span<double> o) {
      for (auto& v : o) v = 0.0;
      o[0] = c.ic.amplitude * std::sin(k0 * x[1]);
    }));
    rate = c.params.mu * k0 * k0 + c.params.alpha;
  }
  const auto res = run(u0, rc.params, rc.solver, ForcingSpec::zero());
  SpectralField exact = u0;
  exact *= std::exp(-rate * res.final_state.t);
  const PhysicalField num = to_physical(res.final_state.u);
  const PhysicalField ex = to_physical(exact);
  double diff = 0.0, peak = 0.0;
  for (int comp = 0; comp < num.components(); ++comp)
    for (std::size_t i = 0; i < num.size(); ++i) {
      diff = std::max(diff, std::abs(num[comp][i] - ex[comp][i]));
      peak = std::max(peak, std::abs(ex[comp][i]));
    }
  return peak > 0.0 ? diff / peak : diff;
}

/// dt (and optional Galerkin) ladders with observed orders; fails when an order leaves its range.
inline int cmd_convergence(const RunConfig& c, std::ostream& out) {
  const auto& cv = c.convergence;
  if (cv.dt_ladder.size() < 3)
    throw InvalidArgumentError("convergence.dt_ladder: at least three entries are required");
  if (!cv.n_ladder.empty() && cv.n_ladder.size() < 3)
    throw InvalidArgumentError("convergence.n_ladder: at least three entries are required");
  const bool second = c.solver.scheme == Scheme::imex_cnab2;
  const double lo = cv.order_min.value_or(second ? 1.9 : 0.9);
  const double hi = cv.order_max.value_or(cv.target == "energy_residual" ? std::numeric_limits<double>::infinity()
                                                                          : (second ? 2.1 : 1.1));
  std::vector<LadderRow> rows;
  for (double dt : cv.dt_ladder) rows.push_back({dt, convergence_error(c, dt)});
  fill_orders(rows);
  std::string table = "dt\terror\torder\n";
  bool ok = true;
  for (const auto& r : rows) {
    table += detail::fmt("%.6e", r.h) + "\t" + detail::fmt("%.10e", r.error) + "\t" +
             (std::isnan(r.order) ? std::string("-") : detail::fmt("%.4f", r.order)) + "\n";
    if (!std::isnan(r.order) && !(r.order >= lo && r.order <= hi)) ok = false;
  }
  if (!cv.n_ladder.empty()) {
    // Galerkin consistency: distance to the finest truncation at t_end.
    const InitialCondition ic = build_ic(c);
    std::vector<SpectralField> finals;
    for (int n : cv.n_ladder) {
      RunConfig rc = c;
      rc.solver.galerkin_n = n;
      rc.solver.diagnostics_every = 1 << 30;
      finals.push_back(run(ic.u, rc.params, rc.solver, build_forcing(rc, ic.u.grid(), ic.u), {}, ic.t0).final_state.u);
    }
    table += "\ngalerkin_n\tdistance_to_finest\tratio\n";
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
      SpectralField d = finals[i];
      d -= finals.back();
      const double e = norm_H(d);
      table += std::to_string(cv.n_ladder[i]) + "\t" + detail::fmt("%.10e", e) + "\t" +
               (std::isnan(prev) ? std::string("-") : detail::fmt("%.4g", prev / e)) + "\n";
      prev = e;
    }
  }
  out << table;
  out << "order_range: [" << lo << ", " << hi << "]\n"
      << "status: " << (ok ? "PASS" : "FAIL") << "\n";
  detail::ensure_directory(c.output.directory);
  write_text(table, c.output.directory + "/convergence.tsv");
  return ok ? exit_ok : exit_check_failed;
}

/// Canned 2D Taylor-Green run (beta = alpha = 0, mu = 0.1, N = 64, dt = 1e-3, T = 1).
inline RunConfig taylor_green_config() {
  RunConfig c;
  c.grid = {2, 64, 2.0 * std::numbers::pi};
  c.params = {0.1, 0.0, 0.0, 3.0};
  c.solver.dt = 1e-3;
  c.solver.t_end = 1.0;
  c.solver.scheme = Scheme::imex_cnab2;
  c.solver.diagnostics_every = 10;
  c.ic.family = "taylor_green";
  c.output.directory = "taylor_green_out";
  return c;
}

/// Runs the configuration and compares with the decaying analytic vortex.
inline int cmd_taylor_green(RunConfig c, std::ostream& out, std::ostream& err) {
  const int code = cmd_run(c, out, err);
  if (code != exit_ok) return code;
  const Snapshot fin = read_snapshot(c.output.directory + "/final.bin");
  const TorusGrid& grid = fin.u.grid();
  SpectralField exact = taylor_green(grid, c.ic.amplitude);
  exact *= std::exp(-(2.0 * c.params.mu * grid.k0() * grid.k0() + c.params.alpha) * fin.time);
  const PhysicalField a = to_physical(fin.u), b = to_physical(exact);
  double diff = 0.0, peak = 0.0;
  for (int comp = 0; comp < a.components(); ++comp)
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(a[comp][i] - b[comp][i]));
      peak = std::max(peak, std::abs(b[comp][i]));
    }
  const double rel = peak > 0.0 ? diff / peak : diff;
  const bool ok = c.params.beta == 0.0 && rel < 1e-6;
  out << "taylor_green_max_rel_error: " << detail::fmt("%.3e", rel) << "\n"
      << "status: " << (ok ? "PASS" : "FAIL") << (c.params.beta != 0.0 ? " (beta != 0: no closed form)" : "") << "\n";
  return ok ? exit_ok : exit_check_failed;
}

}  // namespace cbf
