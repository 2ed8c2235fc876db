#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cbf/operators.hpp"
#include "cbf/snapshot.hpp"

namespace cbf {

enum class Scheme { imex_euler, imex_cnab2 };

inline const char* to_string(Scheme s) { return s == Scheme::imex_euler ? "imex_euler" : "imex_cnab2"; }

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::imex_cnab2;
  /// Extra Galerkin truncation; 0 keeps every grid mode.
  int galerkin_n = 0;
  Truncation truncation = Truncation::box;
  bool dealias = true;
  int diagnostics_every = 1;
  /// 0 disables snapshots.
  int snapshot_every = 0;
  /// Split each step into this many equal sub-steps.
  int substeps = 1;
  bool extended_diagnostics = false;
  /// Abort once ||u||_H exceeds this multiple of its initial value.
  double blowup_factor = 1e6;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgumentError("solver: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgumentError("solver: t_end must be >= 0");
    if (galerkin_n < 0) throw InvalidArgumentError("solver: galerkin_n must be >= 0");
    if (diagnostics_every < 1) throw InvalidArgumentError("solver: diagnostics_every must be >= 1");
    if (snapshot_every < 0) throw InvalidArgumentError("solver: snapshot_every must be >= 0");
    if (substeps < 1) throw InvalidArgumentError("solver: substeps must be >= 1");
  }
};

enum class ForcingKind { zero, steady, kolmogorov, oscillating_kolmogorov };

/// Body force f(t). Every produced field is Leray-projected.
struct ForcingSpec {
  ForcingKind kind = ForcingKind::zero;
  /// Used by `steady`.
  SpectralField field;
  double amplitude = 1.0;
  /// Kolmogorov mode index along y.
  int wavenumber = 1;
  double omega = 1.0;

  static ForcingSpec zero() { return {}; }

  static ForcingSpec steady(SpectralField f) {
    ForcingSpec s;
    s.kind = ForcingKind::steady;
    s.field = leray_project(std::move(f));
    return s;
  }

  /// amplitude * sin(k y) e_x
  static ForcingSpec kolmogorov(double amplitude, int wavenumber) {
    ForcingSpec s;
    s.kind = ForcingKind::kolmogorov;
    s.amplitude = amplitude;
    s.wavenumber = wavenumber;
    return s;
  }

  /// amplitude * cos(omega t) sin(k y) e_x
  static ForcingSpec oscillating_kolmogorov(double amplitude, int wavenumber, double omega) {
    ForcingSpec s = kolmogorov(amplitude, wavenumber);
    s.kind = ForcingKind::oscillating_kolmogorov;
    s.omega = omega;
    return s;
  }

  bool is_zero() const noexcept { return kind == ForcingKind::zero; }
  bool time_dependent() const noexcept { return kind == ForcingKind::oscillating_kolmogorov; }

  SpectralField evaluate(const TorusGrid& grid, double t) const {
    switch (kind) {
      case ForcingKind::zero: {
        SpectralField f = SpectralField::vector(grid);
        f.set_divergence_free(true);
        return f;
      }
      case ForcingKind::steady:
        require_same_grid(grid, field.grid(), "forcing");
        return field;
      case ForcingKind::kolmogorov:
      case ForcingKind::oscillating_kolmogorov: {
        if (wavenumber <= 0 || wavenumber >= grid.nyquist())
          throw InvalidArgumentError("forcing: Kolmogorov wavenumber must lie in [1, n/2)");
        const double a = kind == ForcingKind::kolmogorov ? amplitude : amplitude * std::cos(omega * t);
        SpectralField f = SpectralField::vector(grid);
        Mode m{0, wavenumber, 0};
        f[0][grid.flat_index(m)] = cplx(0.0, -0.5 * a);
        m[1] = -wavenumber;
        f[0][grid.flat_index(m)] = cplx(0.0, 0.5 * a);
        f.set_divergence_free(true);
        return f;
      }
    }
    throw InvalidArgumentError("forcing: unknown kind");
  }
};

/// Point quantities of one state; extended entries are NaN unless requested.
struct Evaluation {
  double t = 0.0;
  double energy = 0.0;          // ||u||_H^2
  double v_seminorm_sq = 0.0;   // ||grad u||_H^2
  double v_norm_sq = 0.0;       // full H^1
  double lr1_norm = 0.0;        // ||u||_{L^{r+1}}^{r+1}
  double forcing_power = 0.0;   // <f, u>
  double forcing_vdual_sq = 0.0;
  double forcing_h_sq = 0.0;
  double a_norm_sq = 0.0;       // ||A u||_H^2
  double max_velocity = 0.0;
  double weighted_grad = std::numeric_limits<double>::quiet_NaN();  // int |grad u|^2 |u|^{r-1}
  /// -B(u) - beta C(u) + f(t), already filtered.
  SpectralField explicit_term;
  bool valid = false;
};

struct Integrals {
  double dissipation = 0.0;  // int ||grad u||^2
  double damping = 0.0;      // int ||u||_{r+1}^{r+1}
  double forcing = 0.0;      // int <f, u>
  double darcy = 0.0;        // int ||u||_H^2
  double forcing_vdual_sq = 0.0;
  double forcing_h_sq = 0.0;
  double a_norm_sq = 0.0;
  double weighted_grad = 0.0;
  /// Sum of |per-step energy defect|.
  double abs_residual = 0.0;
};

struct SimulationState {
  double t = 0.0;
  long step_index = 0;
  SpectralField u;
  SpectralField prev_explicit;
  bool has_prev = false;
  Integrals integrals;
  Evaluation current;
  double initial_energy = 0.0;
  double initial_seminorm_sq = 0.0;
  double last_step_residual = 0.0;
  std::vector<std::string> warnings;
  bool cfl_warned = false;
};

struct DiagnosticsSample {
  double t = 0.0;
  double energy = 0.0;
  double v_seminorm_sq = 0.0;
  double v_norm_sq = 0.0;
  double lr1_norm = 0.0;
  double forcing_power = 0.0;
  /// Signed defect of the energy identity accumulated since the start.
  double energy_residual = 0.0;
  double int_dissipation = 0.0;
  double int_damping = 0.0;
  double int_forcing = 0.0;
  // extended
  double a_norm_sq = 0.0;
  double weighted_grad = std::numeric_limits<double>::quiet_NaN();
  double int_a_norm_sq = 0.0;
  double int_weighted_grad = std::numeric_limits<double>::quiet_NaN();
  double int_darcy = 0.0;
  double int_forcing_vdual_sq = 0.0;
  double int_forcing_h_sq = 0.0;
  double abs_residual = 0.0;
  double max_velocity = 0.0;
  double divergence_ratio = 0.0;
  bool extended = false;
};

/// Raised when the state stops being finite or grows past the configured factor.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& msg, double last_valid_time)
      : Error(msg), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }
  const std::vector<DiagnosticsSample>& partial() const noexcept { return partial_; }
  void set_partial(std::vector<DiagnosticsSample> samples) { partial_ = std::move(samples); }

 private:
  double last_valid_time_;
  std::vector<DiagnosticsSample> partial_;
};

/// Energy-identity integrand mu |grad u|^2 + alpha |u|^2 + beta |u|^{r+1} - <f, u>.
inline double energy_rate(const Evaluation& e, const CbfParams& p) {
  return p.mu * e.v_seminorm_sq + p.alpha * e.energy + p.beta * e.lr1_norm - e.forcing_power;
}

/// Discrete defect of d|u|^2/dt = -2(rate) over one step, trapezoidal in time.
inline double energy_residual(const DiagnosticsSample& prev, const DiagnosticsSample& next, double dt,
                              const CbfParams& p) {
  auto rate = [&](const DiagnosticsSample& s) {
    return p.mu * s.v_seminorm_sq + p.alpha * s.energy + p.beta * s.lr1_norm - s.forcing_power;
  };
  return next.energy - prev.energy + dt * (rate(prev) + rate(next));
}

/// ||u0||^2 + (1/mu) int_0^t ||f||_{V'}^2, given the forcing integral.
inline double apriori_bound(double initial_energy, const CbfParams& p, double int_forcing_vdual_sq) {
  return initial_energy + int_forcing_vdual_sq / p.mu;
}

/// Same bound with the forcing integral computed by composite trapezoid on `quad_points` nodes.
inline double apriori_bound(const SpectralField& ic, const CbfParams& p, const ForcingSpec& forcing, double t,
                            int quad_points = 2001) {
  if (!(t >= 0.0)) throw InvalidArgumentError("apriori_bound: t must be >= 0");
  const double e0 = norm_H_sq(ic);
  if (forcing.is_zero() || t == 0.0) return e0;
  if (!forcing.time_dependent()) return apriori_bound(e0, p, t * norm_V_dual_sq(forcing.evaluate(ic.grid(), 0.0)));
  const int n = std::max(quad_points, 2);
  const double h = t / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * norm_V_dual_sq(forcing.evaluate(ic.grid(), i * h));
  }
  return apriori_bound(e0, p, acc * h);
}

namespace detail {

/// Truncation shared by the state, the forcing and the explicit term.
inline SpectralField filter_state(SpectralField u, const SolverConfig& cfg) {
  const bool flag = u.divergence_free();
  if (cfg.dealias) u = dealias(std::move(u));
  if (cfg.galerkin_n > 0) u = galerkin_truncate(std::move(u), cfg.galerkin_n, cfg.truncation);
  u.set_divergence_free(flag);
  return u;
}

inline Evaluation evaluate(const SpectralField& u, double t, const CbfParams& p, const SolverConfig& cfg,
                           const ForcingSpec& forcing) {
  Evaluation e;
  e.t = t;
  const auto& g = u.grid();
  e.energy = norm_H_sq(u);
  e.v_seminorm_sq = seminorm_grad_sq(u);
  e.v_norm_sq = e.energy + e.v_seminorm_sq;
  e.a_norm_sq = norm_A_sq(u);

  const PhysicalField up = to_physical(u);
  const auto mag = magnitude(up);
  auto dv = physical_gradient(u);

  std::vector<double> tmp(mag.size());
  for (std::size_t i = 0; i < mag.size(); ++i) tmp[i] = std::pow(mag[i], p.r + 1.0);
  e.lr1_norm = integrate(g, tmp);
  e.max_velocity = 0.0;
  for (double m : mag) e.max_velocity = std::max(e.max_velocity, m);

  if (cfg.extended_diagnostics) {
    for (std::size_t i = 0; i < mag.size(); ++i) {
      double grad2 = 0.0;
      for (const auto& d : dv)
        for (int c = 0; c < d.components(); ++c) grad2 += d[c][i] * d[c][i];
      tmp[i] = grad2 * (mag[i] > 0.0 ? std::pow(mag[i], p.r - 1.0) : (p.r == 1.0 ? 1.0 : 0.0));
    }
    e.weighted_grad = integrate(g, tmp);
  }

  PhysicalField values(g, u.components());
  for (int c = 0; c < u.components(); ++c) {
    auto o = values[c];
    for (int j = 0; j < g.dim(); ++j) {
      auto uj = up[j];
      auto d = dv[static_cast<std::size_t>(j)][c];
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += uj[i] * d[i];
    }
  }
  if (p.beta != 0.0) values.axpy(p.beta, damping_physical(up, p.r));
  SpectralField nl = leray_project(filter_state(to_spectral(values), cfg));

  SpectralField f = filter_state(forcing.evaluate(g, t), cfg);
  e.forcing_power = duality_pairing(f, u);
  e.forcing_vdual_sq = norm_V_dual_sq(f);
  e.forcing_h_sq = norm_H_sq(f);

  e.explicit_term = std::move(f);
  e.explicit_term -= nl;
  e.explicit_term.set_divergence_free(true);
  e.valid = true;
  return e;
}

inline DiagnosticsSample make_sample(const SimulationState& s, const CbfParams& p, bool extended) {
  const Evaluation& e = s.current;
  const Integrals& I = s.integrals;
  DiagnosticsSample d;
  d.t = s.t;
  d.energy = e.energy;
  d.v_seminorm_sq = e.v_seminorm_sq;
  d.v_norm_sq = e.v_norm_sq;
  d.lr1_norm = e.lr1_norm;
  d.forcing_power = e.forcing_power;
  d.energy_residual = e.energy - s.initial_energy + 2.0 * p.mu * I.dissipation + 2.0 * p.alpha * I.darcy +
                      2.0 * p.beta * I.damping - 2.0 * I.forcing;
  d.int_dissipation = I.dissipation;
  d.int_damping = I.damping;
  d.int_forcing = I.forcing;
  d.a_norm_sq = e.a_norm_sq;
  d.weighted_grad = e.weighted_grad;
  d.int_a_norm_sq = I.a_norm_sq;
  d.int_weighted_grad = extended ? I.weighted_grad : std::numeric_limits<double>::quiet_NaN();
  d.int_darcy = I.darcy;
  d.int_forcing_vdual_sq = I.forcing_vdual_sq;
  d.int_forcing_h_sq = I.forcing_h_sq;
  d.abs_residual = I.abs_residual;
  d.max_velocity = e.max_velocity;
  d.divergence_ratio = divergence_ratio(s.u);
  d.extended = extended;
  return d;
}

}  // namespace detail

/// Prepares a state at time t0: filters and (if needed) projects the initial field.
inline SimulationState initial_state(SpectralField ic, const CbfParams& p, const SolverConfig& cfg,
                                     const ForcingSpec& forcing, double t0 = 0.0) {
  p.validate();
  cfg.validate();
  if (!ic.is_vector()) throw InvalidFieldError("initial_state: initial condition must be a vector field");
  if (!ic.all_finite()) throw InvalidFieldError("initial_state: initial condition is not finite");
  SimulationState s;
  if (divergence_ratio(ic) > 1e-10) s.warnings.push_back("initial condition was not divergence-free; projected");
  ic = detail::filter_state(leray_project(std::move(ic)), cfg);
  ic.set_divergence_free(true);
  s.t = t0;
  s.u = std::move(ic);
  s.current = detail::evaluate(s.u, t0, p, cfg, forcing);
  s.initial_energy = s.current.energy;
  s.initial_seminorm_sq = s.current.v_seminorm_sq;
  return s;
}

/// Advances one step of size cfg.dt (or `dt_override` when positive).
inline SimulationState step(SimulationState s, const CbfParams& p, const SolverConfig& cfg,
                            const ForcingSpec& forcing, double dt_override = 0.0) {
  const double dt = dt_override > 0.0 ? dt_override : cfg.dt;
  if (!s.current.valid) s.current = detail::evaluate(s.u, s.t, p, cfg, forcing);
  const auto& g = s.u.grid();

  const double cfl = dt * s.current.max_velocity * g.k0() * g.nyquist();
  if (cfl >= 1.0 && !s.cfl_warned) {
    s.warnings.push_back("CFL number " + std::to_string(cfl) + " >= 1 at t = " + std::to_string(s.t));
    s.cfl_warned = true;
  }

  const Evaluation start = s.current;
  const double h = dt / cfg.substeps;
  double t = s.t;
  for (int sub = 0; sub < cfg.substeps; ++sub) {
    if (sub > 0) s.current = detail::evaluate(s.u, t, p, cfg, forcing);
    const SpectralField& E = s.current.explicit_term;
    const bool ab2 = cfg.scheme == Scheme::imex_cnab2 && s.has_prev;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double L = p.mu * g.k_squared(g.mode(i)) + p.alpha;
      for (int c = 0; c < s.u.components(); ++c) {
        cplx& u = s.u[c][i];
        if (!ab2) {
          u = (u + h * E[c][i]) / (1.0 + h * L);
        } else {
          u = ((1.0 - 0.5 * h * L) * u + h * (1.5 * E[c][i] - 0.5 * s.prev_explicit[c][i])) / (1.0 + 0.5 * h * L);
        }
      }
    }
    if (cfg.scheme == Scheme::imex_cnab2) {
      s.prev_explicit = E;
      s.has_prev = true;
    }
    t = s.t + (sub + 1) * h;
    s.u.set_divergence_free(true);

    if (!s.u.all_finite()) {
      throw BlowUpError("solver: non-finite coefficients after step at t = " + std::to_string(t), s.t);
    }
  }
  s.t = s.t + dt;
  s.step_index += 1;

  const double norm = norm_H(s.u);
  const double ref = std::sqrt(s.initial_energy);
  if (ref > 0.0 && norm > cfg.blowup_factor * ref) {
    throw BlowUpError("solver: ||u||_H grew past " + std::to_string(cfg.blowup_factor) +
                          " times its initial value at t = " + std::to_string(s.t),
                      start.t);
  }

  s.current = detail::evaluate(s.u, s.t, p, cfg, forcing);
  if (!std::isfinite(s.current.lr1_norm) || !std::isfinite(s.current.energy)) {
    throw BlowUpError("solver: non-finite diagnostics at t = " + std::to_string(s.t), start.t);
  }
  const Evaluation& end = s.current;
  auto trap = [&](double a, double b) { return 0.5 * dt * (a + b); };
  Integrals& I = s.integrals;
  I.dissipation += trap(start.v_seminorm_sq, end.v_seminorm_sq);
  I.damping += trap(start.lr1_norm, end.lr1_norm);
  I.forcing += trap(start.forcing_power, end.forcing_power);
  I.darcy += trap(start.energy, end.energy);
  I.forcing_vdual_sq += trap(start.forcing_vdual_sq, end.forcing_vdual_sq);
  I.forcing_h_sq += trap(start.forcing_h_sq, end.forcing_h_sq);
  I.a_norm_sq += trap(start.a_norm_sq, end.a_norm_sq);
  if (cfg.extended_diagnostics) I.weighted_grad += trap(start.weighted_grad, end.weighted_grad);
  s.last_step_residual = end.energy - start.energy + dt * (energy_rate(start, p) + energy_rate(end, p));
  I.abs_residual += std::abs(s.last_step_residual);
  return s;
}

inline DiagnosticsSample sample_of(const SimulationState& s, const CbfParams& p, const SolverConfig& cfg) {
  return detail::make_sample(s, p, cfg.extended_diagnostics);
}

struct RunResult {
  SimulationState final_state;
  std::vector<DiagnosticsSample> diagnostics;
  /// Times at which snapshots were handed to the sink.
  std::vector<double> snapshot_times;
  double dt_used = 0.0;
  long steps = 0;
};

struct RunHooks {
  std::function<void(const DiagnosticsSample&)> on_sample;
  std::function<void(const Snapshot&, long step)> on_snapshot;
  std::function<void(const std::string&)> on_warning;
};

/// Number of equal steps covering [t0, t_end]; the step is shrunk if dt does not divide the span.
inline long step_count(double t0, double t_end, double dt) {
  const double span = t_end - t0;
  if (span <= 0.0) return 0;
  return static_cast<long>(std::ceil(span / dt - 1e-9));
}

/// Integrates from `t0` to cfg.t_end.
inline RunResult run(const SpectralField& ic, const CbfParams& p, const SolverConfig& cfg,
                     const ForcingSpec& forcing, const RunHooks& hooks = {}, double t0 = 0.0) {
  RunResult out;
  SimulationState s = initial_state(ic, p, cfg, forcing, t0);
  const long n = step_count(t0, cfg.t_end, cfg.dt);
  const double dt = n > 0 ? (cfg.t_end - t0) / static_cast<double>(n) : cfg.dt;
  if (n > 0 && std::abs(dt - cfg.dt) > 1e-12 * cfg.dt) {
    s.warnings.push_back("dt adjusted to " + std::to_string(dt) + " to land on t_end");
  }
  out.dt_used = dt;
  std::size_t warned = 0;
  auto flush_warnings = [&] {
    for (; warned < s.warnings.size(); ++warned)
      if (hooks.on_warning) hooks.on_warning(s.warnings[warned]);
  };
  auto emit = [&] {
    out.diagnostics.push_back(sample_of(s, p, cfg));
    if (hooks.on_sample) hooks.on_sample(out.diagnostics.back());
  };
  auto snapshot = [&](long k) {
    out.snapshot_times.push_back(s.t);
    if (hooks.on_snapshot) hooks.on_snapshot(Snapshot{s.t, p, s.u}, k);
  };
  flush_warnings();
  emit();
  for (long k = 1; k <= n; ++k) {
    try {
      s = step(std::move(s), p, cfg, forcing, dt);
    } catch (BlowUpError& e) {
      e.set_partial(out.diagnostics);
      throw;
    }
    flush_warnings();
    if (k % cfg.diagnostics_every == 0 || k == n) emit();
    if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) snapshot(k);
  }
  out.steps = n;
  out.final_state = std::move(s);
  return out;
}

}  // namespace cbf
