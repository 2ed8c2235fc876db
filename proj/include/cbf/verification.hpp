#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cbf/gronwall.hpp"
#include "cbf/operators.hpp"
#include "cbf/report.hpp"
#include "cbf/sampler.hpp"
#include "cbf/solver.hpp"

namespace cbf {

/// Inputs shared by every check.
struct VerifySettings {
  TorusGrid grid{2, 32};
  std::uint64_t seed = 42;
  int samples = 500;
  SamplerOptions sampler;
  CbfParams params{1.0, 0.0, 1.0, 5.0};
  RhoFormula rho_formula = RhoFormula::standard;

  // interpolation exponents s <= rho <= t
  double interp_s = 2.0;
  double interp_rho = 4.0;
  double interp_t = 6.0;

  std::vector<double> filter_n{1.0, 10.0, 100.0, 1000.0, 10000.0};

  /// r = 3 regularity weight; unset picks a feasible default.
  std::optional<double> theta;

  /// identity_3 grid resolution and the refinement used for |u|^{(r+1)/2}.
  int identity_n_points = 64;
  int identity_upsample = 4;

  // trajectory checks
  SolverConfig solver = [] {
    SolverConfig c;
    c.t_end = 0.5;
    c.extended_diagnostics = true;
    return c;
  }();
  std::string trajectory_ic = "random";
  ForcingSpec forcing;
  double perturbation = 1e-3;

  bool keep_details = false;
  std::map<std::string, double> tolerances;

  double tol(const std::string& check, double fallback) const {
    auto it = tolerances.find(check);
    return it == tolerances.end() ? fallback : it->second;
  }
};

namespace detail {

/// Magnitudes and gradients of a field on the grid.
struct Sampled {
  PhysicalField u;
  std::vector<double> mag;       // |u|
  std::vector<double> grad_mag;  // |grad u| (Frobenius)
};

inline Sampled sampled(const SpectralField& s) {
  Sampled out{to_physical(s), {}, {}};
  out.mag = magnitude(out.u);
  out.grad_mag.assign(out.mag.size(), 0.0);
  for (const auto& d : physical_gradient(s)) {
    for (int c = 0; c < d.components(); ++c)
      for (std::size_t i = 0; i < out.grad_mag.size(); ++i) out.grad_mag[i] += d[c][i] * d[c][i];
  }
  for (auto& g : out.grad_mag) g = std::sqrt(g);
  return out;
}

/// Q[fn(i)] over grid points.
template <typename Fn>
double quad(const TorusGrid& g, Fn&& fn) {
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += fn(i);
  return acc * g.cell_volume();
}

inline double safe_pow(double x, double e) { return x > 0.0 ? std::pow(x, e) : (e == 0.0 ? 1.0 : 0.0); }

/// (lhs - rhs) normalised by the term magnitudes.
inline double slack(double larger, double smaller, double scale) {
  if (scale == 0.0) return larger - smaller >= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return (larger - smaller) / scale;
}

inline double rel_gap(double a, double b) {
  const double s = std::abs(a) + std::abs(b);
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline FieldSampler make_sampler(const VerifySettings& s) { return FieldSampler(s.grid, s.seed, s.sampler); }

inline CheckReport start(const std::string& name, double tol, const VerifySettings& s) {
  CheckReport r(name, tol);
  r.keep_details = s.keep_details;
  r.samples = s.samples;
  return r;
}

inline std::uint64_t seed_of(const VerifySettings& s, long i) { return s.seed + static_cast<std::uint64_t>(i); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Algebraic identities

/// b(u,v,v) = 0, b(u,v,w) = -b(u,w,v) and <B(u),u> = 0 for divergence-free u.
inline CheckReport check_trilinear(const VerifySettings& s) {
  auto rep = detail::start("trilinear", s.tol("trilinear", 1e-10), s);
  const auto sampler = detail::make_sampler(s);
  const auto& g = s.grid;
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    auto [u, v, w] = sampler.triple(static_cast<std::uint64_t>(i));
    const auto U = detail::sampled(u), V = detail::sampled(v), W = detail::sampled(w);
    const double b_uvv = trilinear_b(u, v, v);
    const double scale_vv = detail::quad(g, [&](std::size_t k) { return U.mag[k] * V.grad_mag[k] * V.mag[k]; });
    rep.record(seed, -std::abs(b_uvv) / std::max(scale_vv, 1e-300), "b(u,v,v) = 0");

    const double b_uvw = trilinear_b(u, v, w);
    const double b_uwv = trilinear_b(u, w, v);
    const double scale_anti = detail::quad(g, [&](std::size_t k) {
      return U.mag[k] * (V.grad_mag[k] * W.mag[k] + W.grad_mag[k] * V.mag[k]);
    });
    rep.record(seed, -std::abs(b_uvw + b_uwv) / std::max(scale_anti, 1e-300), "b(u,v,w) = -b(u,w,v)");

    const double buu = duality_pairing(op_B(u), u);
    const double scale_uu = detail::quad(g, [&](std::size_t k) { return U.mag[k] * U.grad_mag[k] * U.mag[k]; });
    rep.record(seed, -std::abs(buu) / std::max(scale_uu, 1e-300), "<B(u),u> = 0");
  }
  rep.finalize();
  return rep;
}

/// Plancherel, <Au,u> = int |grad u|^2, self-adjointness of A, <C(u),u>, <G(u),u>, Leray laws.
inline CheckReport check_operator_identities(const VerifySettings& s) {
  const double tol = s.tol("operator_identities", 1e-8);
  auto rep = detail::start("operator_identities", tol, s);
  const auto sampler = detail::make_sampler(s);
  const auto& g = s.grid;
  const CbfParams& p = s.params;
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    const auto U = detail::sampled(u);

    const double h_spec = norm_H_sq(u);
    const double h_quad = detail::quad(g, [&](std::size_t k) { return U.mag[k] * U.mag[k]; });
    rep.record(seed, -detail::rel_gap(h_spec, h_quad), 1e-12, "Plancherel");

    const double au_u = duality_pairing(op_A(u), u);
    const double grad_quad = detail::quad(g, [&](std::size_t k) { return U.grad_mag[k] * U.grad_mag[k]; });
    rep.record(seed, -detail::rel_gap(au_u, grad_quad), 1e-10, "<Au,u> = int |grad u|^2");

    const double au_v = duality_pairing(op_A(u), v);
    const double u_av = duality_pairing(u, op_A(v));
    rep.record(seed, -std::abs(au_v - u_av) / (seminorm_grad(u) * seminorm_grad(v)), 1e-10, "A self-adjoint");

    const double cu_u = duality_pairing(op_C(u, p.r), u);
    const double lr = norm_Lp_pow(U.u, p.r + 1.0);
    rep.record(seed, -detail::rel_gap(cu_u, lr), tol, "<C(u),u> = ||u||_{r+1}^{r+1}");

    const double gu_u = duality_pairing(op_G(u, p), u);
    const double assembled = p.mu * seminorm_grad_sq(u) + p.alpha * h_spec + p.beta * lr;
    rep.record(seed, -detail::rel_gap(gu_u, assembled), tol, "<G(u),u> assembled");

    std::mt19937_64 rng(seed);
    SamplerOptions raw = s.sampler;
    SpectralField w = detail::random_coefficients(g, g.dim(), rng, raw);
    const double wn = norm_H(w);
    if (wn > 0.0) {
      const SpectralField pw = leray_project(w);
      SpectralField ppw = leray_project(pw);
      ppw -= pw;
      rep.record(seed, -norm_H(ppw) / wn, 1e-13, "Leray idempotent");
      SpectralField rest = w;
      rest -= pw;
      rep.record(seed, -std::abs(duality_pairing(pw, rest)) / (wn * wn), 1e-12, "Leray orthogonal");
    }
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Monotonicity

/// <G(u)-G(v),u-v> + rho ||u-v||^2 - (mu/2) ||grad(u-v)||^2 >= 0 for r > 3.
inline CheckReport check_monotonicity_r_gt_3(const VerifySettings& s) {
  auto rep = detail::start("monotonicity_r_gt_3", s.tol("monotonicity_r_gt_3", 1e-9), s);
  const CbfParams& p = s.params;
  try {
    p.validate();
    if (!(p.r > 3.0)) throw RegimeError("monotonicity_r_gt_3: requires r > 3, got r = " + std::to_string(p.r));
  } catch (const Error& e) {
    rep.fail_with_error(e.what());
    return rep;
  }
  const double rho = rho_constant(p, s.rho_formula).value;
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    SpectralField w = u;
    w -= v;
    SpectralField dg = op_G(u, p);
    dg -= op_G(v, p);
    const double pairing = duality_pairing(dg, w);
    const double shift = rho * norm_H_sq(w);
    const double visc = 0.5 * p.mu * seminorm_grad_sq(w);
    const double scale = std::abs(pairing) + shift + visc;
    rep.record(detail::seed_of(s, i), detail::slack(pairing + shift, visc, scale), "shifted monotonicity");
  }
  rep.message = "rho = " + std::to_string(rho);
  rep.finalize();
  return rep;
}

/// r = 3: <G(u)-G(v),u-v> >= (1/2)(beta - 1/(2 mu)) ||v (u-v)||^2 when 2 beta mu >= 1.
inline CheckReport check_monotonicity_r3(const VerifySettings& s) {
  auto rep = detail::start("monotonicity_r3", s.tol("monotonicity_r3", 1e-9), s);
  const CbfParams& p = s.params;
  try {
    p.validate();
    if (p.r != 3.0) throw RegimeError("monotonicity_r3: requires r = 3, got r = " + std::to_string(p.r));
  } catch (const Error& e) {
    rep.fail_with_error(e.what());
    return rep;
  }
  rep.exploratory = 2.0 * p.beta * p.mu < 1.0;
  const double coef = 0.5 * (p.beta - 1.0 / (2.0 * p.mu));
  const auto sampler = detail::make_sampler(s);
  const auto& g = s.grid;
  for (long i = 0; i < s.samples; ++i) {
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    SpectralField w = u;
    w -= v;
    SpectralField dg = op_G(u, p);
    dg -= op_G(v, p);
    const double pairing = duality_pairing(dg, w);
    const auto V = magnitude(to_physical(v));
    const auto Wm = magnitude(to_physical(w));
    const double weighted = detail::quad(g, [&](std::size_t k) { return V[k] * V[k] * Wm[k] * Wm[k]; });
    const double bound = coef * weighted;
    rep.record(detail::seed_of(s, i), detail::slack(pairing, bound, std::abs(pairing) + std::abs(bound)),
               "critical monotonicity");
  }
  if (rep.exploratory) rep.message = "2*beta*mu < 1: margins reported only";
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Damping operator estimates

namespace detail {

inline std::array<double, 3> phi(const std::array<double, 3>& y, double r) {
  const double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
  const double w = safe_pow(n, r - 1.0);
  if (n == 0.0) return {0.0, 0.0, 0.0};
  return {w * y[0], w * y[1], w * y[2]};
}

inline double norm3(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

inline std::array<double, 3> sub3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline std::array<double, 3> at(const PhysicalField& f, std::size_t k) {
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (int c = 0; c < f.components(); ++c) y[static_cast<std::size_t>(c)] = f[c][k];
  return y;
}

}  // namespace detail

/// Strong monotonicity of C with quadrature right side, its non-negative consequence,
/// and the pointwise inequality on random vector pairs.
inline CheckReport check_c_monotone(const VerifySettings& s) {
  auto rep = detail::start("c_monotone", s.tol("c_monotone", 1e-9), s);
  const double r = s.params.r;
  if (!(r >= 1.0)) {
    rep.fail_with_error("c_monotone: r must be >= 1");
    return rep;
  }
  const auto sampler = detail::make_sampler(s);
  const auto& g = s.grid;
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    SpectralField w = u;
    w -= v;
    SpectralField dc = op_C(u, r);
    dc -= op_C(v, r);
    const double lhs = duality_pairing(dc, w);
    const auto U = magnitude(to_physical(u)), V = magnitude(to_physical(v)), Wm = magnitude(to_physical(w));
    const double rhs = 0.5 * detail::quad(g, [&](std::size_t k) {
      return (detail::safe_pow(U[k], r - 1.0) + detail::safe_pow(V[k], r - 1.0)) * Wm[k] * Wm[k];
    });
    const double scale = std::abs(lhs) + rhs;
    rep.record(seed, detail::slack(lhs, rhs, scale), "strong monotonicity");
    rep.record(seed, detail::slack(lhs, 0.0, scale), "non-negativity");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> logmag(-3.0, 3.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
      std::array<double, 3> y{0, 0, 0}, z{0, 0, 0};
      const double sy = std::exp(logmag(rng)), sz = std::exp(logmag(rng));
      for (int d = 0; d < g.dim(); ++d) {
        y[static_cast<std::size_t>(d)] = sy * normal(rng);
        z[static_cast<std::size_t>(d)] = sz * normal(rng);
      }
      const auto diff = detail::sub3(y, z);
      const double dd = detail::dot3(diff, diff);
      const double l = detail::dot3(detail::sub3(detail::phi(y, r), detail::phi(z, r)), diff);
      const double ny = detail::norm3(y), nz = detail::norm3(z);
      const double rr = 0.5 * (detail::safe_pow(ny, r - 1.0) + detail::safe_pow(nz, r - 1.0)) * dd;
      const double sc = (detail::safe_pow(ny, r) + detail::safe_pow(nz, r)) * std::sqrt(dd) + rr;
      worst = std::min(worst, detail::slack(l, rr, sc));
    }
    rep.record(seed, worst, "pointwise strong monotonicity");
  }
  rep.finalize();
  return rep;
}

/// <C(u)-C(v),u-v> <= r (||u||_{r+1} + ||v||_{r+1})^{r-1} ||u-v||_{r+1}^2.
inline CheckReport check_c_lipschitz(const VerifySettings& s) {
  auto rep = detail::start("c_lipschitz", s.tol("c_lipschitz", 1e-9), s);
  const double r = s.params.r;
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    SpectralField w = u;
    w -= v;
    SpectralField dc = op_C(u, r);
    dc -= op_C(v, r);
    const double lhs = duality_pairing(dc, w);
    const double nu = norm_Lp(u, r + 1.0), nv = norm_Lp(v, r + 1.0), nw = norm_Lp(w, r + 1.0);
    const double rhs = r * std::pow(nu + nv, r - 1.0) * nw * nw;
    rep.record(detail::seed_of(s, i), detail::slack(rhs, lhs, rhs + std::abs(lhs)), "local Lipschitz");
  }
  rep.finalize();
  return rep;
}

/// max_x [ ||y|^{r-1}y - |z|^{r-1}z| - r (|y|+|z|)^{r-1} |y-z| ] <= 0 with y = u(x), z = v(x).
inline CheckReport check_mvt(const VerifySettings& s) {
  auto rep = detail::start("mvt", s.tol("mvt", 1e-9), s);
  const double r = s.params.r;
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    const auto up = to_physical(u), vp = to_physical(v);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < up.size(); ++k) {
      const auto y = detail::at(up, k), z = detail::at(vp, k);
      const double lhs = detail::norm3(detail::sub3(detail::phi(y, r), detail::phi(z, r)));
      const double rhs = r * detail::safe_pow(detail::norm3(y) + detail::norm3(z), r - 1.0) *
                         detail::norm3(detail::sub3(y, z));
      if (lhs + rhs > 0.0) worst = std::min(worst, detail::slack(rhs, lhs, lhs + rhs));
    }
    rep.record(detail::seed_of(s, i), worst, "pointwise mean value bound");
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Identity for int (-Lap u).|u|^{r-1}u and the accompanying chain

struct IdentityForms {
  double direct = 0.0;       // int (-Lap u).|u|^{r-1} u
  double weighted = 0.0;     // int |grad u|^2 |u|^{r-1}
  double power_form = 0.0;   // weighted + 4(r-1)/(r+1)^2 int |grad |u|^{(r+1)/2}|^2
  double square_form = std::numeric_limits<double>::quiet_NaN();  // weighted + (r-1)/4 int |u|^{r-3}|grad |u|^2|^2
  double c_au = 0.0;         // <C(u), A u>
};

/// Evaluates the three forms; |u|^{(r+1)/2} is differentiated on a grid `upsample` times finer.
inline IdentityForms identity_forms(const SpectralField& u, double r, int refine) {
  const auto& g = u.grid();
  IdentityForms f;
  const PhysicalField up = to_physical(u);
  const auto mag = magnitude(up);
  const PhysicalField lap = to_physical(laplacian(u));
  const auto grads = detail::physical_gradient(u);

  f.direct = detail::quad(g, [&](std::size_t k) {
    double dot = 0.0;
    for (int c = 0; c < up.components(); ++c) dot += -lap[c][k] * up[c][k];
    return dot * detail::safe_pow(mag[k], r - 1.0);
  });
  std::vector<double> grad2(g.size(), 0.0);
  for (const auto& d : grads)
    for (int c = 0; c < d.components(); ++c)
      for (std::size_t k = 0; k < g.size(); ++k) grad2[k] += d[c][k] * d[c][k];
  f.weighted = detail::quad(g, [&](std::size_t k) { return grad2[k] * detail::safe_pow(mag[k], r - 1.0); });

  // |u|^{(r+1)/2} on the refined grid, differentiated spectrally.
  {
    const SpectralField fine_u = upsample(u, refine);
    const auto& fg = fine_u.grid();
    const auto fmag = magnitude(to_physical(fine_u));
    PhysicalField gfield = PhysicalField::scalar(fg);
    for (std::size_t k = 0; k < fg.size(); ++k) gfield[0][k] = detail::safe_pow(fmag[k], 0.5 * (r + 1.0));
    const PhysicalField dg = to_physical(gradient_scalar(to_spectral(gfield)));
    double acc = 0.0;
    for (int c = 0; c < dg.components(); ++c)
      for (std::size_t k = 0; k < fg.size(); ++k) acc += dg[c][k] * dg[c][k];
    f.power_form = f.weighted + 4.0 * (r - 1.0) / ((r + 1.0) * (r + 1.0)) * acc * fg.cell_volume();
  }

  if (r == 1.0) {
    f.square_form = f.weighted;
  } else if (r >= 3.0) {
    PhysicalField sq = PhysicalField::scalar(g);
    for (std::size_t k = 0; k < g.size(); ++k) sq[0][k] = mag[k] * mag[k];
    const PhysicalField dsq = to_physical(gradient_scalar(to_spectral(sq)));
    const double extra = detail::quad(g, [&](std::size_t k) {
      double d2 = 0.0;
      for (int c = 0; c < dsq.components(); ++c) d2 += dsq[c][k] * dsq[c][k];
      return detail::safe_pow(mag[k], r - 3.0) * d2;
    });
    f.square_form = f.weighted + 0.25 * (r - 1.0) * extra;
  }

  f.c_au = duality_pairing(op_C(u, r), op_A(u));
  return f;
}

/// Pairwise agreement of the three forms (relative) and 0 <= W <= <C(u),Au> <= r W.
inline CheckReport check_identity_3(const VerifySettings& s) {
  const double tol = s.tol("identity_3", 1e-6);
  auto rep = detail::start("identity_3", tol, s);
  const double r = s.params.r;
  if (!(r >= 1.0)) {
    rep.fail_with_error("identity_3: r must be >= 1");
    return rep;
  }
  const TorusGrid grid(s.grid.dim(), s.identity_n_points, s.grid.period());
  const FieldSampler sampler(grid, s.seed, s.sampler);
  const double chain_tol = 1e-9;
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    const auto f = identity_forms(sampler.sample(static_cast<std::uint64_t>(i)), r, s.identity_upsample);
    auto rel = [](double a, double b) {
      const double m = std::max(std::abs(a), std::abs(b));
      return m == 0.0 ? 0.0 : std::abs(a - b) / m;
    };
    rep.record(seed, -rel(f.direct, f.power_form), tol, "direct vs power form");
    if (!std::isnan(f.square_form)) {
      rep.record(seed, -rel(f.direct, f.square_form), tol, "direct vs square form");
      rep.record(seed, -rel(f.power_form, f.square_form), tol, "power vs square form");
    }
    const double scale = (1.0 + r) * std::abs(f.weighted) + std::abs(f.c_au);
    rep.record(seed, detail::slack(f.weighted, 0.0, scale), chain_tol, "weighted >= 0");
    rep.record(seed, detail::slack(f.c_au, f.weighted, scale), chain_tol, "<C(u),Au> >= weighted");
    rep.record(seed, detail::slack(r * f.weighted, f.c_au, scale), chain_tol, "<C(u),Au> <= r weighted");
  }
  if (r > 1.0 && r < 3.0) rep.message = "square form skipped for 1 < r < 3";
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Lebesgue interpolation and bounds on B

/// ||u||_rho <= ||u||_s^theta ||u||_t^{1-theta}, 1/rho = theta/s + (1-theta)/t.
inline CheckReport check_interpolation(const VerifySettings& s) {
  auto rep = detail::start("interpolation", s.tol("interpolation", 1e-9), s);
  const double ls = s.interp_s, lr = s.interp_rho, lt = s.interp_t;
  if (!(1.0 <= ls && ls <= lr && lr <= lt && std::isfinite(lt))) {
    rep.fail_with_error("interpolation: exponents must satisfy 1 <= s <= rho <= t < inf");
    return rep;
  }
  const double theta = ls == lt ? 1.0 : (1.0 / lr - 1.0 / lt) / (1.0 / ls - 1.0 / lt);
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    const PhysicalField u = to_physical(sampler.sample(static_cast<std::uint64_t>(i)));
    const double lhs = norm_Lp(u, lr);
    const double rhs = std::pow(norm_Lp(u, ls), theta) * std::pow(norm_Lp(u, lt), 1.0 - theta);
    rep.record(detail::seed_of(s, i), detail::slack(rhs, lhs, rhs + lhs), "interpolation");
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "(s, rho, t) = (%g, %g, %g), theta = %.6g", ls, lr, lt, theta);
  rep.message = buf;
  rep.finalize();
  return rep;
}

/// ||B(u,v)||_{V'} <= ||u||_{r+1} ||v||_{2(r+1)/(r-1)}, the Hoelder bound on b, and for r > 3
/// |<B(u,u),v>| <= ||u||_{r+1}^{(r+1)/(r-1)} ||u||_H^{(r-3)/(r-1)} ||grad v||.
inline CheckReport check_b_bounds(const VerifySettings& s) {
  auto rep = detail::start("b_bounds", s.tol("b_bounds", 1e-8), s);
  const double r = s.params.r;
  if (!(r >= 3.0)) {
    rep.fail_with_error("b_bounds: requires r >= 3, got r = " + std::to_string(r));
    return rep;
  }
  const double q = 2.0 * (r + 1.0) / (r - 1.0);
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    auto [u, v, w] = sampler.triple(static_cast<std::uint64_t>(i));
    const double nb = norm_V_dual(op_B(u, v));
    const double holder = norm_Lp(u, r + 1.0) * norm_Lp(v, q);
    rep.record(seed, detail::slack(holder, nb, holder + nb), "||B(u,v)||_V' bound");

    const double b = std::abs(trilinear_b(u, v, w));
    const double hb = holder * seminorm_grad(w);
    rep.record(seed, detail::slack(hb, b, hb + b), "|b(u,v,w)| Hoelder bound");

    if (r > 3.0) {
      const double lhs = std::abs(duality_pairing(op_B(u), v));
      const double rhs = std::pow(norm_Lp(u, r + 1.0), (r + 1.0) / (r - 1.0)) *
                         std::pow(norm_H(u), (r - 3.0) / (r - 1.0)) * seminorm_grad(v);
      rep.record(seed, detail::slack(rhs, lhs, rhs + lhs), "|<B(u),v>| bound");
    }
  }
  rep.finalize();
  return rep;
}

/// Young-type bounds on |<B(w,w),v>| with w = u - v used inside the monotonicity proofs.
inline CheckReport check_local_b_bounds(const VerifySettings& s) {
  auto rep = detail::start("local_b_bounds", s.tol("local_b_bounds", 1e-9), s);
  const CbfParams& p = s.params;
  const double r = p.r;
  if (!(r >= 3.0)) {
    rep.fail_with_error("local_b_bounds: requires r >= 3, got r = " + std::to_string(r));
    return rep;
  }
  const bool ladyzhenskaya = s.grid.dim() == 2 && r == 3.0;
  const double rho = r > 3.0 ? rho_constant(p, s.rho_formula).value : 0.0;
  const auto sampler = detail::make_sampler(s);
  const auto& g = s.grid;
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    auto [u, v] = sampler.pair(static_cast<std::uint64_t>(i));
    SpectralField w = u;
    w -= v;
    const double lhs = std::abs(trilinear_b(w, w, v));
    const double sem = seminorm_grad_sq(w);
    const double h = norm_H_sq(w);
    const auto V = magnitude(to_physical(v));
    const auto Wm = magnitude(to_physical(w));
    const double vw = detail::quad(g, [&](std::size_t k) { return detail::safe_pow(V[k], r - 1.0) * Wm[k] * Wm[k]; });

    if (r > 3.0 && p.beta > 0.0) {
      const double rhs = 0.5 * p.mu * sem + 0.5 * p.beta * vw + rho * h;
      rep.record(seed, detail::slack(rhs, lhs, rhs + lhs), "shifted Young bound");
    }
    const double rhs2 = p.mu * sem + (vw + h) / (4.0 * p.mu);
    rep.record(seed, detail::slack(rhs2, lhs, rhs2 + lhs), "mu-weighted Young bound");
    if (ladyzhenskaya) {
      const double v4 = norm_Lp_pow(to_physical(v), 4.0);
      const double rhs3 = 0.5 * p.mu * sem + 27.0 / (16.0 * std::pow(p.mu, 3)) * v4 * h;
      rep.record(seed, detail::slack(rhs3, lhs, rhs3 + lhs), "Ladyzhenskaya bound");
    }
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Spectral filter

/// ||P u|| <= ||u||, residual ||(I-P)u|| non-increasing in n, final residual <= (Lambda/n) ||u||.
inline CheckReport check_filter(const VerifySettings& s) {
  auto rep = detail::start("filter", s.tol("filter", 1e-12), s);
  const auto& ns = s.filter_n;
  if (ns.empty() || !std::is_sorted(ns.begin(), ns.end()) ||
      std::adjacent_find(ns.begin(), ns.end()) != ns.end() || !(ns.front() > 0.0)) {
    rep.fail_with_error("filter: n values must be positive and strictly increasing");
    return rep;
  }
  const auto sampler = detail::make_sampler(s);
  for (long i = 0; i < s.samples; ++i) {
    const auto seed = detail::seed_of(s, i);
    const SpectralField u = sampler.sample(static_cast<std::uint64_t>(i));
    const double nu = norm_H(u);
    if (nu == 0.0) continue;
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (double n : ns) {
      const SpectralField pu = exp_filter(u, n);
      SpectralField res = u;
      res -= pu;
      const double rn = norm_H(res);
      rep.record(seed, (nu - norm_H(pu)) / nu, "non-expansive");
      if (std::isfinite(prev)) rep.record(seed, (prev - rn) / nu, "residual non-increasing");
      prev = rn;
      last = rn;
    }
    const double lambda = max_k_squared(u);
    const double bound = lambda / ns.back() * nu;
    rep.record(seed, (bound - last) / nu, "residual <= (Lambda/n)||u||");
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Groenwall envelopes on synthetic trajectories

namespace detail {

/// Classical RK4 for y' = rhs(t, y) returning y at each node of t (with `sub` inner steps).
template <typename Rhs>
std::vector<double> rk4(double y0, const std::vector<double>& t, int sub, Rhs&& rhs) {
  std::vector<double> y(t.size());
  y[0] = y0;
  double cur = y0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = (t[i] - t[i - 1]) / sub;
    double tt = t[i - 1];
    for (int k = 0; k < sub; ++k) {
      const double k1 = rhs(tt, cur);
      const double k2 = rhs(tt + 0.5 * h, cur + 0.5 * h * k1);
      const double k3 = rhs(tt + 0.5 * h, cur + 0.5 * h * k2);
      const double k4 = rhs(tt + h, cur + h * k3);
      cur += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      tt += h;
    }
    y[i] = cur;
  }
  return y;
}

}  // namespace detail

/// Envelopes against ODE sub-solutions, plus the alpha = 0 reduction of the nonlinear lemma.
inline CheckReport check_gronwall(const VerifySettings& s) {
  auto rep = detail::start("gronwall", s.tol("gronwall", 1e-8), s);
  const long runs = std::min<long>(s.samples, 20);
  rep.samples = runs;
  const int nodes = 2001;
  std::vector<double> t(nodes);
  for (int i = 0; i < nodes; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (nodes - 1);
  for (long i = 0; i < runs; ++i) {
    const auto seed = detail::seed_of(s, i);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.2, 2.0);
    const double p1 = uni(rng), p2 = uni(rng), p3 = uni(rng), w1 = 3.0 * uni(rng), w2 = 3.0 * uni(rng);
    const double a0 = uni(rng);
    auto f1 = [&](double x) { return p1 * (1.0 + std::sin(w1 * x)); };
    auto f2 = [&](double x) { return p2 * (1.0 + std::cos(w2 * x)); };
    auto f = [&](double x) { return p3 * std::pow(std::sin(w2 * x), 2); };

    // y' + f = f1 + f2 y
    const auto y = detail::rk4(a0, t, 4, [&](double x, double yy) { return f1(x) + f2(x) * yy - f(x); });
    std::vector<double> F1(t.size()), F2(t.size()), Fs(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      F1[k] = f1(t[k]);
      F2[k] = f2(t[k]);
      Fs[k] = f(t[k]);
    }
    const auto env = gronwall_envelope(a0, F1, F2, t);
    const auto intf = cumulative_trapezoid(Fs, t);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.size(); ++k) worst = std::min(worst, (env[k] - y[k] - intf[k]) / env[k]);
    rep.record(seed, worst, "linear envelope");

    // y' = a y + b y^alpha / 2 <= a y + b y^alpha
    const double alpha = 0.5;
    const auto yn = detail::rk4(a0, t, 4, [&](double x, double yy) {
      return f2(x) * yy + 0.5 * f1(x) * std::pow(std::max(yy, 0.0), alpha);
    });
    const auto envn = nonlinear_gronwall_envelope(a0, F2, F1, alpha, t);
    worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t.size(); ++k) worst = std::min(worst, (envn[k] - yn[k]) / envn[k]);
    rep.record(seed, worst, "nonlinear envelope");

    // alpha = 0 with a = 0 or b = 0 coincides with the linear lemma.
    const std::vector<double> zero(t.size(), 0.0);
    for (int which = 0; which < 2; ++which) {
      const auto& A = which == 0 ? zero : F2;
      const auto& B = which == 0 ? F1 : zero;
      const auto nl = nonlinear_gronwall_envelope(a0, A, B, 0.0, t);
      const auto lin = gronwall_envelope(a0, B, A, t);
      double gap = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) gap = std::max(gap, std::abs(nl[k] - lin[k]) / lin[k]);
      rep.record(seed, -gap, 1e-10, which == 0 ? "alpha = 0, a = 0 reduction" : "alpha = 0, b = 0 reduction");
    }
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Operator continuity

/// ||G(u + eps w) - G(u)||_H shrinks at first order as eps -> 0.
/// eps starts at 1e-2: at 1e-1 the quadratic remainder still bends the slope for large r = 5 samples.
inline CheckReport check_g_continuity(const VerifySettings& s) {
  auto rep = detail::start("g_continuity", s.tol("g_continuity", 0.1), s);
  const auto sampler = detail::make_sampler(s);
  const CbfParams& p = s.params;
  const std::array<double, 4> eps{1e-2, 1e-3, 1e-4, 1e-5};
  for (long i = 0; i < s.samples; ++i) {
    auto [u, w] = sampler.pair(static_cast<std::uint64_t>(i));
    const SpectralField gu = op_G(u, p);
    std::array<double, 4> d{};
    for (std::size_t k = 0; k < eps.size(); ++k) {
      SpectralField up = u;
      up.axpy(eps[k], w);
      SpectralField diff = op_G(up, p);
      diff -= gu;
      d[k] = norm_H(diff);
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
      const double order = std::log(d[k] / d[k + 1]) / std::log(eps[k] / eps[k + 1]);
      worst = std::min(worst, order - 1.0);
    }
    rep.record(detail::seed_of(s, i), worst, "first-order continuity");
  }
  rep.message = "margin = observed order - 1";
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Trajectory bounds

/// Energy bound checked at every sample:
///   |u(t)|^2 + mu int |grad u|^2 + 2 beta int |u|_{r+1}^{r+1} <= |u0|^2 + (1/mu) int |f|_{V'}^2.
inline CheckReport check_apriori_bound(const std::vector<DiagnosticsSample>& diag, const CbfParams& p,
                                       double tol = 1e-6) {
  CheckReport rep("apriori", tol);
  rep.samples = static_cast<long>(diag.size());
  if (diag.empty()) {
    rep.fail_with_error("apriori: no diagnostics");
    return rep;
  }
  const double e0 = diag.front().energy;
  for (std::size_t k = 0; k < diag.size(); ++k) {
    const auto& d = diag[k];
    const double lhs = d.energy + p.mu * d.int_dissipation + 2.0 * p.beta * d.int_damping;
    const double rhs = apriori_bound(e0, p, d.int_forcing_vdual_sq);
    rep.record(k, rhs == 0.0 && lhs == 0.0 ? 0.0 : (rhs - lhs) / rhs, "a-priori energy bound");
  }
  rep.message = "worst_case_seed is the sample index";
  rep.finalize();
  return rep;
}

/// Default weight for the r = 3 regularity estimate; needs mu - 1/(2 theta) > 0 and beta >= theta.
inline double default_theta(const CbfParams& p) {
  const double cap = std::min(p.beta, 1.0);
  const double preferred = 1.0 / (2.0 * p.mu) + 1e-6;
  return preferred <= cap ? preferred : cap / (1.0 + 1e-6);
}

/// H^1 regularity bound at every sample (needs extended diagnostics).
///   r > 3: |grad u|^2 + mu int |Au|^2 + beta int W <= (|grad u0|^2 + (2/mu) int |f|^2) e^{rho* t}
///   r = 3: |grad u|^2 + (mu - 1/(2 theta)) int |Au|^2 + (beta - theta) int W <= |grad u0|^2 + (2/mu) int |f|^2
/// with W = int |u|^{r-1} |grad u|^2.
inline CheckReport check_regularity_bound(const std::vector<DiagnosticsSample>& diag, const CbfParams& p,
                                          std::optional<double> theta = std::nullopt, double tol = 1e-6) {
  CheckReport rep("regularity", tol);
  rep.samples = static_cast<long>(diag.size());
  if (diag.empty()) {
    rep.fail_with_error("regularity: no diagnostics");
    return rep;
  }
  for (const auto& d : diag) {
    if (!d.extended || std::isnan(d.int_weighted_grad)) {
      throw ConfigError("regularity check needs extended diagnostics", "output.extended_diagnostics", 0, 0);
    }
  }
  if (p.r < 3.0) {
    rep.fail_with_error("regularity: no bound for r < 3 (r = " + std::to_string(p.r) + ")");
    return rep;
  }
  const double g0 = diag.front().v_seminorm_sq;
  if (p.r > 3.0) {
    const double rs = rho_star_constant(p);
    for (std::size_t k = 0; k < diag.size(); ++k) {
      const auto& d = diag[k];
      const double lhs = d.v_seminorm_sq + p.mu * d.int_a_norm_sq + p.beta * d.int_weighted_grad;
      const double base = g0 + 2.0 / p.mu * d.int_forcing_h_sq;
      double rhs = base * std::exp(rs * d.t);
      if (std::isnan(rhs)) rhs = std::numeric_limits<double>::infinity();
      double margin;
      if (std::isinf(rhs)) margin = 1.0;
      else if (rhs == 0.0) margin = lhs == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
      else margin = (rhs - lhs) / rhs;
      rep.record(k, margin, "regularity bound");
    }
    rep.message = "rho* = " + std::to_string(rs) + (std::isinf(rs) ? " (beta = 0: bound is vacuous)" : "");
  } else {
    const double th = theta.value_or(default_theta(p));
    rep.exploratory = 2.0 * p.beta * p.mu < 1.0;
    const double ca = p.mu - 1.0 / (2.0 * th);
    const double cw = p.beta - th;
    for (std::size_t k = 0; k < diag.size(); ++k) {
      const auto& d = diag[k];
      const double lhs = d.v_seminorm_sq + ca * d.int_a_norm_sq + cw * d.int_weighted_grad;
      const double rhs = g0 + 2.0 / p.mu * d.int_forcing_h_sq;
      const double margin = rhs == 0.0 ? (lhs <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity())
                                       : (rhs - lhs) / rhs;
      rep.record(k, margin, "critical regularity bound");
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "theta = %.8g, coefficients (%.3g, %.3g)", th, ca, cw);
    rep.message = buf;
  }
  rep.finalize();
  return rep;
}

namespace detail {

inline SpectralField trajectory_ic(const VerifySettings& s) {
  if (s.trajectory_ic == "taylor_green") return taylor_green(s.grid, s.sampler.amplitude);
  if (s.trajectory_ic == "random") return make_sampler(s).sample(0);
  throw InvalidArgumentError("verify: unknown trajectory ic '" + s.trajectory_ic + "'");
}

}  // namespace detail

/// Two trajectories from u0 and u0 + delta0 advanced in lockstep; |delta(t)|^2 stays below
/// |delta0|^2 e^{2 rho t} (r > 3) or is non-increasing (r = 3, 2 beta mu >= 1).
inline CheckReport check_continuous_dependence(const CbfParams& p, const SolverConfig& cfg, const SpectralField& ic,
                                               const SpectralField& perturbation, const ForcingSpec& forcing,
                                               double tol = 1e-6, RhoFormula formula = RhoFormula::standard) {
  CheckReport rep("continuous_dependence", tol);
  const auto regime = monotonicity_regime(p);
  rep.exploratory = regime == MonotonicityRegime::critical_weak || regime == MonotonicityRegime::subcritical;
  const double rho = regime == MonotonicityRegime::shifted ? rho_constant(p, formula).value : 0.0;

  SpectralField ic2 = ic;
  ic2 += perturbation;
  SolverConfig c = cfg;
  c.extended_diagnostics = false;
  SimulationState a = initial_state(ic, p, c, forcing);
  SimulationState b = initial_state(ic2, p, c, forcing);
  auto dist = [&] {
    SpectralField d = b.u;
    d -= a.u;
    return norm_H_sq(d);
  };
  const double d0 = dist();
  const long n = step_count(0.0, c.t_end, c.dt);
  const double dt = n > 0 ? c.t_end / static_cast<double>(n) : c.dt;
  double prev = d0;
  rep.samples = n + 1;
  rep.record(0, 0.0, "initial distance");
  for (long k = 1; k <= n; ++k) {
    a = step(std::move(a), p, c, forcing, dt);
    b = step(std::move(b), p, c, forcing, dt);
    const double d = dist();
    if (regime == MonotonicityRegime::shifted) {
      const double env = d0 * std::exp(2.0 * rho * a.t);
      rep.record(static_cast<std::uint64_t>(k), env == 0.0 ? (d == 0.0 ? 0.0 : -1.0) : (env - d) / env, "exponential envelope");
    } else {
      rep.record(static_cast<std::uint64_t>(k), prev == 0.0 ? (d == 0.0 ? 0.0 : -1.0) : (prev - d) / prev,
                 "distance non-increasing");
    }
    prev = d;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "|delta0|^2 = %.6e, |delta(T)|^2 = %.6e, rho = %.6g; worst_case_seed is the step index",
                d0, prev, rho);
  rep.message = buf;
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Dispatch

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "trilinear",      "operator_identities", "monotonicity_r_gt_3", "monotonicity_r3",
      "c_monotone",     "c_lipschitz",         "mvt",                 "identity_3",
      "interpolation",  "b_bounds",            "local_b_bounds",      "filter",
      "gronwall",       "g_continuity",        "continuous_dependence", "regularity",
      "apriori"};
  return names;
}

inline bool is_check_name(const std::string& n) {
  const auto& all = check_names();
  return std::find(all.begin(), all.end(), n) != all.end();
}

/// Runs one named check. Library errors become an ERROR report; nothing propagates except
/// configuration errors, which concern the caller's setup.
inline CheckReport run_check(const std::string& name, const VerifySettings& s) {
  try {
    if (name == "trilinear") return check_trilinear(s);
    if (name == "operator_identities") return check_operator_identities(s);
    if (name == "monotonicity_r_gt_3") return check_monotonicity_r_gt_3(s);
    if (name == "monotonicity_r3") return check_monotonicity_r3(s);
    if (name == "c_monotone") return check_c_monotone(s);
    if (name == "c_lipschitz") return check_c_lipschitz(s);
    if (name == "mvt") return check_mvt(s);
    if (name == "identity_3") return check_identity_3(s);
    if (name == "interpolation") return check_interpolation(s);
    if (name == "b_bounds") return check_b_bounds(s);
    if (name == "local_b_bounds") return check_local_b_bounds(s);
    if (name == "filter") return check_filter(s);
    if (name == "gronwall") return check_gronwall(s);
    if (name == "g_continuity") return check_g_continuity(s);
    if (name == "continuous_dependence") {
      const SpectralField ic = detail::trajectory_ic(s);
      SpectralField delta = FieldSampler(s.grid, s.seed + 1, s.sampler).sample(0);
      delta *= s.perturbation / norm_H(delta);
      auto rep = check_continuous_dependence(s.params, s.solver, ic, delta, s.forcing,
                                             s.tol("continuous_dependence", 1e-6), s.rho_formula);
      return rep;
    }
    if (name == "regularity" || name == "apriori") {
      SolverConfig c = s.solver;
      c.extended_diagnostics = c.extended_diagnostics || name == "regularity";
      const auto result = run(detail::trajectory_ic(s), s.params, c, s.forcing);
      if (name == "regularity") {
        if (!c.extended_diagnostics)
          throw ConfigError("regularity check needs extended diagnostics", "output.extended_diagnostics", 0, 0);
        return check_regularity_bound(result.diagnostics, s.params, s.theta, s.tol("regularity", 1e-6));
      }
      return check_apriori_bound(result.diagnostics, s.params, s.tol("apriori", 1e-6));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    CheckReport rep(name, 0.0);
    rep.fail_with_error(e.what());
    return rep;
  }
  throw InvalidArgumentError("verify: unknown check '" + name + "'");
}

}  // namespace cbf
