#pragma once

#include <cmath>
#include <vector>

#include "cbf/norms.hpp"
#include "cbf/params.hpp"
#include "cbf/spectral.hpp"

namespace cbf {

/// Post-processing applied to pseudo-spectral nonlinear terms.
struct OperatorOptions {
  bool dealias = true;
  bool project = true;
};

namespace detail {

inline SpectralField finish_nonlinear(const PhysicalField& values, const OperatorOptions& opt) {
  SpectralField out = to_spectral(values);
  if (opt.dealias) out = dealias(std::move(out));
  if (opt.project) out = leray_project(std::move(out));
  return out;
}

/// Grid samples of every first derivative: result[j] holds d v / d x_j.
inline std::vector<PhysicalField> physical_gradient(const SpectralField& v) {
  std::vector<PhysicalField> out;
  for (auto& dj : gradient(v)) out.push_back(to_physical(dj));
  return out;
}

inline void require_exponent(double r, const char* what) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw InvalidExponentError(std::string(what) + ": r must be >= 1");
  }
}

}  // namespace detail

/// Stokes operator A u = -Lap u on divergence-free fields.
inline SpectralField op_A(const SpectralField& u) {
  require_divergence_free(u, "op_A");
  const auto& g = u.grid();
  SpectralField out = detail::apply_real_multiplier(u, [&](const Mode& m) { return g.k_squared(m); });
  out.set_divergence_free(true);
  return out;
}

/// Grid samples of (u.grad) v.
inline PhysicalField advection_physical(const PhysicalField& u_phys, const SpectralField& v) {
  require_same_grid(u_phys.grid(), v.grid(), "advection");
  if (!u_phys.is_vector()) throw InvalidFieldError("advection: velocity must be a vector field");
  const int dim = v.grid().dim();
  auto dv = detail::physical_gradient(v);
  PhysicalField out(v.grid(), v.components());
  for (int c = 0; c < v.components(); ++c) {
    auto o = out[c];
    for (int j = 0; j < dim; ++j) {
      auto uj = u_phys[j];
      auto d = dv[static_cast<std::size_t>(j)][c];
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += uj[i] * d[i];
    }
  }
  return out;
}

inline PhysicalField advection_physical(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid(), v.grid(), "advection");
  return advection_physical(to_physical(u), v);
}

/// B(u, v) = P[(u.grad) v], evaluated pseudo-spectrally.
inline SpectralField op_B(const SpectralField& u, const SpectralField& v, const OperatorOptions& opt = {}) {
  require_same_grid(u.grid(), v.grid(), "op_B");
  require_divergence_free(u, "op_B");
  return detail::finish_nonlinear(advection_physical(u, v), opt);
}

inline SpectralField op_B(const SpectralField& u, const OperatorOptions& opt = {}) { return op_B(u, u, opt); }

/// b(u, v, w) = int (u.grad) v . w by grid quadrature.
inline double trilinear_b(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  require_same_grid(u.grid(), v.grid(), "trilinear_b");
  require_same_grid(u.grid(), w.grid(), "trilinear_b");
  return quadrature_pairing(advection_physical(u, v), to_physical(w));
}

/// Pointwise |u|^{r-1} u; zero wherever |u| = 0.
inline PhysicalField damping_physical(const PhysicalField& u, double r) {
  detail::require_exponent(r, "op_C");
  auto mag = magnitude(u);
  PhysicalField out(u.grid(), u.components());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    const double w = mag[i] > 0.0 ? std::pow(mag[i], r - 1.0) : 0.0;
    for (int c = 0; c < u.components(); ++c) out[c][i] = w * u[c][i];
  }
  return out;
}

/// C(u) = P[|u|^{r-1} u].
inline SpectralField op_C(const SpectralField& u, double r, const OperatorOptions& opt = {}) {
  detail::require_exponent(r, "op_C");
  return detail::finish_nonlinear(damping_physical(to_physical(u), r), opt);
}

/// B(u) + beta C(u) sharing one inverse transform of u.
inline SpectralField nonlinear_term(const SpectralField& u, const CbfParams& p, const OperatorOptions& opt = {}) {
  require_divergence_free(u, "nonlinear_term");
  const PhysicalField up = to_physical(u);
  PhysicalField values = advection_physical(up, u);
  if (p.beta != 0.0) values.axpy(p.beta, damping_physical(up, p.r));
  return detail::finish_nonlinear(values, opt);
}

/// G(u) = mu A u + alpha u + B(u) + beta C(u).
inline SpectralField op_G(const SpectralField& u, const CbfParams& p, const OperatorOptions& opt = {}) {
  p.validate();
  SpectralField out = nonlinear_term(u, p, opt);
  const auto& g = u.grid();
  const bool flag = out.divergence_free();
  out += detail::apply_real_multiplier(u, [&](const Mode& m) { return p.mu * g.k_squared(m) + p.alpha; });
  out.set_divergence_free(flag && u.divergence_free());
  return out;
}

/// Mean-zero pressure solving Lap p = div(f - (u.grad)u - beta |u|^{r-1} u).
inline SpectralField recover_pressure(const SpectralField& u, const SpectralField& f, const CbfParams& p) {
  require_same_grid(u.grid(), f.grid(), "recover_pressure");
  require_divergence_free(u, "recover_pressure");
  const PhysicalField up = to_physical(u);
  PhysicalField values = advection_physical(up, u);
  if (p.beta != 0.0) values.axpy(p.beta, damping_physical(up, p.r));
  SpectralField rhs = f;
  rhs -= dealias(to_spectral(values));
  SpectralField div = divergence(rhs);
  const auto& g = u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = g.k_squared(g.mode(i));
    div[0][i] = k2 > 0.0 ? -div[0][i] / k2 : cplx{0.0, 0.0};
  }
  return div;
}

}  // namespace cbf
