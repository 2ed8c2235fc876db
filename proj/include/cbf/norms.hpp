#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cbf/spectral.hpp"

namespace cbf {

namespace detail {

/// L^d sum_k w(k) |c(k)|^2 over all components.
template <typename Weight>
double weighted_sum(const SpectralField& u, Weight&& weight) {
  const auto& g = u.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < u.components(); ++c) s += std::norm(u[c][i]);
    if (s != 0.0) acc += weight(g.mode(i)) * s;
  }
  return acc * g.volume();
}

}  // namespace detail

inline double norm_H_sq(const SpectralField& u) {
  return detail::weighted_sum(u, [](const Mode&) { return 1.0; });
}
inline double norm_H(const SpectralField& u) { return std::sqrt(norm_H_sq(u)); }

/// ||grad u||_H^2
inline double seminorm_grad_sq(const SpectralField& u) {
  const auto& g = u.grid();
  return detail::weighted_sum(u, [&](const Mode& m) { return g.k_squared(m); });
}
inline double seminorm_grad(const SpectralField& u) { return std::sqrt(seminorm_grad_sq(u)); }

/// Full H^1 norm: ||u||_H^2 + ||grad u||_H^2.
inline double norm_V_sq(const SpectralField& u) {
  const auto& g = u.grid();
  return detail::weighted_sum(u, [&](const Mode& m) { return 1.0 + g.k_squared(m); });
}
inline double norm_V(const SpectralField& u) { return std::sqrt(norm_V_sq(u)); }

inline double norm_V_dual_sq(const SpectralField& f) {
  const auto& g = f.grid();
  return detail::weighted_sum(f, [&](const Mode& m) { return 1.0 / (1.0 + g.k_squared(m)); });
}
inline double norm_V_dual(const SpectralField& f) { return std::sqrt(norm_V_dual_sq(f)); }

/// ||A u||_H^2 = ||Laplacian u||_H^2.
inline double norm_A_sq(const SpectralField& u) {
  const auto& g = u.grid();
  return detail::weighted_sum(u, [&](const Mode& m) {
    const double k2 = g.k_squared(m);
    return k2 * k2;
  });
}

/// L^2 pairing int f.u, evaluated as a Plancherel sum.
inline double duality_pairing(const SpectralField& f, const SpectralField& u) {
  f.check_compatible(u, "duality_pairing");
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto a = f[c];
    auto b = u[c];
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] * std::conj(b[i])).real();
  }
  return acc * f.grid().volume();
}

/// Pointwise Euclidean magnitude of a (vector or scalar) sampled field.
inline std::vector<double> magnitude(const PhysicalField& u) {
  std::vector<double> out(u.size(), 0.0);
  for (int c = 0; c < u.components(); ++c) {
    auto v = u[c];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * v[i];
  }
  for (auto& x : out) x = std::sqrt(x);
  return out;
}

/// Grid quadrature int g dx with weight h^d per point.
inline double integrate(const TorusGrid& grid, std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * grid.cell_volume();
}

/// int u.v dx by grid quadrature.
inline double quadrature_pairing(const PhysicalField& u, const PhysicalField& v) {
  u.check_compatible(v, "quadrature_pairing");
  double acc = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    auto a = u[c];
    auto b = v[c];
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  }
  return acc * u.grid().cell_volume();
}

/// ||u||_{L^p}^p by grid quadrature.
inline double norm_Lp_pow(const PhysicalField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidExponentError("norm_Lp: p must lie in [1, inf)");
  auto mag = magnitude(u);
  for (auto& x : mag) x = std::pow(x, p);
  return integrate(u.grid(), mag);
}

inline double norm_Lp(const PhysicalField& u, double p) { return std::pow(norm_Lp_pow(u, p), 1.0 / p); }

inline double norm_Lp_pow(const SpectralField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidExponentError("norm_Lp: p must lie in [1, inf)");
  return norm_Lp_pow(to_physical(u), p);
}

inline double norm_Lp(const SpectralField& u, double p) { return std::pow(norm_Lp_pow(u, p), 1.0 / p); }

/// max_x |u(x)|
inline double max_magnitude(const PhysicalField& u) {
  double m = 0.0;
  for (double x : magnitude(u)) m = std::max(m, x);
  return m;
}

}  // namespace cbf
