#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cbf/fft.hpp"
#include "cbf/field.hpp"

namespace cbf {

/// Relative tolerance on |c(k) - conj(c(-k))| accepted by to_physical.
inline constexpr double kHermitianTolerance = 1e-10;

/// Forward transform of grid samples; coefficient k is (1/N) sum_x f(x) e^{-ik.x}.
inline SpectralField to_spectral(const PhysicalField& field) {
  if (!field.all_finite()) throw InvalidFieldError("to_spectral: field has non-finite samples");
  SpectralField out(field.grid(), field.components());
  auto& plan = detail::plan_for(field.grid());
  for (int c = 0; c < field.components(); ++c) plan.forward(field[c], out[c]);
  return out;
}

/// Largest |c(k) - conj(c(-k))| over all components, relative to max |c|.
inline double hermitian_defect(const SpectralField& u) {
  const auto& g = u.grid();
  double defect = 0.0;
  double peak = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    auto coef = u[c];
    for (std::size_t i = 0; i < g.size(); ++i) {
      peak = std::max(peak, std::abs(coef[i]));
      defect = std::max(defect, std::abs(coef[i] - std::conj(coef[g.partner(i)])));
    }
  }
  return peak > 0.0 ? defect / peak : 0.0;
}

/// Inverse transform; rejects coefficient sets without Hermitian symmetry.
inline PhysicalField to_physical(const SpectralField& field) {
  if (!field.all_finite()) throw InvalidFieldError("to_physical: non-finite coefficients");
  const double defect = hermitian_defect(field);
  if (defect > kHermitianTolerance) {
    throw SymmetryViolationError("to_physical: Hermitian symmetry broken (relative defect " +
                                 std::to_string(defect) + ")");
  }
  PhysicalField out(field.grid(), field.components());
  auto& plan = detail::plan_for(field.grid());
  for (int c = 0; c < field.components(); ++c) plan.backward(field[c], out[c]);
  return out;
}

namespace detail {

template <typename Fn>
void for_each_mode(const TorusGrid& g, Fn&& fn) {
  for (std::size_t i = 0; i < g.size(); ++i) fn(i, g.mode(i));
}

/// Multiplies every component by a real mode-dependent factor.
template <typename Fn>
SpectralField apply_real_multiplier(SpectralField u, Fn&& factor) {
  const auto& g = u.grid();
  for_each_mode(g, [&](std::size_t i, const Mode& m) {
    const double f = factor(m);
    for (int c = 0; c < u.components(); ++c) u[c][i] *= f;
  });
  return u;
}

/// i k_axis with the unmatched Nyquist mode along `axis` set to zero.
inline cplx derivative_multiplier(const TorusGrid& g, const Mode& m, int axis) {
  if (m[axis] == g.nyquist()) return {0.0, 0.0};
  return {0.0, g.k0() * m[axis]};
}

inline void require_vector(const SpectralField& u, const char* what) {
  if (!u.is_vector()) throw InvalidFieldError(std::string(what) + ": expected a vector field");
}

}  // namespace detail

/// Helmholtz-Hodge projection: c(k) <- (I - k k^T/|k|^2) c(k); the mean mode is kept.
inline SpectralField leray_project(SpectralField u) {
  detail::require_vector(u, "leray_project");
  const auto& g = u.grid();
  const int dim = g.dim();
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    double m2 = 0.0;
    for (int d = 0; d < dim; ++d) m2 += static_cast<double>(m[d]) * m[d];
    if (m2 == 0.0) return;
    cplx kdotu{0.0, 0.0};
    for (int d = 0; d < dim; ++d) kdotu += static_cast<double>(m[d]) * u[d][i];
    for (int d = 0; d < dim; ++d) u[d][i] -= (static_cast<double>(m[d]) / m2) * kdotu;
  });
  u.set_divergence_free(true);
  return u;
}

/// max_k |k.c(k)| / (|k| ||c||_l2): dimensionless divergence measure.
inline double divergence_ratio(const SpectralField& u) {
  detail::require_vector(u, "divergence_ratio");
  const auto& g = u.grid();
  double total = 0.0;
  for (int c = 0; c < u.components(); ++c)
    for (const auto& v : u[c]) total += std::norm(v);
  if (total == 0.0) return 0.0;
  double worst = 0.0;
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    double m2 = 0.0;
    cplx kdotu{0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d) {
      m2 += static_cast<double>(m[d]) * m[d];
      kdotu += static_cast<double>(m[d]) * u[d][i];
    }
    if (m2 > 0.0) worst = std::max(worst, std::abs(kdotu) / std::sqrt(m2));
  });
  return worst / std::sqrt(total);
}

/// Throws ContractViolationError unless u is a divergence-free vector field.
inline void require_divergence_free(const SpectralField& u, const char* what,
                                    double tolerance = 1e-10) {
  detail::require_vector(u, what);
  if (u.divergence_free()) return;
  const double ratio = divergence_ratio(u);
  if (ratio > tolerance) {
    throw ContractViolationError(std::string(what) + ": input is not divergence-free (ratio " +
                                 std::to_string(ratio) + ")");
  }
}

/// Partial derivatives of a vector field: result[j] holds d u / d x_j.
inline std::vector<SpectralField> gradient(const SpectralField& u) {
  detail::require_vector(u, "gradient");
  const auto& g = u.grid();
  std::vector<SpectralField> out(static_cast<std::size_t>(g.dim()), SpectralField(g, u.components()));
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    for (int j = 0; j < g.dim(); ++j) {
      const cplx ik = detail::derivative_multiplier(g, m, j);
      for (int c = 0; c < u.components(); ++c) out[static_cast<std::size_t>(j)][c][i] = ik * u[c][i];
    }
  });
  return out;
}

/// Gradient of a scalar field as a vector field.
inline SpectralField gradient_scalar(const SpectralField& s) {
  if (s.components() != 1) throw InvalidFieldError("gradient_scalar: expected a scalar field");
  const auto& g = s.grid();
  SpectralField out = SpectralField::vector(g);
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    for (int j = 0; j < g.dim(); ++j) out[j][i] = detail::derivative_multiplier(g, m, j) * s[0][i];
  });
  return out;
}

inline SpectralField divergence(const SpectralField& u) {
  detail::require_vector(u, "divergence");
  const auto& g = u.grid();
  SpectralField out = SpectralField::scalar(g);
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j < g.dim(); ++j) acc += detail::derivative_multiplier(g, m, j) * u[j][i];
    out[0][i] = acc;
  });
  return out;
}

/// Componentwise Laplacian, multiplier -|k|^2 (Nyquist included).
inline SpectralField laplacian(const SpectralField& u) {
  const auto& g = u.grid();
  const bool flag = u.divergence_free();
  auto out = detail::apply_real_multiplier(u, [&](const Mode& m) { return -g.k_squared(m); });
  out.set_divergence_free(flag);
  return out;
}

/// 2/3 rule: zero every coefficient with some |m_i| > floor(n/3).
inline SpectralField dealias(SpectralField u) {
  const auto& g = u.grid();
  const int cut = g.dealias_cutoff();
  const bool flag = u.divergence_free();
  u = detail::apply_real_multiplier(std::move(u), [&](const Mode& m) {
    for (int d = 0; d < g.dim(); ++d)
      if (std::abs(m[d]) > cut) return 0.0;
    return 1.0;
  });
  u.set_divergence_free(flag);
  return u;
}

enum class Truncation { box, ball };

/// Galerkin projection onto the modes in [-n, n]^dim (box) or |m| <= n (ball).
inline SpectralField galerkin_truncate(SpectralField u, int n, Truncation shape = Truncation::box) {
  if (n < 0) throw InvalidArgumentError("galerkin_truncate: n must be >= 0");
  const auto& g = u.grid();
  const bool flag = u.divergence_free();
  u = detail::apply_real_multiplier(std::move(u), [&](const Mode& m) {
    if (shape == Truncation::box) {
      for (int d = 0; d < g.dim(); ++d)
        if (std::abs(m[d]) > n) return 0.0;
      return 1.0;
    }
    long m2 = 0;
    for (int d = 0; d < g.dim(); ++d) m2 += static_cast<long>(m[d]) * m[d];
    return m2 <= static_cast<long>(n) * n ? 1.0 : 0.0;
  });
  u.set_divergence_free(flag);
  return u;
}

/// Eigenspace filter: coefficient scaled by exp(-|k|^2/n) when |k|^2 < n^2, zeroed otherwise.
inline SpectralField exp_filter(SpectralField u, double n) {
  if (!(n > 0.0)) throw InvalidArgumentError("exp_filter: n must be positive");
  const auto& g = u.grid();
  const bool flag = u.divergence_free();
  u = detail::apply_real_multiplier(std::move(u), [&](const Mode& m) {
    const double lambda = g.k_squared(m);
    return lambda < n * n ? std::exp(-lambda / n) : 0.0;
  });
  u.set_divergence_free(flag);
  return u;
}

/// Largest |k|^2 carrying a coefficient above `threshold` times the peak.
inline double max_k_squared(const SpectralField& u, double threshold = 1e-14) {
  const auto& g = u.grid();
  double peak = 0.0;
  for (int c = 0; c < u.components(); ++c)
    for (const auto& v : u[c]) peak = std::max(peak, std::abs(v));
  double lambda = 0.0;
  if (peak == 0.0) return lambda;
  detail::for_each_mode(g, [&](std::size_t i, const Mode& m) {
    for (int c = 0; c < u.components(); ++c)
      if (std::abs(u[c][i]) > threshold * peak) lambda = std::max(lambda, g.k_squared(m));
  });
  return lambda;
}

/// Zero-padded copy on a grid `factor` times finer; the unmatched Nyquist mode is split evenly.
inline SpectralField upsample(const SpectralField& u, int factor) {
  if (factor < 1) throw InvalidArgumentError("upsample: factor must be >= 1");
  const auto& g = u.grid();
  if (factor == 1) return u;
  TorusGrid fine(g.dim(), g.n_points() * factor, g.period());
  SpectralField out(fine, u.components());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Mode m = g.mode(i);
    int nyq_axes = 0;
    for (int d = 0; d < g.dim(); ++d)
      if (m[d] == g.nyquist()) ++nyq_axes;
    // Spread the coefficient over every sign choice of the Nyquist components.
    const int copies = 1 << nyq_axes;
    for (int mask = 0; mask < copies; ++mask) {
      Mode target = m;
      int bit = 0;
      for (int d = 0; d < g.dim(); ++d) {
        if (m[d] != g.nyquist()) continue;
        if (mask & (1 << bit)) target[d] = -m[d];
        ++bit;
      }
      const std::size_t j = fine.flat_index(target);
      for (int c = 0; c < u.components(); ++c) out[c][j] += u[c][i] / static_cast<double>(copies);
    }
  }
  out.set_divergence_free(u.divergence_free());
  return out;
}

}  // namespace cbf
