#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cbf/errors.hpp"

namespace cbf {

namespace detail {

inline void require_time_grid(std::span<const double> t, std::size_t n, const char* what) {
  if (t.size() != n || n == 0) throw InvalidArgumentError(std::string(what) + ": sample and time-grid sizes differ");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidArgumentError(std::string(what) + ": time grid must be increasing");
}

inline void require_non_negative(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!(x >= 0.0)) throw InvalidArgumentError(std::string(what) + ": samples must be non-negative and finite");
}

}  // namespace detail

/// Running trapezoidal integral: out[i] = int_{t0}^{t_i} f.
inline std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> t) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

/// Linear envelope (a + int f1) exp(int f2) at every node.
inline std::vector<double> gronwall_envelope(double a, std::span<const double> f1, std::span<const double> f2,
                                             std::span<const double> t) {
  detail::require_time_grid(t, f1.size(), "gronwall_envelope");
  if (f2.size() != f1.size()) throw InvalidArgumentError("gronwall_envelope: f1 and f2 sizes differ");
  if (!(a >= 0.0)) throw InvalidArgumentError("gronwall_envelope: a must be non-negative");
  detail::require_non_negative(f1, "gronwall_envelope");
  detail::require_non_negative(f2, "gronwall_envelope");
  const auto F1 = cumulative_trapezoid(f1, t);
  const auto F2 = cumulative_trapezoid(f2, t);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = (a + F1[i]) * std::exp(F2[i]);
  return out;
}

/// Envelope for y' <= a y + b y^alpha:
///   {c^{1-alpha} e^{(1-alpha)A(t)} + (1-alpha) int_0^t b(s) e^{(1-alpha)(A(t)-A(s))} ds}^{1/(1-alpha)},
/// evaluated in the factored form e^{(1-alpha)A(t)} (c^{1-alpha} + (1-alpha) int b e^{-(1-alpha)A}).
inline std::vector<double> nonlinear_gronwall_envelope(double c, std::span<const double> a,
                                                       std::span<const double> b, double alpha,
                                                       std::span<const double> t) {
  detail::require_time_grid(t, a.size(), "nonlinear_gronwall_envelope");
  if (b.size() != a.size()) throw InvalidArgumentError("nonlinear_gronwall_envelope: a and b sizes differ");
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InvalidArgumentError("nonlinear_gronwall_envelope: alpha must lie in [0, 1)");
  if (!(c >= 0.0)) throw InvalidArgumentError("nonlinear_gronwall_envelope: c must be non-negative");
  detail::require_non_negative(a, "nonlinear_gronwall_envelope");
  detail::require_non_negative(b, "nonlinear_gronwall_envelope");
  const double q = 1.0 - alpha;
  const auto A = cumulative_trapezoid(a, t);
  std::vector<double> weighted(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) weighted[i] = b[i] * std::exp(-q * A[i]);
  const auto Bw = cumulative_trapezoid(weighted, t);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    out[i] = std::pow(std::exp(q * A[i]) * (std::pow(c, q) + q * Bw[i]), 1.0 / q);
  return out;
}

}  // namespace cbf
