#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "cbf/errors.hpp"

namespace cbf {

/// Physical parameters of the damped Navier-Stokes system
///   du/dt - mu Lap u + (u.grad)u + alpha u + beta |u|^{r-1} u + grad p = f.
///
/// beta = 0 is accepted so the plain Navier-Stokes limit can be run.
struct CbfParams {
  double mu = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
  double r = 3.0;

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw InvalidArgumentError("params: mu must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw InvalidArgumentError("params: alpha must be non-negative");
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw InvalidArgumentError("params: beta must be non-negative");
    if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidExponentError("params: r must be >= 1");
  }

  /// r = 3 with 2 beta mu >= 1: G is globally monotone.
  bool critical_regime() const noexcept { return r == 3.0 && 2.0 * beta * mu >= 1.0; }
};

enum class MonotonicityRegime {
  shifted,        // r > 3: G + rho I is monotone
  critical,       // r = 3, 2 beta mu >= 1
  critical_weak,  // r = 3, 2 beta mu < 1: nothing proven
  subcritical,    // r < 3
};

inline MonotonicityRegime monotonicity_regime(const CbfParams& p) {
  if (p.r > 3.0) return MonotonicityRegime::shifted;
  if (p.r == 3.0) return 2.0 * p.beta * p.mu >= 1.0 ? MonotonicityRegime::critical
                                                    : MonotonicityRegime::critical_weak;
  return MonotonicityRegime::subcritical;
}

inline const char* to_string(MonotonicityRegime r) {
  switch (r) {
    case MonotonicityRegime::shifted: return "shifted (r > 3)";
    case MonotonicityRegime::critical: return "critical (r = 3, 2*beta*mu >= 1)";
    case MonotonicityRegime::critical_weak: return "critical (r = 3, 2*beta*mu < 1)";
    case MonotonicityRegime::subcritical: return "subcritical (r < 3)";
  }
  return "unknown";
}

/// Which closed form to use for the monotonicity shift.
enum class RhoFormula {
  standard,     // (r-3)/(2 mu (r-1)) * (2/(beta mu (r-1)))^{2/(r-3)}
  alternative,  // (r-3)/(r-1) * (2/(beta mu (r-1)))^{2/(r-3)}
};

struct RhoValue {
  double value = 0.0;
  MonotonicityRegime regime = MonotonicityRegime::shifted;
};

/// Shift rho making G + rho I monotone for r > 3; zero (with the regime) otherwise.
inline RhoValue rho_constant(const CbfParams& p, RhoFormula formula = RhoFormula::standard) {
  RhoValue out;
  out.regime = monotonicity_regime(p);
  if (p.r <= 3.0) return out;
  if (p.beta == 0.0) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  const double base = std::pow(2.0 / (p.beta * p.mu * (p.r - 1.0)), 2.0 / (p.r - 3.0));
  const double lead = formula == RhoFormula::standard ? (p.r - 3.0) / (2.0 * p.mu * (p.r - 1.0))
                                                      : (p.r - 3.0) / (p.r - 1.0);
  out.value = lead * base;
  return out;
}

/// Growth rate in the H^1 regularity estimate, r > 3. Infinite when beta = 0.
inline double rho_star_constant(const CbfParams& p) {
  if (p.r <= 3.0) {
    throw NotApplicableError("rho_star_constant: requires r > 3, got r = " + std::to_string(p.r));
  }
  if (p.beta == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * (p.r - 3.0) / (p.mu * (p.r - 1.0)) *
         std::pow(4.0 / (p.beta * p.mu * (p.r - 1.0)), 2.0 / (p.r - 3.0));
}

}  // namespace cbf
