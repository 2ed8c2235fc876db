#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cbf/gronwall.hpp"

using namespace cbf;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

std::vector<double> constant(std::size_t n, double v) { return std::vector<double>(n, v); }

}  // namespace

TEST(Trapezoid, ExactForLinearIntegrands) {
  const auto t = linspace(0.0, 2.0, 11);
  std::vector<double> f(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) f[i] = 3.0 * t[i] + 1.0;
  const auto F = cumulative_trapezoid(f, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(F[i], 1.5 * t[i] * t[i] + t[i], 1e-13);
}

TEST(Trapezoid, SecondOrderForSmoothIntegrands) {
  auto err = [](std::size_t n) {
    const auto t = linspace(0.0, 1.0, n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(t[i]);
    return std::abs(cumulative_trapezoid(f, t).back() - (std::exp(1.0) - 1.0));
  };
  EXPECT_NEAR(err(101) / err(201), 4.0, 0.05);
}

TEST(LinearGronwall, ConstantRatesGiveClosedForms) {
  const auto t = linspace(0.0, 1.0, 21);
  const auto zero = constant(t.size(), 0.0);
  const auto env = gronwall_envelope(2.0, zero, constant(t.size(), 0.5), t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(env[i], 2.0 * std::exp(0.5 * t[i]), 1e-13);
  const auto add = gronwall_envelope(2.0, constant(t.size(), 3.0), zero, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(add[i], 2.0 + 3.0 * t[i], 1e-13);
  EXPECT_EQ(env.front(), 2.0);
}

TEST(LinearGronwall, ValidatesInputs) {
  const auto t = linspace(0.0, 1.0, 5);
  const auto z = constant(5, 0.0);
  EXPECT_THROW(gronwall_envelope(-1.0, z, z, t), InvalidArgumentError);
  EXPECT_THROW(gronwall_envelope(1.0, constant(5, -1.0), z, t), InvalidArgumentError);
  EXPECT_THROW(gronwall_envelope(1.0, constant(4, 0.0), z, t), InvalidArgumentError);
  std::vector<double> bad = {0.0, 0.5, 0.5, 0.7, 1.0};
  EXPECT_THROW(gronwall_envelope(1.0, z, z, bad), InvalidArgumentError);
  EXPECT_THROW(gronwall_envelope(1.0, constant(5, NAN), z, t), InvalidArgumentError);
}

TEST(NonlinearGronwall, MatchesExactOdeSolutions) {
  const auto t = linspace(0.0, 1.0, 51);
  const auto n = t.size();
  // y' = 0.7 y
  const auto lin = nonlinear_gronwall_envelope(1.5, constant(n, 0.7), constant(n, 0.0), 0.5, t);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(lin[i], 1.5 * std::exp(0.7 * t[i]), 1e-12);
  // y' = 2 sqrt(y): y = (sqrt(c) + t)^2
  const auto sq = nonlinear_gronwall_envelope(4.0, constant(n, 0.0), constant(n, 2.0), 0.5, t);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sq[i], std::pow(2.0 + t[i], 2.0), 1e-12);
}

TEST(NonlinearGronwall, AlphaZeroReducesToLinearInDegenerateCases) {
  const auto t = linspace(0.0, 1.0, 41);
  const auto n = t.size();
  const auto z = constant(n, 0.0);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 1.0 + std::sin(3.0 * t[i]);
    b[i] = 2.0 + t[i] * t[i];
  }
  const auto nl_b = nonlinear_gronwall_envelope(1.2, z, b, 0.0, t);
  const auto lin_b = gronwall_envelope(1.2, b, z, t);
  const auto nl_a = nonlinear_gronwall_envelope(1.2, a, z, 0.0, t);
  const auto lin_a = gronwall_envelope(1.2, z, a, t);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(nl_b[i], lin_b[i], 1e-12 * lin_b[i]);
    EXPECT_NEAR(nl_a[i], lin_a[i], 1e-12 * lin_a[i]);
  }
}

TEST(NonlinearGronwall, DominatesANumericalSubSolution) {
  const auto t = linspace(0.0, 2.0, 2001);
  const auto n = t.size();
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = 0.5 + 0.5 * std::cos(t[i]);
    b[i] = 1.0 + t[i];
  }
  const double alpha = 0.6, c = 0.3;
  const auto env = nonlinear_gronwall_envelope(c, a, b, alpha, t);
  // RK4 on y' = a y + 0.5 b y^alpha, linear interpolation of the rates.
  auto rhs = [&](std::size_t i, double frac, double y) {
    const double ai = a[i] + frac * (a[i + 1] - a[i]);
    const double bi = b[i] + frac * (b[i + 1] - b[i]);
    return ai * y + 0.5 * bi * std::pow(y, alpha);
  };
  double y = c;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    const double k1 = rhs(i, 0.0, y), k2 = rhs(i, 0.5, y + 0.5 * h * k1), k3 = rhs(i, 0.5, y + 0.5 * h * k2),
                 k4 = rhs(i, 1.0, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    EXPECT_LE(y, env[i + 1]);
  }
}

TEST(NonlinearGronwall, ValidatesInputs) {
  const auto t = linspace(0.0, 1.0, 5);
  const auto z = constant(5, 0.0);
  EXPECT_THROW(nonlinear_gronwall_envelope(1.0, z, z, 1.0, t), InvalidArgumentError);
  EXPECT_THROW(nonlinear_gronwall_envelope(1.0, z, z, -0.1, t), InvalidArgumentError);
  EXPECT_THROW(nonlinear_gronwall_envelope(-1.0, z, z, 0.5, t), InvalidArgumentError);
  EXPECT_THROW(nonlinear_gronwall_envelope(1.0, z, constant(3, 0.0), 0.5, t), InvalidArgumentError);
}
