#include <gtest/gtest.h>

#include <cmath>

#include "cbf/operators.hpp"
#include "cbf/sampler.hpp"

using namespace cbf;

namespace {

double diff_norm(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return norm_H(d);
}

SpectralField from_function(const TorusGrid& g, auto fn) {
  auto u = to_spectral(sample_field(g, g.dim(), fn));
  u.set_divergence_free(true);
  return u;
}

SamplerOptions dealiased_band(int band) {
  SamplerOptions opt;
  opt.band_limit = band;
  return opt;
}

}  // namespace

TEST(StokesOperator, TaylorGreenIsAnEigenfunction) {
  TorusGrid g(2, 32);
  auto u = taylor_green(g, 1.5);
  EXPECT_LT(diff_norm(op_A(u), 2.0 * u), 1e-12 * norm_H(u));
}

TEST(StokesOperator, RejectsNonSolenoidalInput) {
  TorusGrid g(2, 16);
  auto u = to_spectral(sample_field(g, 2, [](const auto& x, std::span<double> o) {
    o[0] = std::sin(x[0]);
    o[1] = 0.0;
  }));
  EXPECT_THROW(op_A(u), ContractViolationError);
  EXPECT_THROW(op_B(u), ContractViolationError);
}

TEST(Advection, ConstantVelocityDifferentiates) {
  TorusGrid g(2, 16);
  auto u = from_function(g, [](const auto&, std::span<double> o) {
    o[0] = 1.0;
    o[1] = 0.0;
  });
  auto v = from_function(g, [](const auto& x, std::span<double> o) {
    o[0] = 0.0;
    o[1] = std::sin(x[0]);
  });
  auto expect = from_function(g, [](const auto& x, std::span<double> o) {
    o[0] = 0.0;
    o[1] = std::cos(x[0]);
  });
  EXPECT_LT(diff_norm(op_B(u, v), expect), 1e-12);
}

TEST(Advection, TaylorGreenSelfAdvectionIsAGradient) {
  for (int dim : {2, 3}) {
    TorusGrid g(dim, 16);
    auto u = taylor_green(g, 2.0);
    EXPECT_LT(norm_H(op_B(u)), 1e-12);
    OperatorOptions raw{true, false};
    EXPECT_GT(norm_H(op_B(u, raw)), 1.0);
  }
}

TEST(Trilinear, VanishesOnRepeatedArgumentsAndIsAntisymmetric) {
  for (int dim : {2, 3}) {
    TorusGrid g(dim, dim == 2 ? 32 : 16);
    FieldSampler s(g, 3, dealiased_band(dim == 2 ? 6 : 3));
    for (int i = 0; i < 5; ++i) {
      auto [u, v, w] = s.triple(i);
      const double scale = norm_V(u) * norm_V(v) * norm_V(w);
      EXPECT_LT(std::abs(trilinear_b(u, v, v)), 1e-12 * scale);
      EXPECT_LT(std::abs(trilinear_b(u, v, w) + trilinear_b(u, w, v)), 1e-12 * scale);
    }
  }
}

TEST(Trilinear, AgreesWithProjectedOperatorPairing) {
  TorusGrid g(2, 48);
  FieldSampler s(g, 5, dealiased_band(8));
  auto [u, v, w] = s.triple(0);
  EXPECT_NEAR(duality_pairing(op_B(u, v), w), trilinear_b(u, v, w), 1e-11 * norm_V(u) * norm_V(v) * norm_V(w));
}

TEST(Damping, PairingEqualsLpPower) {
  TorusGrid g(2, 48);
  FieldSampler s(g, 7, dealiased_band(8));
  for (double r : {1.0, 2.5, 3.0, 5.0}) {
    auto u = s.sample(1);
    const double lp = norm_Lp_pow(u, r + 1.0);
    EXPECT_NEAR(duality_pairing(op_C(u, r), u), lp, 1e-11 * lp);
  }
}

TEST(Damping, ZeroAtZeroAndIdentityForLinearExponent) {
  TorusGrid g(2, 32);
  auto zero = SpectralField::vector(g);
  zero.set_divergence_free(true);
  EXPECT_EQ(norm_H(op_C(zero, 4.0)), 0.0);
  FieldSampler s(g, 9, dealiased_band(6));
  auto u = s.sample(0);
  EXPECT_LT(diff_norm(op_C(u, 1.0), u), 1e-13 * norm_H(u));
  EXPECT_THROW(op_C(u, 0.5), InvalidExponentError);
}

TEST(Damping, MonotoneOnSamplePairs) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 11, dealiased_band(6));
  for (int i = 0; i < 10; ++i) {
    auto [u, v] = s.pair(i);
    SpectralField du = u, dc = op_C(u, 3.0);
    du -= v;
    dc -= op_C(v, 3.0);
    EXPECT_GE(duality_pairing(dc, du), 0.0);
  }
}

TEST(Damping, PointwiseValuesMatchFormula) {
  TorusGrid g(2, 8);
  PhysicalField u = PhysicalField::vector(g);
  u[0][3] = 3.0;
  u[1][3] = 4.0;
  auto c = damping_physical(u, 3.0);
  EXPECT_DOUBLE_EQ(c[0][3], 75.0);
  EXPECT_DOUBLE_EQ(c[1][3], 100.0);
  EXPECT_EQ(c[0][0], 0.0);
}

TEST(FullOperator, DecomposesIntoItsParts) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 13, dealiased_band(6));
  auto u = s.sample(0);
  const CbfParams p{0.3, 0.2, 1.5, 4.0};
  SpectralField expect = op_B(u);
  expect.axpy(p.beta, op_C(u, p.r));
  expect.axpy(p.mu, op_A(u));
  expect.axpy(p.alpha, u);
  auto got = op_G(u, p);
  EXPECT_LT(diff_norm(got, expect), 1e-12 * norm_H(expect));
  EXPECT_TRUE(got.divergence_free());
  EXPECT_LT(divergence_ratio(got), 1e-12);
  SpectralField nl = op_B(u);
  nl.axpy(p.beta, op_C(u, p.r));
  EXPECT_LT(diff_norm(nonlinear_term(u, p), nl), 1e-12 * norm_H(nl));
}

TEST(FullOperator, RejectsInvalidParameters) {
  TorusGrid g(2, 16);
  auto u = taylor_green(g);
  EXPECT_THROW(op_G(u, CbfParams{-1.0, 0, 1, 3}), InvalidArgumentError);
}

TEST(Pressure, TaylorGreenPressureMatchesClosedForm) {
  TorusGrid g(2, 32);
  const double a = 1.7;
  auto u = taylor_green(g, a);
  auto p = to_physical(recover_pressure(u, SpectralField::vector(g), CbfParams{1, 0, 0, 3}));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.point(i);
    EXPECT_NEAR(p[0][i], -0.25 * a * a * (std::cos(2 * x[0]) + std::cos(2 * x[1])), 1e-12);
  }
}

TEST(Operators, GridMismatchIsRejected) {
  auto u = taylor_green(TorusGrid(2, 16));
  auto v = taylor_green(TorusGrid(2, 32));
  EXPECT_THROW(op_B(u, v), IncompatibleGridsError);
  EXPECT_THROW(trilinear_b(u, u, v), IncompatibleGridsError);
}
