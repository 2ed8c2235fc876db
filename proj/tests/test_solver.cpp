#include <gtest/gtest.h>

#include <cmath>

#include "cbf/sampler.hpp"
#include "cbf/solver.hpp"

using namespace cbf;

namespace {

SpectralField shear_mode(const TorusGrid& g, double amp, int k) {
  auto u = to_spectral(sample_field(g, g.dim(), [&](const auto& x, std::span<double> o) {
    for (auto& v : o) v = 0.0;
    o[0] = amp * std::sin(k * x[1]);
  }));
  u.set_divergence_free(true);
  return u;
}

double diff_norm(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return norm_H(d);
}

SolverConfig config(double dt, double t_end, Scheme scheme) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.scheme = scheme;
  return c;
}

double taylor_green_error(double dt, Scheme scheme) {
  TorusGrid g(2, 32);
  const CbfParams p{0.1, 0.0, 0.0, 3.0};
  auto res = run(taylor_green(g), p, config(dt, 0.5, scheme), ForcingSpec::zero());
  return diff_norm(res.final_state.u, std::exp(-2.0 * p.mu * 0.5) * taylor_green(g)) / norm_H(taylor_green(g));
}

}  // namespace

TEST(Solver, EulerLinearDecayFollowsTheRecurrence) {
  TorusGrid g(2, 16);
  const CbfParams p{0.3, 0.5, 0.0, 3.0};
  const double dt = 0.01;
  auto res = run(shear_mode(g, 1.0, 2), p, config(dt, 0.2, Scheme::imex_euler), ForcingSpec::zero());
  const double factor = std::pow(1.0 / (1.0 + dt * (p.mu * 4.0 + p.alpha)), 20);
  EXPECT_LT(diff_norm(res.final_state.u, factor * shear_mode(g, 1.0, 2)), 1e-14);
  EXPECT_EQ(res.steps, 20);
}

TEST(Solver, CnabLinearDecayFollowsTheRecurrence) {
  TorusGrid g(2, 16);
  const CbfParams p{0.3, 0.5, 0.0, 3.0};
  const double dt = 0.01, hl = dt * (p.mu * 4.0 + p.alpha);
  auto res = run(shear_mode(g, 1.0, 2), p, config(dt, 0.2, Scheme::imex_cnab2), ForcingSpec::zero());
  const double factor = std::pow((1.0 - 0.5 * hl) / (1.0 + 0.5 * hl), 19) / (1.0 + hl);
  EXPECT_LT(diff_norm(res.final_state.u, factor * shear_mode(g, 1.0, 2)), 1e-14);
}

TEST(Solver, TaylorGreenConvergesAtTheSchemeOrder) {
  const double e1 = taylor_green_error(4e-3, Scheme::imex_cnab2);
  const double e2 = taylor_green_error(2e-3, Scheme::imex_cnab2);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
  const double f1 = taylor_green_error(4e-3, Scheme::imex_euler);
  const double f2 = taylor_green_error(2e-3, Scheme::imex_euler);
  EXPECT_NEAR(std::log2(f1 / f2), 1.0, 0.1);
}

TEST(Solver, KolmogorovSteadyStateIsAFixedPoint) {
  TorusGrid g(2, 32);
  const CbfParams p{0.5, 0.2, 0.0, 3.0};
  const double a = 1.3;
  const int k = 3;
  const auto forcing = ForcingSpec::kolmogorov(a, k);
  auto u0 = shear_mode(g, a / (p.mu * k * k + p.alpha), k);
  auto res = run(u0, p, config(0.01, 0.5, Scheme::imex_cnab2), forcing);
  EXPECT_LT(diff_norm(res.final_state.u, u0), 1e-13 * norm_H(u0));
}

TEST(Solver, KolmogorovForcingMatchesItsPhysicalForm) {
  TorusGrid g(2, 16, 3.0);
  auto f = to_physical(ForcingSpec::kolmogorov(2.0, 2).evaluate(g, 0.0));
  const double k = 2.0 * g.k0();
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(f[0][i], 2.0 * std::sin(k * g.point(i)[1]), 1e-13);
    EXPECT_EQ(f[1][i], 0.0);
  }
  auto osc = ForcingSpec::oscillating_kolmogorov(2.0, 2, 3.0);
  EXPECT_NEAR(norm_H(osc.evaluate(g, 0.7)), std::abs(std::cos(2.1)) * norm_H(osc.evaluate(g, 0.0)), 1e-13);
  EXPECT_THROW(ForcingSpec::kolmogorov(1.0, 8).evaluate(g, 0.0), InvalidArgumentError);
}

TEST(Solver, ZeroStateStaysZero) {
  TorusGrid g(2, 16);
  auto res = run(SpectralField::vector(g), CbfParams{1, 0, 1, 4}, config(0.01, 0.1, Scheme::imex_cnab2),
                 ForcingSpec::zero());
  EXPECT_EQ(norm_H(res.final_state.u), 0.0);
}

TEST(Solver, UnforcedEnergyDecaysAndDivergenceStaysZero) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 1, SamplerOptions{6, 2.0, 1.0, 1.0, false, Truncation::box});
  auto cfg = config(2e-3, 0.2, Scheme::imex_cnab2);
  cfg.extended_diagnostics = true;
  auto res = run(s.sample(0), CbfParams{0.1, 0.1, 1.0, 4.0}, cfg, ForcingSpec::zero());
  ASSERT_EQ(res.diagnostics.size(), 101u);
  for (std::size_t i = 1; i < res.diagnostics.size(); ++i) {
    EXPECT_LE(res.diagnostics[i].energy, res.diagnostics[i - 1].energy);
    EXPECT_LT(res.diagnostics[i].divergence_ratio, 1e-12);
  }
}

TEST(Solver, EnergyResidualShrinksQuadraticallyWithCnab) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 2, SamplerOptions{6, 2.0, 1.0, 1.0, false, Truncation::box});
  const auto u0 = s.sample(0);
  auto residual = [&](double dt) {
    return run(u0, CbfParams{0.1, 0.0, 1.0, 4.0}, config(dt, 0.2, Scheme::imex_cnab2), ForcingSpec::zero())
        .final_state.integrals.abs_residual;
  };
  const double r1 = residual(4e-3), r2 = residual(2e-3);
  EXPECT_GT(std::log2(r1 / r2), 1.8);
}

TEST(Solver, SubstepsMatchHalvedSteps) {
  TorusGrid g(2, 32);
  auto u0 = taylor_green(g);
  const CbfParams p{0.2, 0.0, 1.0, 3.0};
  auto a = config(0.01, 0.1, Scheme::imex_euler);
  a.substeps = 2;
  auto b = config(0.005, 0.1, Scheme::imex_euler);
  auto ra = run(u0, p, a, ForcingSpec::zero());
  auto rb = run(u0, p, b, ForcingSpec::zero());
  EXPECT_LT(diff_norm(ra.final_state.u, rb.final_state.u), 1e-14 * norm_H(u0));
}

TEST(Solver, RunsAreDeterministic) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 3, SamplerOptions{6, 2.0, 1.0, 1.0, false, Truncation::box});
  auto u0 = s.sample(0);
  const CbfParams p{0.1, 0.0, 1.0, 5.0};
  auto ra = run(u0, p, config(0.01, 0.1, Scheme::imex_cnab2), ForcingSpec::kolmogorov(1.0, 2));
  auto rb = run(u0, p, config(0.01, 0.1, Scheme::imex_cnab2), ForcingSpec::kolmogorov(1.0, 2));
  EXPECT_TRUE(ra.final_state.u == rb.final_state.u);
}

TEST(Solver, StepIsShrunkToLandOnEndTime) {
  TorusGrid g(2, 16);
  std::vector<std::string> warnings;
  RunHooks hooks;
  hooks.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  auto res = run(taylor_green(g), CbfParams{1, 0, 0, 3}, config(0.1, 0.25, Scheme::imex_euler), ForcingSpec::zero(),
                 hooks);
  EXPECT_EQ(res.steps, 3);
  EXPECT_NEAR(res.dt_used, 0.25 / 3.0, 1e-15);
  EXPECT_NEAR(res.final_state.t, 0.25, 1e-15);
  ASSERT_FALSE(warnings.empty());
  EXPECT_NE(warnings.front().find("dt adjusted"), std::string::npos);
  EXPECT_EQ(step_count(0.0, 1.0, 0.1), 10);
}

TEST(Solver, ZeroDurationEmitsOnlyTheInitialSample) {
  TorusGrid g(2, 16);
  auto res = run(taylor_green(g), CbfParams{}, config(0.1, 0.0, Scheme::imex_euler), ForcingSpec::zero());
  EXPECT_EQ(res.steps, 0);
  ASSERT_EQ(res.diagnostics.size(), 1u);
  EXPECT_EQ(res.diagnostics[0].t, 0.0);
}

TEST(Solver, DiagnosticsAndSnapshotCadence) {
  TorusGrid g(2, 16);
  auto cfg = config(0.01, 0.1, Scheme::imex_cnab2);
  cfg.diagnostics_every = 3;
  cfg.snapshot_every = 4;
  std::vector<long> snap_steps;
  RunHooks hooks;
  hooks.on_snapshot = [&](const Snapshot& s, long k) {
    snap_steps.push_back(k);
    EXPECT_NEAR(s.time, 0.01 * k, 1e-14);
  };
  auto res = run(taylor_green(g), CbfParams{}, cfg, ForcingSpec::zero(), hooks);
  // t = 0, steps 3, 6, 9 and the final step 10
  EXPECT_EQ(res.diagnostics.size(), 5u);
  EXPECT_EQ(snap_steps, (std::vector<long>{4, 8}));
}

TEST(Solver, BlowUpCarriesPartialDiagnostics) {
  TorusGrid g(2, 16);
  auto cfg = config(0.01, 1.0, Scheme::imex_euler);
  cfg.blowup_factor = 3.0;
  try {
    run(shear_mode(g, 1e-3, 1), CbfParams{1, 0, 0, 3}, cfg, ForcingSpec::kolmogorov(10.0, 1));
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_FALSE(e.partial().empty());
    EXPECT_GE(e.last_valid_time(), 0.0);
    EXPECT_LT(e.last_valid_time(), 1.0);
  }
}

TEST(Solver, LargeStepRaisesACflWarning) {
  TorusGrid g(2, 32);
  std::vector<std::string> warnings;
  RunHooks hooks;
  hooks.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  run(taylor_green(g, 5.0), CbfParams{1, 0, 0, 3}, config(0.1, 0.2, Scheme::imex_euler), ForcingSpec::zero(), hooks);
  bool found = false;
  for (const auto& w : warnings) found = found || w.find("CFL") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Solver, GalerkinTruncationKeepsStateInBand) {
  TorusGrid g(2, 32);
  FieldSampler s(g, 4, SamplerOptions{10, 1.0, 1.0, 1.0, false, Truncation::box});
  auto cfg = config(0.01, 0.05, Scheme::imex_cnab2);
  cfg.galerkin_n = 4;
  auto res = run(s.sample(0), CbfParams{}, cfg, ForcingSpec::zero());
  const auto& u = res.final_state.u;
  EXPECT_TRUE(galerkin_truncate(u, 4) == u);
}

TEST(Solver, InvalidConfigurationIsRejected) {
  TorusGrid g(2, 16);
  auto cfg = config(-1.0, 1.0, Scheme::imex_euler);
  EXPECT_THROW(run(taylor_green(g), CbfParams{}, cfg, ForcingSpec::zero()), InvalidArgumentError);
  cfg = config(0.1, 1.0, Scheme::imex_euler);
  cfg.substeps = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgumentError);
}

TEST(Solver, AprioriBoundClosedForms) {
  TorusGrid g(2, 16);
  auto u0 = taylor_green(g);
  const CbfParams p{0.5, 0, 1, 3};
  EXPECT_DOUBLE_EQ(apriori_bound(u0, p, ForcingSpec::zero(), 2.0), norm_H_sq(u0));
  const auto f = ForcingSpec::kolmogorov(2.0, 1);
  const double fv = norm_V_dual_sq(f.evaluate(g, 0.0));
  EXPECT_NEAR(apriori_bound(u0, p, f, 2.0), norm_H_sq(u0) + 2.0 * fv / p.mu, 1e-12);
  // cos^2 averages to 1/2 over whole periods.
  const auto osc = ForcingSpec::oscillating_kolmogorov(2.0, 1, std::numbers::pi);
  EXPECT_NEAR(apriori_bound(u0, p, osc, 2.0), norm_H_sq(u0) + fv / p.mu, 1e-9);
}
