// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nopc/error.hpp"
#include "nopc/topopt.hpp"

using namespace nopc;

namespace
{

SpacePtr voided_space(double h)
{
  auto mesh = std::make_shared<const Mesh>(build_voided_square_tri(h, default_voids()));
  return FunctionSpace::create(mesh, BoundaryTag::GammaIn);
}

SpacePtr square_space(int n)
{
  auto mesh = std::make_shared<const Mesh>(build_unit_square_quad(n));
  return FunctionSpace::create(mesh, std::nullopt);
}

Field random_energy(const SpacePtr &s, unsigned seed)
{
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(5.0);
  Field e = Field::zeros(s);
  for (double &v : e.values)
  {
    v = ex(rng);
  }
  return e;
}

}  // namespace

TEST(Compliance, ConstantsAndEnergyIdentity)
{
  const auto s = voided_space(0.05);
  const auto p = ProblemDef::flux_problem();
  EXPECT_EQ(compliance(p, Field::zeros(s)), 0.0);
  EXPECT_NEAR(compliance(p, Field::constant(s, 1.0)), 0.4, 1e-12);
  for (double c : {0.05, 0.4, 1.0})
  {
    const auto m = Field::constant(s, c);
    const auto u = newton_solve(p, m, Field::zeros(s)).u;
    const double a = compliance(p, u), b = volumetric_compliance(p, m, u);
    EXPECT_NEAR(b / a, 1.0, 1e-6) << c;
  }
}

TEST(FluxEnergy, Basics)
{
  const auto patch = square_space(1);
  const auto x = Field::interpolate(patch, [](const Vec2 &p) { return p.x; });
  for (double v : flux_energy(Field::constant(patch, 1.0), x).values)
  {
    EXPECT_NEAR(v, 1.0, 1e-14);
  }
  const auto s = voided_space(0.05);
  for (double v : flux_energy(Field::constant(s, 0.3), Field::constant(s, 2.0)).values)
  {
    EXPECT_NEAR(v, 0.0, 1e-28);
  }
  const auto u = Field::interpolate(s, [](const Vec2 &p) { return std::sin(3 * p.x) * p.y; });
  const auto m = Field::interpolate(s, [](const Vec2 &p) { return 0.2 + p.x * p.y; });
  auto m2 = m;
  for (double &v : m2.values)
  {
    v *= 2.0;
  }
  const auto e1 = flux_energy(m, u), e2 = flux_energy(m2, u);
  for (std::size_t i = 0; i < e1.size(); ++i)
  {
    EXPECT_GE(e1.values[i], 0.0);
    EXPECT_NEAR(e2.values[i], 4.0 * e1.values[i], 1e-14 * (1.0 + e2.values[i]));
  }
}

TEST(UpdateM, ClampFormula)
{
  const auto s = square_space(2);
  EXPECT_EQ(update_m(Field::constant(s, 4.0), 1.0, 0.001).values[0], 1.0);
  EXPECT_EQ(update_m(Field::constant(s, 0.0), 1.0, 0.001).values[0], 0.001);
  EXPECT_NEAR(update_m(Field::constant(s, 0.16), 1.0, 0.001).values[0], 0.4, 1e-15);
  EXPECT_THROW(update_m(Field::constant(s, 0.16), 0.0, 0.001), std::invalid_argument);
  const auto m = update_m(random_energy(s, 1), 0.05, 0.001);
  for (double v : m.values)
  {
    EXPECT_GE(v, 0.001);
    EXPECT_LE(v, 1.0);
  }
}

TEST(InnerIteration, UniformEnergyClosedForm)
{
  const auto s = voided_space(0.05);
  TopOptConfig cfg;
  cfg.m_tol = 1e-10;
  const double c = 0.16;
  const auto r = inner_iteration(Field::constant(s, 0.1), 1.0, Field::constant(s, c), cfg);
  EXPECT_NEAR(r.lambda / (c / (cfg.eta * cfg.eta)), 1.0, 1e-6);
  for (double v : r.m.values)
  {
    EXPECT_NEAR(v, 0.4, 1e-6);
  }
  // starting far from the answer on either side
  for (double lambda0 : {1e-3, 50.0})
  {
    const auto q = inner_iteration(Field::constant(s, 0.9), lambda0, Field::constant(s, c), cfg);
    EXPECT_NEAR(q.lambda, 1.0, 1e-6);
  }
}

TEST(InnerIteration, VolumeAverageMonotoneInLambda)
{
  const auto s = voided_space(0.05);
  const auto e = random_energy(s, 2);
  double prev = INFINITY;
  for (int k = 0; k < 10; ++k)
  {
    const double lambda = 1e-3 * std::pow(3.0, k);
    const double mbar = volume_average(update_m(e, lambda, 0.001));
    EXPECT_LE(mbar, prev);
    prev = mbar;
  }
}

TEST(InnerIteration, VolumeGuardAndDegenerateEnergy)
{
  const auto s = voided_space(0.05);
  const TopOptConfig cfg;
  for (unsigned seed = 0; seed < 5; ++seed)
  {
    for (double lambda0 : {1e-4, 1.0, 1e3})
    {
      const auto r = inner_iteration(Field::constant(s, 0.1), lambda0, random_energy(s, seed), cfg);
      EXPECT_LE(std::abs(volume_average(r.m) - 0.4), 0.4 * 0.005);
    }
  }
  EXPECT_THROW(inner_iteration(Field::constant(s, 0.1), 1.0, Field::zeros(s), cfg), NumericalError);
}

TEST(OuterIteration, FemConvergesWithMonotoneCompliance)
{
  const auto s = voided_space(0.05);
  const auto p = ProblemDef::flux_problem();
  TopOptConfig cfg;
  cfg.m_tol = 1e-5;
  const auto r = outer_iteration(cfg, p, s, fem_forward(p));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.history.back().volume, 0.4, 0.4 * cfg.m_tol);
  int violations = 0;
  for (std::size_t k = 4; k < r.history.size(); ++k)
  {
    violations += r.history[k].compliance > r.history[k - 1].compliance;
  }
  EXPECT_LE(violations, 2);
  EXPECT_LT(r.history.back().compliance, r.history.front().compliance);
  const auto csv = history_csv(r);
  EXPECT_EQ(csv.rfind("iter,J,mbar,lambda,change\n", 0), 0u);
}

TEST(OuterIteration, ConstraintsHoldAtEveryStep)
{
  const auto s = voided_space(0.05);
  const auto p = ProblemDef::flux_problem();
  TopOptConfig cfg;
  cfg.n_max = 25;
  std::size_t calls = 0;
  const auto r = outer_iteration(cfg, p, s, fem_forward(p), [&](std::size_t k, const Field &m, const Field &u) {
    ++calls;
    for (double v : m.values)
    {
      ASSERT_GE(v, cfg.m_lower);
      ASSERT_LE(v, 1.0);
    }
    if (k > 0)
    {
      EXPECT_LE(std::abs(volume_average(m) - cfg.eta), cfg.eta * cfg.m_tol);
    }
    EXPECT_NEAR(volumetric_compliance(p, m, u) / compliance(p, u), 1.0, 1e-6);
  });
  EXPECT_EQ(calls, r.history.size());
}

TEST(OuterIteration, CorrectingExactStatesKeepsTheTrajectory)
{
  const auto s = voided_space(0.05);
  const auto p = ProblemDef::flux_problem();
  TopOptConfig cfg;
  cfg.m_tol = 1e-5;
  cfg.n_max = 8;
  NewtonConfig newton;
  newton.residual_tol = 1e-13;
  newton.linear.rel_tol = 1e-12;
  const auto fem = fem_forward(p, newton);
  const ForwardFn corrected = [&](const Field &m, const Field *prev) {
    return correct(p, m, fem(m, prev), newton.linear).u_c;
  };
  const auto a = outer_iteration(cfg, p, s, fem);
  const auto b = outer_iteration(cfg, p, s, corrected);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.m.size(); ++i)
  {
    EXPECT_NEAR(a.m.values[i], b.m.values[i], 1e-8);
  }
}

TEST(MinimizerErrors, ScalingAndModes)
{
  const auto s = voided_space(0.05);
  const auto m = Field::constant(s, 0.4);
  auto m11 = m;
  for (double &v : m11.values)
  {
    v *= 1.1;
  }
  const auto u = Field::constant(s, 0.2);
  const auto e = minimizer_errors(m, m11, m, u, u, u);
  EXPECT_NEAR(e.eps_nn, 10.0, 1e-12);
  EXPECT_EQ(e.eps_cnn, 0.0);
  EXPECT_EQ(e.e_nn, 0.0);
  EXPECT_EQ(parse_forward_mode("nn_corrected"), ForwardMode::NnCorrected);
  EXPECT_EQ(to_string(parse_forward_mode("nn")), "nn");
  EXPECT_THROW(parse_forward_mode("surrogate"), std::invalid_argument);
  TopOptConfig bad;
  bad.eta = 0.0005;
  EXPECT_THROW(validate(bad), std::invalid_argument);
}
