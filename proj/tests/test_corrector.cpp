// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nopc/corrector.hpp"
#include "nopc/grf.hpp"
#include "nopc/kernels.hpp"

using namespace nopc;

namespace
{

SpacePtr square_space(int n)
{
  auto mesh = std::make_shared<const Mesh>(build_unit_square_quad(n));
  return FunctionSpace::create(mesh, BoundaryTag::GammaBottom);
}

SpacePtr voided_space(double h)
{
  auto mesh = std::make_shared<const Mesh>(build_voided_square_tri(h, default_voids()));
  return FunctionSpace::create(mesh, BoundaryTag::GammaIn);
}

NewtonConfig tight()
{
  NewtonConfig c;
  c.residual_tol = 1e-13;
  c.linear.rel_tol = 1e-12;
  return c;
}

LinearSolveConfig tight_linear()
{
  return {LinearMethod::ConjugateGradient, 1e-12, 1e-14, 0};
}

// Smooth direction vanishing on the Dirichlet dofs with l2 norm `scale`.
Field direction(const SpacePtr &s, unsigned seed, double scale)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  auto w = Field::interpolate(s, [&](const Vec2 &x) { return std::sin(a * x.x + c) * std::cos(b * x.y); });
  for (auto d : s->dirichlet_dofs())
  {
    w.values[d] = 0.0;
  }
  const double n = kernels::norm2(w.values);
  for (double &v : w.values)
  {
    v *= scale / n;
  }
  return w;
}

double rel_l2(const Field &a, const Field &b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    num += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
    den += b.values[i] * b.values[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(Correct, FixedPointOfTheSolution)
{
  for (auto id : {ProblemId::Source, ProblemId::Flux})
  {
    const auto s = id == ProblemId::Source ? square_space(16) : voided_space(0.05);
    const auto p = ProblemDef::for_id(id);
    PriorConfig prior;
    prior.seed = 3;
    const auto m = transform_parameter(PriorSampler(s, prior).draw(0), id);
    const auto sol = newton_solve(p, m, Field::zeros(s), tight());
    const auto r = correct(p, m, sol.u, tight_linear());
    EXPECT_LE(rel_l2(r.u_c, sol.u), 1e-8);
    EXPECT_LE(r.residual_after, 1e-11);
  }
}

TEST(Correct, FromZeroIsTheFirstNewtonIterate)
{
  const auto s = square_space(12);
  const auto p = ProblemDef::source_problem();
  const auto m = Field::constant(s, 0.3);
  NewtonConfig cfg;
  cfg.line_search = false;
  cfg.keep_iterates = true;
  const auto sol = newton_solve(p, m, Field::zeros(s), cfg);
  const auto steps = correct_k(p, m, Field::zeros(s), 3, cfg.linear);
  ASSERT_GE(sol.iterates.size(), 3u);
  EXPECT_EQ(correct(p, m, Field::zeros(s), cfg.linear).u_c.values, sol.iterates[0].values);
  for (std::size_t k = 0; k < 3; ++k)
  {
    EXPECT_EQ(steps[k].u_c.values, sol.iterates[k].values) << k;
  }
}

TEST(Correct, UpdateIdentityAndBoundaryRepair)
{
  const auto s = voided_space(0.05);
  const auto p = ProblemDef::flux_problem();
  const auto m = Field::constant(s, 0.25);
  auto ut = Field::constant(s, 0.05);  // violates u = 0 on the voids
  const auto r = correct(p, m, ut);
  for (std::size_t i = 0; i < ut.size(); ++i)
  {
    EXPECT_EQ(r.u_c.values[i], ut.values[i] + r.e[i]);
  }
  for (auto d : s->dirichlet_dofs())
  {
    EXPECT_EQ(r.u_c.values[d], 0.0);
  }
  EXPECT_LT(r.residual_after, r.residual_before);
  EXPECT_GT(r.e_h1, r.e_l2);
}

TEST(Correct, ExactForLinearProblems)
{
  const auto s = square_space(16);
  auto p = ProblemDef::source_problem();
  p.alpha = 0.0;
  const auto m = Field::constant(s, -0.4);
  const auto sol = newton_solve(p, m, Field::zeros(s), tight());
  const auto r = correct(p, m, direction(s, 4, 3.0), tight_linear());
  EXPECT_LE(rel_l2(r.u_c, sol.u), 1e-10);
}

TEST(CorrectK, QuadraticResidualDecrease)
{
  const auto s = voided_space(0.04);
  const auto p = ProblemDef::flux_problem();
  const auto m = Field::constant(s, 0.1);
  const auto sol = newton_solve(p, m, Field::zeros(s), tight());
  auto ut = sol.u;
  const auto w = direction(s, 7, kernels::norm2(sol.u.values));
  for (std::size_t i = 0; i < ut.size(); ++i)
  {
    ut.values[i] += 0.1 * w.values[i];
  }
  const auto steps = correct_k(p, m, ut, 3, tight_linear());
  EXPECT_EQ(correct(p, m, ut, tight_linear()).u_c.values, steps[0].u_c.values);
  const double r0 = steps[0].residual_before, r1 = steps[0].residual_after;
  const double r2 = steps[1].residual_after, r3 = steps[2].residual_after;
  EXPECT_LT(r1, r0);
  EXPECT_LT(r2, r1);
  EXPECT_LT(r3, r2);
  // once asymptotic, r_{k+1} / r_k^2 stays within a factor 10
  const double c2 = r2 / (r1 * r1), c3 = r3 / (r2 * r2);
  EXPECT_LT(std::max(c2, c3) / std::min(c2, c3), 10.0);
}

TEST(QoiEstimate, ZeroAtSolutionExactWhenLinearConsistentOtherwise)
{
  const auto s = voided_space(0.05);
  auto p = ProblemDef::flux_problem();
  const auto m = Field::constant(s, 0.2);
  const auto sol = newton_solve(p, m, Field::zeros(s), tight());
  EXPECT_NEAR(estimate_qoi_error(p, m, sol.u, tight_linear()), 0.0, 1e-12);

  auto q = [&](const Field &u) { return boundary_integral(u, p.flux_tag, p.boundary_flux); };
  const auto w = direction(s, 9, kernels::norm2(sol.u.values));
  auto perturbed = [&](const Field &u, double eps) {
    Field r = u;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      r.values[i] += eps * w.values[i];
    }
    return r;
  };

  double prev = INFINITY;
  for (double eps : {1e-1, 1e-2, 1e-3})
  {
    const auto ut = perturbed(sol.u, eps);
    const double exact = q(sol.u) - q(ut);
    const double est = estimate_qoi_error(p, m, ut, tight_linear());
    const double rel = std::abs(est - exact) / std::abs(exact);
    EXPECT_LT(rel, prev) << eps;
    prev = rel;
  }

  auto lin = p;
  lin.alpha = 0.0;
  const auto lsol = newton_solve(lin, m, Field::zeros(s), tight());
  const auto ut = perturbed(lsol.u, 0.5);
  const double exact = q(lsol.u) - q(ut);
  EXPECT_NEAR(estimate_qoi_error(lin, m, ut, tight_linear()) / exact, 1.0, 1e-8);
  EXPECT_THROW(estimate_qoi_error(ProblemDef::source_problem(), Field::zeros(square_space(4)),
                                  Field::zeros(square_space(4))),
               std::invalid_argument);
}

TEST(ScalingProbe, QuadraticErrorReduction)
{
  const auto s = square_space(24);
  const auto p = ProblemDef::source_problem();
  PriorConfig prior;
  prior.seed = 11;
  const auto m = PriorSampler(s, prior).draw(2);
  const auto sol = newton_solve(p, m, Field::zeros(s), tight());
  const auto w = direction(s, 12, kernels::norm2(sol.u.values));
  const std::vector<double> eps{0.0, 1e-1, 3e-2, 1e-2, 3e-3};
  const auto rows = error_scaling_probe(p, m, sol.u, w, eps, tight_linear());
  EXPECT_LE(rows[0].err_after, 1e-10);
  const double slope = loglog_slope(rows);
  EXPECT_GE(slope, 1.8);
  EXPECT_LE(slope, 2.2);

  const std::vector<double> halving{2e-2, 1e-2};
  const auto h = error_scaling_probe(p, m, sol.u, w, halving, tight_linear());
  const double ratio = h[0].err_after / h[1].err_after;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);

  const auto csv = probe_csv(rows);
  EXPECT_EQ(csv.rfind("eps,err_before,err_after\n", 0), 0u);
  EXPECT_THROW(error_scaling_probe(p, m, sol.u, Field::zeros(s), eps), std::invalid_argument);
}

TEST(CorrectBatch, MatchesSequential)
{
  const auto s = square_space(8);
  const auto p = ProblemDef::source_problem();
  std::vector<Field> ms, us;
  for (int k = 0; k < 4; ++k)
  {
    ms.push_back(Field::constant(s, 0.1 * k));
    us.push_back(direction(s, 20 + k, 1.0));
  }
  const auto batch = correct_batch(p, ms, us);
  for (int k = 0; k < 4; ++k)
  {
    EXPECT_EQ(batch[k].u_c.values, correct(p, ms[k], us[k]).u_c.values);
  }
}
