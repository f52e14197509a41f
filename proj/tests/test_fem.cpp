// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nopc/element.hpp"
#include "nopc/error.hpp"
#include "nopc/fem.hpp"
#include "nopc/kernels.hpp"
#include "nopc/nonlinear_solver.hpp"

using namespace nopc;

namespace
{

SpacePtr square_space(int n, bool dirichlet = true)
{
  auto mesh = std::make_shared<const Mesh>(build_unit_square_quad(n));
  return FunctionSpace::create(mesh, dirichlet ? std::optional(BoundaryTag::GammaBottom)
                                               : std::nullopt);
}

SpacePtr voided_space(double h, bool dirichlet = true)
{
  auto mesh = std::make_shared<const Mesh>(build_voided_square_tri(h, default_voids()));
  return FunctionSpace::create(mesh, dirichlet ? std::optional(BoundaryTag::GammaIn)
                                               : std::nullopt);
}

// Smooth field vanishing on the Dirichlet dofs.
Field random_smooth(const SpacePtr &s, unsigned seed, double scale = 1.0)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  auto f = Field::interpolate(s, [&](const Vec2 &x) {
    return scale * (a + b * std::sin(3.0 * x.x + c) * std::cos(2.0 * x.y + d));
  });
  for (auto i : s->dirichlet_dofs())
  {
    f.values[i] = 0.0;
  }
  return f;
}

Field random_nodal(const SpacePtr &s, unsigned seed, bool zero_bc)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Field f = Field::zeros(s);
  for (auto &v : f.values)
  {
    v = n(rng);
  }
  if (zero_bc)
  {
    for (auto i : s->dirichlet_dofs())
    {
      f.values[i] = 0.0;
    }
  }
  return f;
}

double rel_diff(std::span<const double> a, std::span<const double> b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(Quadrature, TriangleRuleExactToDegreeFour)
{
  // int_T x^a y^b = a! b! / (a + b + 2)!
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i)
    {
      f *= i;
    }
    return f;
  };
  for (int a = 0; a <= 4; ++a)
  {
    for (int b = 0; a + b <= 4; ++b)
    {
      double s = 0.0;
      for (const auto &q : volume_quadrature(ElementKind::Tri3))
      {
        s += q.weight * std::pow(q.xi, a) * std::pow(q.eta, b);
      }
      EXPECT_NEAR(s, fact(a) * fact(b) / fact(a + b + 2), 1e-15) << a << "," << b;
    }
  }
}

TEST(Quadrature, QuadRuleExactToDegreeFive)
{
  for (int a = 0; a <= 5; ++a)
  {
    for (int b = 0; b <= 5; ++b)
    {
      double s = 0.0;
      for (const auto &q : volume_quadrature(ElementKind::Quad4))
      {
        s += q.weight * std::pow(q.xi, a) * std::pow(q.eta, b);
      }
      const double ia = (a % 2 == 0) ? 2.0 / (a + 1) : 0.0;
      const double ib = (b % 2 == 0) ? 2.0 / (b + 1) : 0.0;
      EXPECT_NEAR(s, ia * ib, 1e-14);
    }
  }
}

TEST(FunctionSpace, DirichletDofsSortedUnique)
{
  const auto s = square_space(4);
  const auto d = s->dirichlet_dofs();
  ASSERT_EQ(d.size(), 5u);
  for (std::size_t k = 1; k < d.size(); ++k)
  {
    EXPECT_LT(d[k - 1], d[k]);
  }
}

TEST(MassStiffness, PartitionOfUnityAndConstants)
{
  for (const auto &s : {square_space(7, false), voided_space(0.05, false)})
  {
    const auto &mass = s->mass();
    EXPECT_LE(mass.asymmetry(), 1e-12 * mass.max_abs());
    const auto ones = std::vector<double>(s->size(), 1.0);
    const auto k1 = s->stiffness().multiply(ones);
    for (double v : k1)
    {
      EXPECT_NEAR(v, 0.0, 1e-12);
    }
  }
  EXPECT_NEAR(square_space(7, false)->measure(), 1.0, 1e-12);
}

TEST(MassStiffness, VoidedAreaConvergesQuadratically)
{
  const auto voids = default_voids();
  const double exact =
      1.0 - std::numbers::pi * (voids[0].radius * voids[0].radius + voids[1].radius * voids[1].radius);
  for (double h : {0.04, 0.02})
  {
    const auto s = voided_space(h, false);
    // Inscribed polygons only ever remove less area than the disks.
    EXPECT_GT(s->measure(), exact);
    EXPECT_LT(s->measure() - exact, 4.0 * h * h) << h;
  }
}

TEST(Residual, SourceProblemAtZeroIsMinusLoad)
{
  auto s = square_space(32, false);
  auto p = ProblemDef::source_problem();
  const auto m = Field::zeros(s);
  const auto r = assemble_residual(p, m, Field::zeros(s));
  double total = 0.0;
  for (double v : r)
  {
    total += v;
  }
  // int f = (sqrt(pi)/4) erf(2) * 1/2
  const double exact = std::sqrt(std::numbers::pi) / 4.0 * std::erf(2.0) * 0.5;
  EXPECT_NEAR(-total, exact, 1e-5);

  // With f = 1 each entry is minus the basis-function integral.
  p.source = [](const Vec2 &) { return 1.0; };
  const auto s2 = square_space(6);
  const auto r1 = assemble_residual(p, Field::zeros(s2), Field::zeros(s2));
  for (std::size_t i = 0; i < s2->size(); ++i)
  {
    EXPECT_NEAR(r1[i], s2->is_dirichlet(i) ? 0.0 : -s2->lumped_mass()[i], 1e-15);
  }
}

TEST(Residual, FluxProblemAtZeroIsMinusBoundaryLoad)
{
  const auto s = voided_space(0.04);
  const auto p = ProblemDef::flux_problem();
  const auto r = assemble_residual(p, Field::constant(s, 0.25), Field::zeros(s));
  const auto load = assemble_boundary_load(*s, BoundaryTag::GammaOut, 0.1);
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    EXPECT_DOUBLE_EQ(r[i], -load[i]);
    total += r[i];
  }
  EXPECT_NEAR(total, -0.4, 1e-12);
}

TEST(Residual, ConstraintEntriesReportViolation)
{
  const auto s = square_space(4);
  const auto p = ProblemDef::source_problem();
  const auto u = Field::constant(s, 0.3);
  const auto r = assemble_residual(p, Field::zeros(s), u);
  for (auto d : s->dirichlet_dofs())
  {
    EXPECT_EQ(r[d], 0.3);
  }
}

TEST(Residual, Errors)
{
  const auto s = square_space(4);
  const auto other = square_space(5);
  const auto p = ProblemDef::source_problem();
  EXPECT_THROW(assemble_residual(p, Field::zeros(s), Field::zeros(other)), std::invalid_argument);
  auto bad = Field::zeros(s);
  bad.values[3] = std::nan("");
  EXPECT_THROW(assemble_residual(p, Field::zeros(s), bad), NumericalError);
  const auto v = voided_space(0.05);
  EXPECT_THROW(assemble_residual(ProblemDef::flux_problem(), Field::constant(v, 1e-5), Field::zeros(v)),
               std::invalid_argument);
}

TEST(Jacobian, AtZeroEqualsWeightedStiffness)
{
  const auto s = square_space(6);
  const auto p = ProblemDef::source_problem();
  const double c = 0.7;
  const auto j = assemble_jacobian_unconstrained(p, Field::constant(s, c), Field::zeros(s));
  const auto k = s->stiffness();
  for (std::size_t i = 0; i < j.values().size(); ++i)
  {
    EXPECT_NEAR(j.values()[i], std::exp(c) * k.values()[i], 1e-13);
  }
}

TEST(Jacobian, SymmetricAndFiniteDifferenceConsistent)
{
  for (auto id : {ProblemId::Source, ProblemId::Flux})
  {
    const auto s = id == ProblemId::Source ? square_space(12) : voided_space(0.05);
    const auto p = ProblemDef::for_id(id);
    const auto m = id == ProblemId::Source ? random_smooth(s, 3) : Field::constant(s, 0.4);
    const auto u = random_smooth(s, 5, 0.5);
    const auto j = assemble_jacobian(p, m, u);
    EXPECT_LE(j.asymmetry(), 1e-12 * j.max_abs());

    const auto dir = random_nodal(s, 11, true);
    const auto r0 = assemble_residual(p, m, u);
    const double eps = 1e-6;
    auto up = u;
    for (std::size_t i = 0; i < up.size(); ++i)
    {
      up.values[i] += eps * dir.values[i];
    }
    const auto r1 = assemble_residual(p, m, up);
    std::vector<double> fd(r0.size());
    for (std::size_t i = 0; i < fd.size(); ++i)
    {
      fd[i] = (r1[i] - r0[i]) / eps;
    }
    const auto jp = j.multiply(dir.values);
    EXPECT_LE(rel_diff(fd, jp), 1e-4);
  }
}

TEST(Jacobian, PositiveDefiniteViaCg)
{
  const auto s = voided_space(0.04);
  const auto p = ProblemDef::flux_problem();
  const auto j = assemble_jacobian(p, Field::constant(s, 0.001), random_smooth(s, 2));
  const auto b = random_nodal(s, 9, false);
  LinearSolveStats stats;
  EXPECT_NO_THROW(solve_linear(j, b.values, {}, &stats));
  EXPECT_LE(stats.relative_residual, 1e-10);
}

TEST(SecondDerivative, ZeroAtZeroStateAndSymmetric)
{
  const auto s = square_space(8);
  const auto p = ProblemDef::source_problem();
  const auto m = Field::zeros(s);
  const auto a = random_nodal(s, 1, true);
  const auto b = random_nodal(s, 2, true);
  for (double v : apply_second_derivative(p, m, Field::zeros(s), a, b))
  {
    EXPECT_EQ(v, 0.0);
  }
  const auto u = random_smooth(s, 3);
  const auto ab = apply_second_derivative(p, m, u, a, b);
  const auto ba = apply_second_derivative(p, m, u, b, a);
  for (std::size_t i = 0; i < ab.size(); ++i)
  {
    EXPECT_NEAR(ab[i], ba[i], 1e-15);
  }
}

TEST(SecondDerivative, FiniteDifferenceOfJacobianAction)
{
  const auto s = square_space(10);
  const auto p = ProblemDef::source_problem();
  const auto m = random_smooth(s, 7);
  const auto u = random_smooth(s, 8);
  const auto dp = random_smooth(s, 9);
  const auto dq = random_smooth(s, 10);
  const double eps = 1e-5;
  auto uq = u;
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    uq.values[i] += eps * dq.values[i];
  }
  const auto j0 = assemble_jacobian(p, m, u).multiply(dp.values);
  const auto j1 = assemble_jacobian(p, m, uq).multiply(dp.values);
  std::vector<double> fd(j0.size());
  for (std::size_t i = 0; i < fd.size(); ++i)
  {
    fd[i] = s->is_dirichlet(i) ? 0.0 : (j1[i] - j0[i]) / eps;
  }
  EXPECT_LE(rel_diff(fd, apply_second_derivative(p, m, u, dp, dq)), 1e-4);
}

TEST(ParallelAssembly, MatchesSerialReferenceBitForBit)
{
  const auto s = voided_space(0.03);
  const auto p = ProblemDef::flux_problem();
  const auto m = Field::constant(s, 0.3);
  const auto u = random_smooth(s, 4);
  EXPECT_EQ(assemble_residual(p, m, u), serial::assemble_residual(p, m, u));
  const auto a = assemble_jacobian_unconstrained(p, m, u);
  const auto b = serial::assemble_jacobian_unconstrained(p, m, u);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(BoundaryIntegral, ConstantsAndUnknownTag)
{
  const auto s = voided_space(0.04);
  EXPECT_NEAR(boundary_integral(Field::constant(s, 1.0), BoundaryTag::GammaOut, 0.1), 0.4, 1e-12);
  EXPECT_EQ(boundary_integral(Field::zeros(s), BoundaryTag::GammaOut, 0.1), 0.0);
  EXPECT_THROW(boundary_integral(Field::zeros(s), BoundaryTag::GammaBottom, 1.0),
               std::invalid_argument);
  // Linear field x along the bottom edge of the square: int_0^1 x dx = 1/2.
  const auto sq = square_space(5);
  const auto x = Field::interpolate(sq, [](const Vec2 &p) { return p.x; });
  EXPECT_NEAR(boundary_integral(x, BoundaryTag::GammaBottom, 1.0), 0.5, 1e-14);
}

TEST(Norms, Basics)
{
  const auto s = square_space(6, false);
  auto e = Field::zeros(s);
  e.values[5] = 1.0;
  EXPECT_DOUBLE_EQ(norm(e, NormKind::L2Coeff), 1.0);
  const auto c = Field::constant(s, -2.5);
  EXPECT_NEAR(norm(c, NormKind::L2), 2.5, 1e-12);
  EXPECT_NEAR(norm(c, NormKind::H1), norm(c, NormKind::L2), 1e-12);
}

TEST(ManufacturedSolution, SecondOrderL2Convergence)
{
  // u* = cos(pi x1) sin(pi x2 / 2): zero on the bottom edge, zero normal flux elsewhere.
  auto exact = [](const Vec2 &x) {
    return std::cos(std::numbers::pi * x.x) * std::sin(0.5 * std::numbers::pi * x.y);
  };
  auto p = ProblemDef::source_problem();
  p.source = [&](const Vec2 &x) {
    const double u = exact(x);
    return 1.25 * std::numbers::pi * std::numbers::pi * u + u * u * u;
  };
  std::vector<double> errors;
  for (int n : {8, 16, 32})
  {
    const auto s = square_space(n);
    const auto sol = newton_solve(p, Field::zeros(s), Field::zeros(s));
    errors.push_back(l2_error(sol.u, exact));
  }
  for (std::size_t k = 1; k < errors.size(); ++k)
  {
    const double order = std::log2(errors[k - 1] / errors[k]);
    EXPECT_GE(order, 1.9) << "refinement " << k;
  }
}
