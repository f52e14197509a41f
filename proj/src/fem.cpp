// SPDX-License-Identifier: Apache-2.0

#include "nopc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nopc/error.hpp"
#include "nopc/kernels.hpp"

namespace nopc
{

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh,
                             std::vector<std::int32_t> dirichlet_dofs)
  : mesh_(std::move(mesh)), dirichlet_(std::move(dirichlet_dofs))
{
  NOPC_REQUIRE(mesh_ != nullptr, "null mesh");
  std::sort(dirichlet_.begin(), dirichlet_.end());
  NOPC_REQUIRE(std::adjacent_find(dirichlet_.begin(), dirichlet_.end()) == dirichlet_.end(),
               "duplicate Dirichlet dof");
  const std::size_t n = mesh_->num_nodes();
  is_dirichlet_.assign(n, 0);
  for (auto d : dirichlet_)
  {
    NOPC_REQUIRE(d >= 0 && static_cast<std::size_t>(d) < n, "Dirichlet dof out of range");
    is_dirichlet_[d] = 1;
  }

  const auto kind = mesh_->kind();
  const std::size_t npe = mesh_->nodes_per_element();
  const std::size_t ne = mesh_->num_elements();
  quadrature_ = volume_quadrature(kind);
  points_.resize(ne * quadrature_.size());
  std::array<Vec2, max_nodes_per_element> verts{};
  for (std::size_t e = 0; e < ne; ++e)
  {
    const auto el = mesh_->element(e);
    for (std::size_t a = 0; a < npe; ++a)
    {
      verts[a] = mesh_->nodes()[el[a]];
    }
    for (std::size_t q = 0; q < quadrature_.size(); ++q)
    {
      auto p = evaluate_element(kind, std::span(verts.data(), npe), quadrature_[q].xi,
                                quadrature_[q].eta);
      if (!(p.det_j > 0.0))
      {
        throw std::invalid_argument("FunctionSpace: element " + std::to_string(e) +
                                    " has non-positive Jacobian");
      }
      points_[e * quadrature_.size() + q] = p;
    }
  }

  pattern_ = CsrMatrix::from_connectivity(n, mesh_->connectivity(), npe);
  scatter_.resize(ne * npe * npe);
  for (std::size_t e = 0; e < ne; ++e)
  {
    const auto el = mesh_->element(e);
    for (std::size_t a = 0; a < npe; ++a)
    {
      for (std::size_t b = 0; b < npe; ++b)
      {
        scatter_[(e * npe + a) * npe + b] = pattern_.find(el[a], el[b]);
      }
    }
  }

  mass_ = assemble_mass(*this);
  stiffness_ = assemble_stiffness(*this, 1.0);
  lumped_.assign(n, 0.0);
  const auto rp = mass_.row_ptr();
  const auto vals = mass_.values();
  for (std::size_t i = 0; i < n; ++i)
  {
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      lumped_[i] += vals[k];
    }
  }
  measure_ = 0.0;
  for (double v : lumped_)
  {
    measure_ += v;
  }
}

std::shared_ptr<const FunctionSpace> FunctionSpace::create(std::shared_ptr<const Mesh> mesh,
                                                           std::optional<BoundaryTag> dirichlet_tag)
{
  std::vector<std::int32_t> dofs;
  if (dirichlet_tag)
  {
    dofs = mesh->tagged_nodes(*dirichlet_tag);
  }
  return std::make_shared<const FunctionSpace>(std::move(mesh), std::move(dofs));
}

Field::Field(SpacePtr s, std::vector<double> v) : space(std::move(s)), values(std::move(v))
{
  NOPC_REQUIRE(space != nullptr, "null space");
  NOPC_REQUIRE(values.size() == space->size(), "coefficient count does not match the space");
}

Field Field::zeros(SpacePtr s)
{
  const auto n = s->size();
  return Field(std::move(s), std::vector<double>(n, 0.0));
}

Field Field::constant(SpacePtr s, double c)
{
  const auto n = s->size();
  return Field(std::move(s), std::vector<double>(n, c));
}

Field Field::interpolate(SpacePtr s, const std::function<double(const Vec2 &)> &fn)
{
  std::vector<double> v;
  v.reserve(s->size());
  for (const auto &p : s->mesh().nodes())
  {
    v.push_back(fn(p));
  }
  return Field(std::move(s), std::move(v));
}

double source_term(const Vec2 &x)
{
  const double s = std::sin(4.0 * std::numbers::pi * x.y);
  return std::exp(-4.0 * (1.0 - x.x) * (1.0 - x.x)) * s * s;
}

ProblemDef ProblemDef::source_problem()
{
  ProblemDef p;
  p.id = ProblemId::Source;
  p.diffusivity = DiffusivityTransform::Exponential;
  p.source = source_term;
  p.boundary_flux = 0.0;
  p.dirichlet_tag = BoundaryTag::GammaBottom;
  p.m_lower = 0.0;
  return p;
}

ProblemDef ProblemDef::flux_problem()
{
  ProblemDef p;
  p.id = ProblemId::Flux;
  p.diffusivity = DiffusivityTransform::Identity;
  p.boundary_flux = 0.1;
  p.flux_tag = BoundaryTag::GammaOut;
  p.dirichlet_tag = BoundaryTag::GammaIn;
  p.m_lower = 0.001;
  return p;
}

ProblemDef ProblemDef::for_id(ProblemId id)
{
  return id == ProblemId::Source ? source_problem() : flux_problem();
}

namespace
{

void check_finite(std::span<const double> v, const char *what)
{
  for (double x : v)
  {
    if (!std::isfinite(x))
    {
      throw NumericalError(std::string(what) + " has non-finite coefficients");
    }
  }
}

void check_same_mesh(const Field &a, const Field &b)
{
  NOPC_REQUIRE(a.space && b.space, "field without a space");
  NOPC_REQUIRE(a.space->mesh_ptr() == b.space->mesh_ptr() ||
                   a.space->mesh() == b.space->mesh(),
               "fields live on different meshes");
}

void check_inputs(const ProblemDef &problem, const Field &m, const Field &u)
{
  check_same_mesh(m, u);
  check_finite(m.values, "parameter");
  check_finite(u.values, "state");
  if (problem.diffusivity == DiffusivityTransform::Identity)
  {
    const double lo = *std::min_element(m.values.begin(), m.values.end());
    if (!(lo > 0.0) || lo < problem.m_lower * (1.0 - 1e-12))
    {
      throw std::invalid_argument("diffusivity below the admissible lower bound");
    }
  }
}

double diffusivity(const ProblemDef &problem, double mq)
{
  return problem.kappa0 *
         (problem.diffusivity == DiffusivityTransform::Exponential ? std::exp(mq) : mq);
}

template <class Body>
void for_each_element(std::size_t ne, bool parallel, Body &&body)
{
  const auto n = static_cast<std::ptrdiff_t>(ne);
  if (parallel)
  {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t e = 0; e < n; ++e)
    {
      body(static_cast<std::size_t>(e));
    }
  }
  else
  {
    for (std::ptrdiff_t e = 0; e < n; ++e)
    {
      body(static_cast<std::size_t>(e));
    }
  }
}

// Local vectors are computed independently per element and then summed in element
// order, which makes the result independent of the thread count.
template <class Kernel>
std::vector<double> assemble_vector(const FunctionSpace &s, bool parallel, Kernel &&kernel)
{
  const std::size_t npe = s.mesh().nodes_per_element();
  const std::size_t ne = s.mesh().num_elements();
  std::vector<double> local(ne * npe, 0.0);
  for_each_element(ne, parallel,
                   [&](std::size_t e) { kernel(e, std::span(local.data() + e * npe, npe)); });
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t e = 0; e < ne; ++e)
  {
    const auto el = s.mesh().element(e);
    for (std::size_t a = 0; a < npe; ++a)
    {
      out[el[a]] += local[e * npe + a];
    }
  }
  return out;
}

template <class Kernel>
CsrMatrix assemble_matrix(const FunctionSpace &s, bool parallel, Kernel &&kernel)
{
  const std::size_t npe = s.mesh().nodes_per_element();
  const std::size_t ne = s.mesh().num_elements();
  std::vector<double> local(ne * npe * npe, 0.0);
  for_each_element(ne, parallel, [&](std::size_t e) {
    kernel(e, std::span(local.data() + e * npe * npe, npe * npe));
  });
  CsrMatrix out = s.pattern();
  auto vals = out.values();
  for (std::size_t e = 0; e < ne; ++e)
  {
    for (std::size_t a = 0; a < npe; ++a)
    {
      for (std::size_t b = 0; b < npe; ++b)
      {
        vals[s.scatter(e, a, b)] += local[(e * npe + a) * npe + b];
      }
    }
  }
  return out;
}

struct PointValues
{
  double m = 0.0;
  double u = 0.0;
  double gx = 0.0;
  double gy = 0.0;
};

PointValues evaluate(const ElementPoint &p, std::span<const std::int32_t> el,
                     std::span<const double> m, std::span<const double> u)
{
  PointValues v;
  for (std::size_t a = 0; a < el.size(); ++a)
  {
    const auto i = el[a];
    v.m += p.n[a] * m[i];
    v.u += p.n[a] * u[i];
    v.gx += p.grad[a][0] * u[i];
    v.gy += p.grad[a][1] * u[i];
  }
  return v;
}

std::vector<double> residual_impl(const ProblemDef &problem, const Field &m, const Field &u,
                                  bool parallel)
{
  check_inputs(problem, m, u);
  const auto &s = *u.space;
  const auto &mesh = s.mesh();
  auto r = assemble_vector(s, parallel, [&](std::size_t e, std::span<double> local) {
    const auto el = mesh.element(e);
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const auto &p = pts[q];
      const double w = s.weight(e, q);
      const auto v = evaluate(p, el, m.values, u.values);
      const double kappa = diffusivity(problem, v.m);
      const double f = problem.source ? problem.source(p.x) : 0.0;
      const double reaction = problem.alpha * v.u * v.u * v.u - f;
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        local[a] += w * (kappa * (v.gx * p.grad[a][0] + v.gy * p.grad[a][1]) + reaction * p.n[a]);
      }
    }
  });
  if (problem.boundary_flux != 0.0)
  {
    const auto load = assemble_boundary_load(s, problem.flux_tag, problem.boundary_flux);
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      r[i] -= load[i];
    }
  }
  for (auto d : s.dirichlet_dofs())
  {
    r[d] = u.values[d];
  }
  return r;
}

CsrMatrix jacobian_impl(const ProblemDef &problem, const Field &m, const Field &u, bool parallel)
{
  check_inputs(problem, m, u);
  const auto &s = *u.space;
  const auto &mesh = s.mesh();
  return assemble_matrix(s, parallel, [&](std::size_t e, std::span<double> local) {
    const auto el = mesh.element(e);
    const std::size_t npe = el.size();
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const auto &p = pts[q];
      const double w = s.weight(e, q);
      const auto v = evaluate(p, el, m.values, u.values);
      const double kappa = diffusivity(problem, v.m);
      const double react = 3.0 * problem.alpha * v.u * v.u;
      for (std::size_t a = 0; a < npe; ++a)
      {
        for (std::size_t b = 0; b < npe; ++b)
        {
          local[a * npe + b] +=
              w * (kappa * (p.grad[a][0] * p.grad[b][0] + p.grad[a][1] * p.grad[b][1]) +
                   react * p.n[a] * p.n[b]);
        }
      }
    }
  });
}

}  // namespace

double diffusivity_value(const ProblemDef &problem, double m)
{
  return diffusivity(problem, m);
}

std::vector<double> assemble_residual(const ProblemDef &problem, const Field &m, const Field &u)
{
  return residual_impl(problem, m, u, true);
}

CsrMatrix assemble_jacobian_unconstrained(const ProblemDef &problem, const Field &m,
                                          const Field &u)
{
  return jacobian_impl(problem, m, u, true);
}

CsrMatrix assemble_jacobian(const ProblemDef &problem, const Field &m, const Field &u)
{
  auto j = jacobian_impl(problem, m, u, true);
  j.eliminate(u.space->dirichlet_dofs());
  return j;
}

std::vector<double> apply_second_derivative(const ProblemDef &problem, const Field &m,
                                            const Field &u, const Field &p, const Field &q)
{
  check_inputs(problem, m, u);
  check_same_mesh(u, p);
  check_same_mesh(u, q);
  const auto &s = *u.space;
  const auto &mesh = s.mesh();
  auto out = assemble_vector(s, true, [&](std::size_t e, std::span<double> local) {
    const auto el = mesh.element(e);
    const auto pts = s.element_points(e);
    for (std::size_t k = 0; k < pts.size(); ++k)
    {
      const auto &pt = pts[k];
      const double w = s.weight(e, k);
      double uq = 0.0, pq = 0.0, qq = 0.0;
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        uq += pt.n[a] * u.values[el[a]];
        pq += pt.n[a] * p.values[el[a]];
        qq += pt.n[a] * q.values[el[a]];
      }
      const double c = w * 6.0 * problem.alpha * uq * pq * qq;
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        local[a] += c * pt.n[a];
      }
    }
  });
  for (auto d : s.dirichlet_dofs())
  {
    out[d] = 0.0;
  }
  return out;
}

CsrMatrix assemble_mass(const FunctionSpace &s)
{
  return assemble_matrix(s, true, [&](std::size_t e, std::span<double> local) {
    const std::size_t npe = s.mesh().nodes_per_element();
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const double w = s.weight(e, q);
      for (std::size_t a = 0; a < npe; ++a)
      {
        for (std::size_t b = 0; b < npe; ++b)
        {
          local[a * npe + b] += w * pts[q].n[a] * pts[q].n[b];
        }
      }
    }
  });
}

namespace
{

template <class Coef>
CsrMatrix stiffness_impl(const FunctionSpace &s, Coef &&coef)
{
  return assemble_matrix(s, true, [&](std::size_t e, std::span<double> local) {
    const std::size_t npe = s.mesh().nodes_per_element();
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      const auto &p = pts[q];
      const double w = s.weight(e, q) * coef(e, p);
      for (std::size_t a = 0; a < npe; ++a)
      {
        for (std::size_t b = 0; b < npe; ++b)
        {
          local[a * npe + b] += w * (p.grad[a][0] * p.grad[b][0] + p.grad[a][1] * p.grad[b][1]);
        }
      }
    }
  });
}

}  // namespace

CsrMatrix assemble_stiffness(const FunctionSpace &s, double coefficient)
{
  return stiffness_impl(s, [coefficient](std::size_t, const ElementPoint &) { return coefficient; });
}

CsrMatrix assemble_stiffness(const FunctionSpace &s, const Field &coefficient)
{
  NOPC_REQUIRE(coefficient.size() == s.size(), "coefficient field does not match the space");
  return stiffness_impl(s, [&](std::size_t e, const ElementPoint &p) {
    const auto el = s.mesh().element(e);
    double c = 0.0;
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      c += p.n[a] * coefficient.values[el[a]];
    }
    return c;
  });
}

CsrMatrix assemble_boundary_mass(const FunctionSpace &s, std::optional<BoundaryTag> tag)
{
  CsrMatrix out = s.pattern();
  const auto &mesh = s.mesh();
  for (const auto &f : mesh.facets())
  {
    if (tag && f.tag != *tag)
    {
      continue;
    }
    // Exact P1 edge mass: L/6 * [2 1; 1 2]
    const double len = mesh.facet_length(f);
    const auto i = f.nodes[0];
    const auto j = f.nodes[1];
    out.add(i, i, len / 3.0);
    out.add(j, j, len / 3.0);
    out.add(i, j, len / 6.0);
    out.add(j, i, len / 6.0);
  }
  return out;
}

std::vector<double> assemble_boundary_load(const FunctionSpace &s, BoundaryTag tag, double g)
{
  std::vector<double> out(s.size(), 0.0);
  const auto &mesh = s.mesh();
  for (const auto &f : mesh.facets())
  {
    if (f.tag != tag)
    {
      continue;
    }
    const double half = 0.5 * g * mesh.facet_length(f);
    out[f.nodes[0]] += half;
    out[f.nodes[1]] += half;
  }
  return out;
}

double boundary_integral(const Field &field, BoundaryTag tag, double weight)
{
  const auto &mesh = field.space->mesh();
  if (!mesh.has_tag(tag))
  {
    throw std::invalid_argument("boundary_integral: mesh has no facets tagged '" +
                                std::string(to_string(tag)) + "'");
  }
  double s = 0.0;
  for (const auto &f : mesh.facets())
  {
    if (f.tag != tag)
    {
      continue;
    }
    const double len = mesh.facet_length(f);
    const double a = field.values[f.nodes[0]];
    const double b = field.values[f.nodes[1]];
    for (const auto &q : edge_quadrature())
    {
      s += q.weight * len * ((1.0 - q.xi) * a + q.xi * b);
    }
  }
  return weight * s;
}

double integrate(const Field &field)
{
  return serial::dot(field.space->lumped_mass(), field.values);
}

void apply_dirichlet(CsrMatrix &a, std::span<double> rhs, std::span<const std::int32_t> dofs,
                     std::span<const double> values)
{
  NOPC_REQUIRE(rhs.size() == a.size(), "rhs length mismatch");
  NOPC_REQUIRE(values.size() == dofs.size(), "one value per constrained dof");
  std::vector<double> lift(a.size(), 0.0);
  std::vector<char> fixed(a.size(), 0);
  for (std::size_t k = 0; k < dofs.size(); ++k)
  {
    lift[dofs[k]] = values[k];
    fixed[dofs[k]] = 1;
  }
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto v = a.values();
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    if (fixed[i])
    {
      continue;
    }
    for (auto k = rp[i]; k < rp[i + 1]; ++k)
    {
      if (fixed[ci[k]])
      {
        rhs[i] -= v[k] * lift[ci[k]];
      }
    }
  }
  a.eliminate(dofs);
  for (std::size_t k = 0; k < dofs.size(); ++k)
  {
    rhs[dofs[k]] = values[k];
  }
}

double free_norm(const FunctionSpace &space, std::span<const double> residual)
{
  NOPC_REQUIRE(residual.size() == space.size(), "length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < residual.size(); ++i)
  {
    if (!space.is_dirichlet(i))
    {
      s += residual[i] * residual[i];
    }
  }
  return std::sqrt(s);
}

double norm(const FunctionSpace &space, std::span<const double> c, NormKind kind)
{
  NOPC_REQUIRE(c.size() == space.size(), "length mismatch");
  switch (kind)
  {
    case NormKind::L2Coeff:
      return std::sqrt(serial::dot(c, c));
    case NormKind::L2:
    {
      const auto mc = space.mass().multiply(c);
      return std::sqrt(std::max(0.0, serial::dot(c, mc)));
    }
    case NormKind::H1:
    {
      const auto mc = space.mass().multiply(c);
      const auto kc = space.stiffness().multiply(c);
      return std::sqrt(std::max(0.0, serial::dot(c, mc) + serial::dot(c, kc)));
    }
  }
  return 0.0;
}

double norm(const Field &field, NormKind kind)
{
  return norm(*field.space, field.values, kind);
}

double l2_error(const Field &u, const std::function<double(const Vec2 &)> &exact)
{
  const auto &s = *u.space;
  double err = 0.0;
  for (std::size_t e = 0; e < s.mesh().num_elements(); ++e)
  {
    const auto el = s.mesh().element(e);
    const auto pts = s.element_points(e);
    for (std::size_t q = 0; q < pts.size(); ++q)
    {
      double uh = 0.0;
      for (std::size_t a = 0; a < el.size(); ++a)
      {
        uh += pts[q].n[a] * u.values[el[a]];
      }
      const double d = uh - exact(pts[q].x);
      err += s.weight(e, q) * d * d;
    }
  }
  return std::sqrt(err);
}

}  // namespace nopc

namespace nopc::serial
{

std::vector<double> assemble_residual(const ProblemDef &problem, const Field &m, const Field &u)
{
  return residual_impl(problem, m, u, false);
}

CsrMatrix assemble_jacobian_unconstrained(const ProblemDef &problem, const Field &m,
                                          const Field &u)
{
  return jacobian_impl(problem, m, u, false);
}

}  // namespace nopc::serial
