// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_FEM_HPP
#define NOPC_FEM_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nopc/element.hpp"
#include "nopc/mesh.hpp"
#include "nopc/sparse.hpp"

namespace nopc
{

// First-order Lagrange space on a mesh (P1 on triangles, Q1 on quads). One dof per node.
// Element geometry at the quadrature points, the matrix pattern, and the mass and
// unit-stiffness matrices are computed once at construction.
class FunctionSpace
{
public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, std::vector<std::int32_t> dirichlet_dofs);

  // Space with Dirichlet dofs on every node of the tagged facets (none if no tag).
  static std::shared_ptr<const FunctionSpace> create(std::shared_ptr<const Mesh> mesh,
                                                     std::optional<BoundaryTag> dirichlet_tag);

  const Mesh &mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh> &mesh_ptr() const { return mesh_; }
  std::size_t size() const { return mesh_->num_nodes(); }
  std::span<const std::int32_t> dirichlet_dofs() const { return dirichlet_; }
  bool is_dirichlet(std::size_t i) const { return is_dirichlet_[i] != 0; }

  std::size_t points_per_element() const { return quadrature_.size(); }
  std::span<const QuadraturePoint> quadrature() const { return quadrature_; }
  // Geometry at the quadrature points of element e.
  std::span<const ElementPoint> element_points(std::size_t e) const
  {
    return {points_.data() + e * quadrature_.size(), quadrature_.size()};
  }
  // Quadrature weight times Jacobian determinant.
  double weight(std::size_t e, std::size_t q) const
  {
    return quadrature_[q].weight * points_[e * quadrature_.size() + q].det_j;
  }
  // Position in pattern().values() of the local entry (a, b) of element e.
  std::int64_t scatter(std::size_t e, std::size_t a, std::size_t b) const
  {
    const std::size_t npe = mesh_->nodes_per_element();
    return scatter_[(e * npe + a) * npe + b];
  }

  // Zero-valued matrix with the element-coupling pattern.
  const CsrMatrix &pattern() const { return pattern_; }
  const CsrMatrix &mass() const { return mass_; }
  // Stiffness with unit coefficient.
  const CsrMatrix &stiffness() const { return stiffness_; }
  // Row sums of the mass matrix; these are the integrals of the basis functions.
  std::span<const double> lumped_mass() const { return lumped_; }
  double measure() const { return measure_; }

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::int32_t> dirichlet_;
  std::vector<char> is_dirichlet_;
  std::span<const QuadraturePoint> quadrature_;
  std::vector<ElementPoint> points_;
  std::vector<std::int64_t> scatter_;
  CsrMatrix pattern_;
  CsrMatrix mass_;
  CsrMatrix stiffness_;
  std::vector<double> lumped_;
  double measure_ = 0.0;
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

// Nodal coefficient vector on a function space.
struct Field
{
  SpacePtr space;
  std::vector<double> values;

  Field() = default;
  Field(SpacePtr s, std::vector<double> v);

  static Field zeros(SpacePtr s);
  static Field constant(SpacePtr s, double c);
  static Field interpolate(SpacePtr s, const std::function<double(const Vec2 &)> &fn);

  std::size_t size() const { return values.size(); }
};

enum class DiffusivityTransform
{
  Exponential,  // kappa = kappa0 * exp(m)
  Identity      // kappa = kappa0 * m
};

// Coefficients of the residual
//   <v, R(m,u)> = int kappa(m) grad u . grad v + alpha u^3 v - f v dx - int_{flux_tag} g v dS
struct ProblemDef
{
  ProblemId id = ProblemId::Source;
  DiffusivityTransform diffusivity = DiffusivityTransform::Exponential;
  double kappa0 = 1.0;
  double alpha = 1.0;
  std::function<double(const Vec2 &)> source;  // empty means f = 0
  double boundary_flux = 0.0;
  BoundaryTag flux_tag = BoundaryTag::GammaOut;
  BoundaryTag dirichlet_tag = BoundaryTag::GammaBottom;
  // Lower bound required of m when the diffusivity is m itself.
  double m_lower = 0.0;

  // -div(e^m grad u) + u^3 = f on the unit square, u = 0 on the bottom edge.
  static ProblemDef source_problem();
  // -div(m grad u) + u^3 = 0, u = 0 on the voids, flux 0.1 on the outer boundary.
  static ProblemDef flux_problem();
  static ProblemDef for_id(ProblemId id);
};

// kappa(m) at a point
double diffusivity_value(const ProblemDef &problem, double m);

// f(x) = exp(-4 (1 - x1)^2) sin(4 pi x2)^2
double source_term(const Vec2 &x);

// Residual vector. Free entries are b(m,u;psi_i) - l(psi_i); constrained entries hold
// the constraint violation u_i - 0.
std::vector<double> assemble_residual(const ProblemDef &problem, const Field &m, const Field &u);

// Jacobian delta_u R(m,u) with Dirichlet rows and columns replaced by the identity.
CsrMatrix assemble_jacobian(const ProblemDef &problem, const Field &m, const Field &u);
// Jacobian without boundary-condition elimination.
CsrMatrix assemble_jacobian_unconstrained(const ProblemDef &problem, const Field &m,
                                          const Field &u);

// entry i = int 6 alpha u p q psi_i dx, zero on Dirichlet dofs
std::vector<double> apply_second_derivative(const ProblemDef &problem, const Field &m,
                                            const Field &u, const Field &p, const Field &q);

CsrMatrix assemble_mass(const FunctionSpace &space);
CsrMatrix assemble_stiffness(const FunctionSpace &space, double coefficient);
// Coefficient interpolated to quadrature points.
CsrMatrix assemble_stiffness(const FunctionSpace &space, const Field &coefficient);
// Boundary mass int_{facets} psi_i psi_j dS, over every facet when tag is empty.
CsrMatrix assemble_boundary_mass(const FunctionSpace &space, std::optional<BoundaryTag> tag);

// entry i = int_{tag} g psi_i dS
std::vector<double> assemble_boundary_load(const FunctionSpace &space, BoundaryTag tag, double g);

// int_{tag} weight * field dS
double boundary_integral(const Field &field, BoundaryTag tag, double weight);

// int field dx
double integrate(const Field &field);

// Symmetric elimination: rhs_i -= A_id * value_d on free rows, then rows and columns of
// the constrained dofs become identity rows with rhs_d = value_d.
void apply_dirichlet(CsrMatrix &a, std::span<double> rhs, std::span<const std::int32_t> dofs,
                     std::span<const double> values);

// Euclidean norm of the residual restricted to free dofs.
double free_norm(const FunctionSpace &space, std::span<const double> residual);

enum class NormKind
{
  L2Coeff,
  L2,
  H1
};

double norm(const Field &field, NormKind kind);
double norm(const FunctionSpace &space, std::span<const double> coeffs, NormKind kind);

// || u_h - exact ||_{L2} by quadrature
double l2_error(const Field &u, const std::function<double(const Vec2 &)> &exact);

}  // namespace nopc

namespace nopc::serial
{

// Single-threaded assembly; bit-identical to the parallel versions.
std::vector<double> assemble_residual(const ProblemDef &problem, const Field &m, const Field &u);
CsrMatrix assemble_jacobian_unconstrained(const ProblemDef &problem, const Field &m,
                                          const Field &u);

}  // namespace nopc::serial

#endif  // NOPC_FEM_HPP
