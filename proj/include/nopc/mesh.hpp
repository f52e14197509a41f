// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_MESH_HPP
#define NOPC_MESH_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nopc
{

struct Vec2
{
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2 &, const Vec2 &) = default;
};

enum class ElementKind
{
  Tri3,
  Quad4
};

enum class BoundaryTag
{
  GammaBottom,
  GammaIn,
  GammaOut,
  GammaOther
};

// The two model problems:
//   Source: unit square, -div(e^m grad u) + u^3 = f, u = 0 on the bottom edge.
//   Flux:   square with two voids, -div(m grad u) + u^3 = 0, u = 0 on the void
//           boundaries, flux g = 0.1 on the outer boundary.
enum class ProblemId
{
  Source,
  Flux
};

struct Circle
{
  Vec2 center;
  double radius = 0.0;
};

// The voids of the flux problem: centers (0.2, 0.8) and (0.7, 0.3), radii 0.1 and 0.2.
std::array<Circle, 2> default_voids();

struct Facet
{
  std::array<std::int32_t, 2> nodes{};
  BoundaryTag tag = BoundaryTag::GammaOther;
  friend bool operator==(const Facet &, const Facet &) = default;
};

std::size_t nodes_per_element(ElementKind kind);
std::string_view to_string(ElementKind kind);
std::string_view to_string(BoundaryTag tag);
BoundaryTag parse_boundary_tag(std::string_view s);

// Immutable 2D mesh with a single element kind. Elements are stored counter-clockwise;
// boundary facets follow the orientation of their owning element.
class Mesh
{
public:
  Mesh() = default;
  Mesh(std::vector<Vec2> nodes, ElementKind kind, std::vector<std::int32_t> connectivity,
       std::vector<Facet> facets);

  std::span<const Vec2> nodes() const { return nodes_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  ElementKind kind() const { return kind_; }
  std::size_t nodes_per_element() const { return nopc::nodes_per_element(kind_); }
  std::size_t num_elements() const { return connectivity_.size() / nodes_per_element(); }
  std::span<const std::int32_t> connectivity() const { return connectivity_; }
  std::span<const std::int32_t> element(std::size_t e) const
  {
    return {connectivity_.data() + e * nodes_per_element(), nodes_per_element()};
  }
  std::span<const Facet> facets() const { return facets_; }

  bool has_tag(BoundaryTag tag) const;
  // Sorted, unique nodes touched by facets with this tag.
  std::vector<std::int32_t> tagged_nodes(BoundaryTag tag) const;
  double facet_length(const Facet &f) const;
  double tagged_length(BoundaryTag tag) const;

  Mesh with_facets(std::vector<Facet> facets) const;

  friend bool operator==(const Mesh &, const Mesh &) = default;

private:
  std::vector<Vec2> nodes_;
  ElementKind kind_ = ElementKind::Tri3;
  std::vector<std::int32_t> connectivity_;
  std::vector<Facet> facets_;
};

// n x n bilinear quadrilaterals on [0,1]^2. Facets on y = 0 are GammaBottom, the rest
// GammaOther.
Mesh build_unit_square_quad(int n);

// Structured triangulation of [0,1]^2 with the voids cut out: elements with centroid
// inside a circle are dropped and the nodes of the resulting inner boundary are moved
// radially onto their circle. Facets on the circles are GammaIn, on the square GammaOut.
Mesh build_voided_square_tri(double h, std::span<const Circle> voids);

// Gmsh MSH 2.2 ASCII. Only 3-node triangles are kept as elements (line and point
// elements are skipped); unused nodes are dropped and the rest renumbered in file
// order. Boundary facets are the edges owned by exactly one triangle, tagged
// GammaOther until classify_boundary is run.
Mesh import_gmsh_ascii(std::string_view text);
std::string export_gmsh_ascii(const Mesh &mesh);

// Edges owned by exactly one element, oriented like that element.
std::vector<Facet> extract_boundary_facets(const Mesh &mesh);

// Geometric tagging from facet midpoints:
//   Source: |y| <= tol -> GammaBottom, otherwise GammaOther.
//   Flux:   within tol of a void circle -> GammaIn, within tol of the square -> GammaOut.
// Throws if a facet cannot be classified.
Mesh classify_boundary(const Mesh &mesh, ProblemId problem, double tol,
                       std::span<const Circle> voids);
Mesh classify_boundary(const Mesh &mesh, ProblemId problem, double tol);

// Checks the mesh invariants: positive Jacobian at every quadrature point, facets
// owned by exactly one element, every boundary node on exactly two facets.
// Throws std::runtime_error describing the first violation.
void validate(const Mesh &mesh);
double min_jacobian(const Mesh &mesh);

// Plain-text round-trip format:
//   nodes N / N lines "x y" / elements E kind / E index lines / facets F / F lines "i j tag"
std::string write_mesh_text(const Mesh &mesh);
Mesh read_mesh_text(std::string_view text);

}  // namespace nopc

#endif  // NOPC_MESH_HPP
