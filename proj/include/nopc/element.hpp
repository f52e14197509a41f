// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_ELEMENT_HPP
#define NOPC_ELEMENT_HPP

#include <array>
#include <span>

#include "nopc/mesh.hpp"

namespace nopc
{

// Reference-element data for the first-order Lagrange elements.
//   Tri3:  reference triangle (0,0), (1,0), (0,1); 6-point degree-4 rule.
//   Quad4: reference square [-1,1]^2, nodes counter-clockwise from (-1,-1); 3x3 Gauss.
// Both rules integrate the quartic u^3 v term exactly on affine elements.

struct QuadraturePoint
{
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;
};

inline constexpr std::size_t max_nodes_per_element = 4;

std::span<const QuadraturePoint> volume_quadrature(ElementKind kind);

// Two-point Gauss rule on [0, 1]; weights sum to 1.
std::span<const QuadraturePoint> edge_quadrature();

void shape_values(ElementKind kind, double xi, double eta, std::span<double> n);
// dn[2a] = dN_a/dxi, dn[2a+1] = dN_a/deta
void shape_gradients(ElementKind kind, double xi, double eta, std::span<double> dn);

// Geometry of one element at one reference point.
struct ElementPoint
{
  std::array<double, max_nodes_per_element> n{};
  // physical gradients: grad[a] = (dN_a/dx, dN_a/dy)
  std::array<std::array<double, 2>, max_nodes_per_element> grad{};
  double det_j = 0.0;
  Vec2 x;
};

ElementPoint evaluate_element(ElementKind kind, std::span<const Vec2> vertices, double xi,
                              double eta);

}  // namespace nopc

#endif  // NOPC_ELEMENT_HPP
