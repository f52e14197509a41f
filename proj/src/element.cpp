// SPDX-License-Identifier: Apache-2.0

#include "nopc/element.hpp"

#include <cmath>

namespace nopc
{

namespace
{

constexpr double tri_a1 = 0.44594849091596488632;
constexpr double tri_w1 = 0.22338158967801146570 / 2.0;
constexpr double tri_a2 = 0.09157621350977074346;
constexpr double tri_w2 = 0.10995174365532186764 / 2.0;

constexpr std::array<QuadraturePoint, 6> tri_rule{{
    {tri_a1, tri_a1, tri_w1},
    {1.0 - 2.0 * tri_a1, tri_a1, tri_w1},
    {tri_a1, 1.0 - 2.0 * tri_a1, tri_w1},
    {tri_a2, tri_a2, tri_w2},
    {1.0 - 2.0 * tri_a2, tri_a2, tri_w2},
    {tri_a2, 1.0 - 2.0 * tri_a2, tri_w2},
}};

std::array<QuadraturePoint, 9> make_quad_rule()
{
  const double g = std::sqrt(0.6);
  const std::array<double, 3> x{-g, 0.0, g};
  const std::array<double, 3> w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::array<QuadraturePoint, 9> rule{};
  for (int j = 0; j < 3; ++j)
  {
    for (int i = 0; i < 3; ++i)
    {
      rule[3 * j + i] = {x[i], x[j], w[i] * w[j]};
    }
  }
  return rule;
}

const std::array<QuadraturePoint, 9> quad_rule = make_quad_rule();

std::array<QuadraturePoint, 2> make_edge_rule()
{
  const double d = 0.5 / std::sqrt(3.0);
  return {{{0.5 - d, 0.0, 0.5}, {0.5 + d, 0.0, 0.5}}};
}

const std::array<QuadraturePoint, 2> edge_rule = make_edge_rule();

constexpr std::array<double, 4> quad_xi{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> quad_eta{-1.0, -1.0, 1.0, 1.0};

}  // namespace

std::span<const QuadraturePoint> volume_quadrature(ElementKind kind)
{
  if (kind == ElementKind::Tri3)
  {
    return tri_rule;
  }
  return quad_rule;
}

std::span<const QuadraturePoint> edge_quadrature()
{
  return edge_rule;
}

void shape_values(ElementKind kind, double xi, double eta, std::span<double> n)
{
  if (kind == ElementKind::Tri3)
  {
    n[0] = 1.0 - xi - eta;
    n[1] = xi;
    n[2] = eta;
    return;
  }
  for (int a = 0; a < 4; ++a)
  {
    n[a] = 0.25 * (1.0 + quad_xi[a] * xi) * (1.0 + quad_eta[a] * eta);
  }
}

void shape_gradients(ElementKind kind, double xi, double eta, std::span<double> dn)
{
  if (kind == ElementKind::Tri3)
  {
    dn[0] = -1.0;
    dn[1] = -1.0;
    dn[2] = 1.0;
    dn[3] = 0.0;
    dn[4] = 0.0;
    dn[5] = 1.0;
    return;
  }
  for (int a = 0; a < 4; ++a)
  {
    dn[2 * a] = 0.25 * quad_xi[a] * (1.0 + quad_eta[a] * eta);
    dn[2 * a + 1] = 0.25 * quad_eta[a] * (1.0 + quad_xi[a] * xi);
  }
}

ElementPoint evaluate_element(ElementKind kind, std::span<const Vec2> vertices, double xi,
                              double eta)
{
  ElementPoint p;
  const std::size_t npe = nodes_per_element(kind);
  std::array<double, 2 * max_nodes_per_element> dref{};
  shape_values(kind, xi, eta, p.n);
  shape_gradients(kind, xi, eta, dref);

  // J = [dx/dxi dx/deta; dy/dxi dy/deta]
  double j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
  for (std::size_t a = 0; a < npe; ++a)
  {
    j00 += vertices[a].x * dref[2 * a];
    j01 += vertices[a].x * dref[2 * a + 1];
    j10 += vertices[a].y * dref[2 * a];
    j11 += vertices[a].y * dref[2 * a + 1];
    p.x.x += vertices[a].x * p.n[a];
    p.x.y += vertices[a].y * p.n[a];
  }
  p.det_j = j00 * j11 - j01 * j10;
  const double inv = 1.0 / p.det_j;
  for (std::size_t a = 0; a < npe; ++a)
  {
    const double dxi = dref[2 * a];
    const double deta = dref[2 * a + 1];
    // grad = J^{-T} (dxi, deta)
    p.grad[a][0] = inv * (j11 * dxi - j10 * deta);
    p.grad[a][1] = inv * (-j01 * dxi + j00 * deta);
  }
  return p;
}

}  // namespace nopc
