// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "nopc/error.hpp"
#include "nopc/mesh.hpp"

using namespace nopc;

namespace
{

std::size_t count_tag(const Mesh &m, BoundaryTag tag)
{
  return static_cast<std::size_t>(std::count_if(m.facets().begin(), m.facets().end(),
                                                [tag](const Facet &f) { return f.tag == tag; }));
}

double dist_to_circle(const Vec2 &p, const Circle &c)
{
  return std::abs(std::hypot(p.x - c.center.x, p.y - c.center.y) - c.radius);
}

const Circle &nearest_void(const Vec2 &p, std::span<const Circle> voids)
{
  return *std::min_element(voids.begin(), voids.end(), [&](const Circle &a, const Circle &b) {
    return dist_to_circle(p, a) < dist_to_circle(p, b);
  });
}

}  // namespace

TEST(UnitSquareQuad, SingleCell)
{
  const auto m = build_unit_square_quad(1);
  EXPECT_EQ(m.num_nodes(), 4u);
  EXPECT_EQ(m.num_elements(), 1u);
  EXPECT_EQ(m.kind(), ElementKind::Quad4);
  EXPECT_EQ(m.facets().size(), 4u);
  EXPECT_EQ(count_tag(m, BoundaryTag::GammaBottom), 1u);
  EXPECT_EQ(count_tag(m, BoundaryTag::GammaOther), 3u);
}

TEST(UnitSquareQuad, Counts)
{
  const auto m2 = build_unit_square_quad(2);
  EXPECT_EQ(m2.num_nodes(), 9u);
  EXPECT_EQ(m2.num_elements(), 4u);
  EXPECT_EQ(m2.facets().size(), 8u);

  const auto m64 = build_unit_square_quad(64);
  EXPECT_EQ(m64.num_nodes(), 4225u);
  EXPECT_EQ(m64.num_elements(), 4096u);
  EXPECT_EQ(count_tag(m64, BoundaryTag::GammaBottom), 64u);
  EXPECT_NO_THROW(validate(m64));
  EXPECT_NEAR(m64.tagged_length(BoundaryTag::GammaBottom), 1.0, 1e-14);
}

TEST(UnitSquareQuad, RejectsZero)
{
  EXPECT_THROW(build_unit_square_quad(0), std::invalid_argument);
}

TEST(VoidedSquare, DefaultGeometry)
{
  const auto voids = default_voids();
  const double h = 0.03;
  const auto m = build_voided_square_tri(h, voids);
  EXPECT_NO_THROW(validate(m));
  EXPECT_GT(min_jacobian(m), 0.0);

  // Tags are exhaustive: only in/out.
  EXPECT_EQ(count_tag(m, BoundaryTag::GammaIn) + count_tag(m, BoundaryTag::GammaOut),
            m.facets().size());
  EXPECT_NEAR(m.tagged_length(BoundaryTag::GammaOut), 4.0, 1e-6);

  std::map<const Circle *, double> loop_length;
  std::map<const Circle *, std::size_t> loop_facets;
  std::map<const Circle *, double> longest;
  for (const auto &f : m.facets())
  {
    if (f.tag != BoundaryTag::GammaIn)
    {
      continue;
    }
    const auto &a = m.nodes()[f.nodes[0]];
    const auto &b = m.nodes()[f.nodes[1]];
    const auto &c = nearest_void(a, voids);
    EXPECT_LE(dist_to_circle(a, c), 1e-12);
    EXPECT_LE(dist_to_circle(b, c), 1e-12);
    EXPECT_EQ(&nearest_void(b, voids), &c);
    loop_length[&c] += m.facet_length(f);
    ++loop_facets[&c];
    longest[&c] = std::max(longest[&c], m.facet_length(f));
  }
  ASSERT_EQ(loop_length.size(), 2u);
  for (const auto &[c, len] : loop_length)
  {
    // An inscribed polygon with chords of angle theta_i loses sum R theta_i^3 / 24.
    const double circumference = 2.0 * std::numbers::pi * c->radius;
    const double theta_max = 2.0 * std::asin(longest[c] / (2.0 * c->radius));
    EXPECT_LE(len, circumference);
    EXPECT_LE(circumference - len, circumference * theta_max * theta_max / 24.0 * 1.01);
    EXPECT_GE(loop_facets[c], 8u);
  }
}

TEST(VoidedSquare, LoopsAreClosed)
{
  for (double h : {0.05, 0.03, 0.02, 0.0125})
  {
    const auto m = build_voided_square_tri(h, default_voids());
    std::vector<int> degree(m.num_nodes(), 0);
    for (const auto &f : m.facets())
    {
      ++degree[f.nodes[0]];
      ++degree[f.nodes[1]];
    }
    for (int d : degree)
    {
      EXPECT_TRUE(d == 0 || d == 2) << "h = " << h;
    }
  }
}

TEST(VoidedSquare, RejectsBadGeometry)
{
  const std::array<Circle, 2> tiny{{{{0.2, 0.8}, 1e-4}, {{0.7, 0.3}, 0.2}}};
  EXPECT_THROW(build_voided_square_tri(0.03, tiny), std::invalid_argument);
  const std::array<Circle, 2> overlap{{{{0.4, 0.5}, 0.2}, {{0.6, 0.5}, 0.2}}};
  EXPECT_THROW(build_voided_square_tri(0.03, overlap), std::invalid_argument);
  const std::array<Circle, 1> outside{{{{0.05, 0.5}, 0.1}}};
  EXPECT_THROW(build_voided_square_tri(0.03, outside), std::invalid_argument);
}

TEST(Classify, BottomFacet)
{
  const Mesh raw({{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.5}}, ElementKind::Tri3, {0, 1, 2}, {});
  const auto m = classify_boundary(raw.with_facets(extract_boundary_facets(raw)),
                                   ProblemId::Source, 0.01);
  ASSERT_EQ(m.facets().size(), 3u);
  for (const auto &f : m.facets())
  {
    const bool bottom = (f.nodes[0] == 0 && f.nodes[1] == 1) || (f.nodes[0] == 1 && f.nodes[1] == 0);
    EXPECT_EQ(f.tag, bottom ? BoundaryTag::GammaBottom : BoundaryTag::GammaOther);
  }
}

TEST(Classify, InteriorEdgesNeverBoundary)
{
  const auto m = build_unit_square_quad(3);
  std::map<std::pair<int, int>, int> owners;
  for (std::size_t e = 0; e < m.num_elements(); ++e)
  {
    const auto el = m.element(e);
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      const int i = el[a];
      const int j = el[(a + 1) % el.size()];
      ++owners[{std::min(i, j), std::max(i, j)}];
    }
  }
  for (const auto &f : m.facets())
  {
    EXPECT_EQ((owners[{std::min(f.nodes[0], f.nodes[1]), std::max(f.nodes[0], f.nodes[1])}]), 1);
  }
  EXPECT_EQ(m.facets().size(), 12u);
}

TEST(Classify, Idempotent)
{
  const auto m = build_voided_square_tri(0.04, default_voids());
  const auto again = classify_boundary(m, ProblemId::Flux, 0.01);
  EXPECT_EQ(again, m);
  const auto sq = build_unit_square_quad(4);
  EXPECT_EQ(classify_boundary(sq, ProblemId::Source, 0.0625), sq);
}

TEST(Classify, UnclassifiedFacetThrows)
{
  // Triangle floating in the middle of the square touches neither voids nor the square.
  const Mesh raw({{0.45, 0.45}, {0.55, 0.45}, {0.5, 0.55}}, ElementKind::Tri3, {0, 1, 2}, {});
  EXPECT_THROW(classify_boundary(raw.with_facets(extract_boundary_facets(raw)), ProblemId::Flux,
                                 0.001),
               std::runtime_error);
}

TEST(Gmsh, MinimalDocument)
{
  const char *doc = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                    "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
                    "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n";
  const auto m = import_gmsh_ascii(doc);
  EXPECT_EQ(m.num_nodes(), 3u);
  EXPECT_EQ(m.num_elements(), 1u);
  EXPECT_EQ(m.facets().size(), 3u);
}

TEST(Gmsh, ClockwiseTriangleIsReoriented)
{
  const char *doc = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                    "$Nodes\n3\n10 0 0 0\n20 1 0 0\n30 0 1 0\n$EndNodes\n"
                    "$Elements\n1\n1 2 2 0 1 10 30 20\n$EndElements\n";
  const auto m = import_gmsh_ascii(doc);
  EXPECT_GT(min_jacobian(m), 0.0);
}

TEST(Gmsh, Errors)
{
  EXPECT_THROW(import_gmsh_ascii("$MeshFormat\n3.0 0 8\n$EndMeshFormat\n"), FormatError);
  const char *dangling = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                         "$Nodes\n2\n1 0 0 0\n2 1 0 0\n$EndNodes\n"
                         "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n";
  EXPECT_THROW(import_gmsh_ascii(dangling), FormatError);
  const char *quad = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                     "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
                     "$Elements\n1\n1 3 2 0 1 1 2 3 4\n$EndElements\n";
  EXPECT_THROW(import_gmsh_ascii(quad), FormatError);
}

TEST(Gmsh, SkipsLinesPointsAndUnknownSections)
{
  const char *doc = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
                    "$PhysicalNames\n1\n1 1 \"wall\"\n$EndPhysicalNames\n"
                    "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 5 5 0\n$EndNodes\n"
                    "$Elements\n3\n1 15 2 0 1 4\n2 1 2 1 1 1 2\n3 2 2 0 1 1 2 3\n$EndElements\n";
  const auto m = import_gmsh_ascii(doc);
  EXPECT_EQ(m.num_nodes(), 3u);  // node 4 is unused by triangles
  EXPECT_EQ(m.num_elements(), 1u);
}

TEST(Gmsh, VoidedMeshRoundTrip)
{
  const auto voids = default_voids();
  const auto m = build_voided_square_tri(0.04, voids);
  const auto imported = import_gmsh_ascii(export_gmsh_ascii(m));
  EXPECT_EQ(imported.num_nodes(), m.num_nodes());
  EXPECT_EQ(imported.num_elements(), m.num_elements());
  const auto tagged = classify_boundary(imported, ProblemId::Flux, 0.01, voids);
  EXPECT_NO_THROW(validate(tagged));
  EXPECT_EQ(count_tag(tagged, BoundaryTag::GammaIn), count_tag(m, BoundaryTag::GammaIn));
  EXPECT_EQ(count_tag(tagged, BoundaryTag::GammaOut), count_tag(m, BoundaryTag::GammaOut));
  // Euler characteristic of a square with two holes: V - E + F = -1.
  const auto v = static_cast<long>(tagged.num_nodes());
  const auto f = static_cast<long>(tagged.num_elements());
  const auto b = static_cast<long>(tagged.facets().size());
  const long e = (3 * f + b) / 2;
  EXPECT_EQ(v - e + f, -1);
}

TEST(MeshText, BitExactRoundTrip)
{
  for (const auto &m : {build_unit_square_quad(5), build_voided_square_tri(0.05, default_voids())})
  {
    const auto text = write_mesh_text(m);
    const auto back = read_mesh_text(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(write_mesh_text(back), text);
  }
}

TEST(MeshText, Rejects)
{
  EXPECT_THROW(read_mesh_text("nodes 1\n0 0\nelements 1 hex8\n"), FormatError);
  EXPECT_THROW(read_mesh_text("nodes 1\n0 0\nelements 1 tri3\n0 0 5\nfacets 0\n"), FormatError);
  EXPECT_THROW(read_mesh_text("nodes 1\n0 zero\n"), FormatError);
}
