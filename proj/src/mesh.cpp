// SPDX-License-Identifier: Apache-2.0

#include "nopc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "nopc/element.hpp"
#include "nopc/error.hpp"
#include "nopc/text_format.hpp"

namespace nopc
{

std::array<Circle, 2> default_voids()
{
  return {{{{0.2, 0.8}, 0.1}, {{0.7, 0.3}, 0.2}}};
}

std::size_t nodes_per_element(ElementKind kind)
{
  return kind == ElementKind::Tri3 ? 3 : 4;
}

std::string_view to_string(ElementKind kind)
{
  return kind == ElementKind::Tri3 ? "tri3" : "quad4";
}

std::string_view to_string(BoundaryTag tag)
{
  switch (tag)
  {
    case BoundaryTag::GammaBottom:
      return "bottom";
    case BoundaryTag::GammaIn:
      return "in";
    case BoundaryTag::GammaOut:
      return "out";
    case BoundaryTag::GammaOther:
      return "other";
  }
  return "other";
}

BoundaryTag parse_boundary_tag(std::string_view s)
{
  if (s == "bottom")
  {
    return BoundaryTag::GammaBottom;
  }
  if (s == "in")
  {
    return BoundaryTag::GammaIn;
  }
  if (s == "out")
  {
    return BoundaryTag::GammaOut;
  }
  if (s == "other")
  {
    return BoundaryTag::GammaOther;
  }
  throw FormatError("unknown boundary tag '" + std::string(s) + "'");
}

Mesh::Mesh(std::vector<Vec2> nodes, ElementKind kind, std::vector<std::int32_t> connectivity,
           std::vector<Facet> facets)
  : nodes_(std::move(nodes)), kind_(kind), connectivity_(std::move(connectivity)),
    facets_(std::move(facets))
{
  NOPC_REQUIRE(connectivity_.size() % nopc::nodes_per_element(kind_) == 0,
               "connectivity length not a multiple of the element size");
  const auto n = static_cast<std::int32_t>(nodes_.size());
  for (auto i : connectivity_)
  {
    NOPC_REQUIRE(i >= 0 && i < n, "element references a missing node");
  }
  for (const auto &f : facets_)
  {
    NOPC_REQUIRE(f.nodes[0] >= 0 && f.nodes[0] < n && f.nodes[1] >= 0 && f.nodes[1] < n,
                 "facet references a missing node");
  }
}

bool Mesh::has_tag(BoundaryTag tag) const
{
  return std::any_of(facets_.begin(), facets_.end(),
                     [tag](const Facet &f) { return f.tag == tag; });
}

std::vector<std::int32_t> Mesh::tagged_nodes(BoundaryTag tag) const
{
  std::vector<std::int32_t> out;
  for (const auto &f : facets_)
  {
    if (f.tag == tag)
    {
      out.push_back(f.nodes[0]);
      out.push_back(f.nodes[1]);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Mesh::facet_length(const Facet &f) const
{
  const auto &a = nodes_[f.nodes[0]];
  const auto &b = nodes_[f.nodes[1]];
  return std::hypot(b.x - a.x, b.y - a.y);
}

double Mesh::tagged_length(BoundaryTag tag) const
{
  double s = 0.0;
  for (const auto &f : facets_)
  {
    if (f.tag == tag)
    {
      s += facet_length(f);
    }
  }
  return s;
}

Mesh Mesh::with_facets(std::vector<Facet> facets) const
{
  return Mesh(nodes_, kind_, connectivity_, std::move(facets));
}

namespace
{

std::uint64_t edge_key(std::int32_t a, std::int32_t b)
{
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

std::vector<Facet> boundary_edges(std::span<const std::int32_t> conn, std::size_t npe)
{
  struct Entry
  {
    Facet facet;
    int count = 0;
  };
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<Entry> entries;
  for (std::size_t e = 0; e < conn.size(); e += npe)
  {
    for (std::size_t a = 0; a < npe; ++a)
    {
      const auto i = conn[e + a];
      const auto j = conn[e + (a + 1) % npe];
      const auto key = edge_key(i, j);
      const auto [it, inserted] = index.try_emplace(key, entries.size());
      if (inserted)
      {
        entries.push_back({Facet{{i, j}, BoundaryTag::GammaOther}, 1});
      }
      else
      {
        ++entries[it->second].count;
      }
    }
  }
  std::vector<Facet> out;
  for (const auto &en : entries)
  {
    if (en.count == 1)
    {
      out.push_back(en.facet);
    }
  }
  return out;
}

double signed_area(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double distance_to_circle(const Vec2 &p, const Circle &c)
{
  return std::abs(std::hypot(p.x - c.center.x, p.y - c.center.y) - c.radius);
}

}  // namespace

std::vector<Facet> extract_boundary_facets(const Mesh &mesh)
{
  return boundary_edges(mesh.connectivity(), mesh.nodes_per_element());
}

Mesh build_unit_square_quad(int n)
{
  NOPC_REQUIRE(n >= 1, "need at least one subdivision per side");
  const auto stride = static_cast<std::int32_t>(n + 1);
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(stride) * stride);
  for (int j = 0; j <= n; ++j)
  {
    for (int i = 0; i <= n; ++i)
    {
      nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<std::int32_t> conn;
  conn.reserve(4 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      const auto p = j * stride + i;
      conn.insert(conn.end(), {p, p + 1, p + stride + 1, p + stride});
    }
  }
  Mesh raw(std::move(nodes), ElementKind::Quad4, std::move(conn), {});
  return classify_boundary(raw.with_facets(extract_boundary_facets(raw)), ProblemId::Source,
                           0.25 / n);
}

Mesh build_voided_square_tri(double h, std::span<const Circle> voids)
{
  NOPC_REQUIRE(h > 0.0 && h < 1.0, "edge length must be in (0, 1)");
  for (std::size_t c = 0; c < voids.size(); ++c)
  {
    const auto &v = voids[c];
    NOPC_REQUIRE(h < v.radius, "edge length must be below every void radius");
    const double margin = std::min({v.center.x - v.radius, 1.0 - v.center.x - v.radius,
                                    v.center.y - v.radius, 1.0 - v.center.y - v.radius});
    NOPC_REQUIRE(margin > h, "void must lie strictly inside the unit square");
    for (std::size_t d = 0; d < c; ++d)
    {
      const auto &w = voids[d];
      NOPC_REQUIRE(std::hypot(v.center.x - w.center.x, v.center.y - w.center.y) >
                       v.radius + w.radius + h,
                   "voids overlap");
    }
  }

  const int n = static_cast<int>(std::ceil(1.0 / h - 1e-12));
  const auto stride = static_cast<std::int32_t>(n + 1);
  std::vector<Vec2> nodes;
  for (int j = 0; j <= n; ++j)
  {
    for (int i = 0; i <= n; ++i)
    {
      nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }

  auto inside_void = [&](const Vec2 &p) {
    return std::any_of(voids.begin(), voids.end(), [&](const Circle &c) {
      return std::hypot(p.x - c.center.x, p.y - c.center.y) < c.radius;
    });
  };

  std::vector<std::int32_t> conn;
  auto push_tri = [&](std::int32_t a, std::int32_t b, std::int32_t c) {
    const Vec2 centroid{(nodes[a].x + nodes[b].x + nodes[c].x) / 3.0,
                        (nodes[a].y + nodes[b].y + nodes[c].y) / 3.0};
    if (!inside_void(centroid))
    {
      conn.insert(conn.end(), {a, b, c});
    }
  };
  // Alternating diagonals keep the cut boundary free of long staircase runs.
  for (int j = 0; j < n; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      const auto p00 = j * stride + i;
      const auto p10 = p00 + 1;
      const auto p01 = p00 + stride;
      const auto p11 = p01 + 1;
      if ((i + j) % 2 == 0)
      {
        push_tri(p00, p10, p11);
        push_tri(p00, p11, p01);
      }
      else
      {
        push_tri(p00, p10, p01);
        push_tri(p10, p11, p01);
      }
    }
  }

  auto on_square = [](const Vec2 &p) {
    return p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0;
  };

  // -1: not snapped, otherwise index of the circle the node sits on.
  std::vector<int> snapped(nodes.size(), -1);
  for (int pass = 0;; ++pass)
  {
    if (pass > 100)
    {
      throw NumericalError("void snapping did not settle");
    }
    for (const auto &f : boundary_edges(conn, 3))
    {
      for (auto i : f.nodes)
      {
        if (snapped[i] >= 0 || on_square(nodes[i]))
        {
          continue;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < voids.size(); ++c)
        {
          if (distance_to_circle(nodes[i], voids[c]) <
              distance_to_circle(nodes[i], voids[best]))
          {
            best = c;
          }
        }
        const auto &c = voids[best];
        const double dx = nodes[i].x - c.center.x;
        const double dy = nodes[i].y - c.center.y;
        const double r = std::hypot(dx, dy);
        nodes[i] = {c.center.x + c.radius * dx / r, c.center.y + c.radius * dy / r};
        snapped[i] = static_cast<int>(best);
      }
    }
    // A triangle with all vertices on one circle lies inside that disk.
    std::vector<std::int32_t> kept;
    kept.reserve(conn.size());
    for (std::size_t e = 0; e < conn.size(); e += 3)
    {
      const int s = snapped[conn[e]];
      if (s >= 0 && snapped[conn[e + 1]] == s && snapped[conn[e + 2]] == s)
      {
        continue;
      }
      kept.insert(kept.end(), conn.begin() + e, conn.begin() + e + 3);
    }
    if (kept.size() == conn.size())
    {
      break;
    }
    conn = std::move(kept);
  }

  // Compact away unused nodes.
  std::vector<std::int32_t> remap(nodes.size(), -1);
  std::vector<Vec2> used;
  std::vector<char> is_used(nodes.size(), 0);
  for (auto i : conn)
  {
    is_used[i] = 1;
  }
  for (std::size_t k = 0; k < nodes.size(); ++k)
  {
    if (is_used[k])
    {
      remap[k] = static_cast<std::int32_t>(used.size());
      used.push_back(nodes[k]);
    }
  }
  for (auto &i : conn)
  {
    i = remap[i];
  }

  for (std::size_t e = 0; e < conn.size(); e += 3)
  {
    if (signed_area(used[conn[e]], used[conn[e + 1]], used[conn[e + 2]]) <= 0.0)
    {
      throw NumericalError("void snapping inverted an element; try a different edge length");
    }
  }

  Mesh raw(std::move(used), ElementKind::Tri3, std::move(conn), {});
  Mesh mesh = classify_boundary(raw.with_facets(extract_boundary_facets(raw)),
                                ProblemId::Flux, 0.25 * h, voids);
  for (const auto &c : voids)
  {
    std::size_t count = 0;
    for (const auto &f : mesh.facets())
    {
      const auto &a = mesh.nodes()[f.nodes[0]];
      const auto &b = mesh.nodes()[f.nodes[1]];
      if (f.tag == BoundaryTag::GammaIn && distance_to_circle(a, c) < 1e-9 &&
          distance_to_circle(b, c) < 1e-9)
      {
        ++count;
      }
    }
    if (count < 8)
    {
      throw std::invalid_argument("build_voided_square_tri: edge length too coarse to resolve a void");
    }
  }
  validate(mesh);
  return mesh;
}

Mesh classify_boundary(const Mesh &mesh, ProblemId problem, double tol)
{
  const auto voids = default_voids();
  return classify_boundary(mesh, problem, tol, voids);
}

Mesh classify_boundary(const Mesh &mesh, ProblemId problem, double tol,
                       std::span<const Circle> voids)
{
  NOPC_REQUIRE(tol > 0.0, "tolerance must be positive");
  std::vector<Facet> facets(mesh.facets().begin(), mesh.facets().end());
  for (auto &f : facets)
  {
    const auto &a = mesh.nodes()[f.nodes[0]];
    const auto &b = mesh.nodes()[f.nodes[1]];
    const Vec2 mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    if (problem == ProblemId::Source)
    {
      f.tag = std::abs(mid.y) <= tol ? BoundaryTag::GammaBottom : BoundaryTag::GammaOther;
      continue;
    }
    const bool on_void = std::any_of(voids.begin(), voids.end(), [&](const Circle &c) {
      return distance_to_circle(mid, c) <= tol;
    });
    const double to_square =
        std::min({std::abs(mid.x), std::abs(1.0 - mid.x), std::abs(mid.y), std::abs(1.0 - mid.y)});
    if (on_void)
    {
      f.tag = BoundaryTag::GammaIn;
    }
    else if (to_square <= tol)
    {
      f.tag = BoundaryTag::GammaOut;
    }
    else
    {
      throw std::runtime_error("classify_boundary: facet (" + std::to_string(f.nodes[0]) + ", " +
                               std::to_string(f.nodes[1]) + ") lies on no known boundary");
    }
  }
  return mesh.with_facets(std::move(facets));
}

double min_jacobian(const Mesh &mesh)
{
  double m = std::numeric_limits<double>::infinity();
  std::array<Vec2, max_nodes_per_element> verts{};
  const auto quad = volume_quadrature(mesh.kind());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto el = mesh.element(e);
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      verts[a] = mesh.nodes()[el[a]];
    }
    for (const auto &q : quad)
    {
      const auto p = evaluate_element(mesh.kind(), std::span(verts.data(), el.size()), q.xi, q.eta);
      m = std::min(m, p.det_j);
    }
  }
  return m;
}

void validate(const Mesh &mesh)
{
  if (mesh.num_elements() == 0)
  {
    throw std::runtime_error("mesh has no elements");
  }
  if (!(min_jacobian(mesh) > 0.0))
  {
    throw std::runtime_error("mesh has an element with non-positive Jacobian");
  }
  const auto owned = extract_boundary_facets(mesh);
  std::map<std::uint64_t, int> owned_keys;
  for (const auto &f : owned)
  {
    owned_keys[edge_key(f.nodes[0], f.nodes[1])] = 0;
  }
  for (const auto &f : mesh.facets())
  {
    auto it = owned_keys.find(edge_key(f.nodes[0], f.nodes[1]));
    if (it == owned_keys.end())
    {
      throw std::runtime_error("facet is not owned by exactly one element");
    }
    if (++it->second > 1)
    {
      throw std::runtime_error("facet listed twice");
    }
  }
  if (mesh.facets().size() != owned.size())
  {
    throw std::runtime_error("boundary edges missing from the facet list");
  }
  std::vector<int> degree(mesh.num_nodes(), 0);
  for (const auto &f : mesh.facets())
  {
    ++degree[f.nodes[0]];
    ++degree[f.nodes[1]];
  }
  for (int d : degree)
  {
    if (d != 0 && d != 2)
    {
      throw std::runtime_error("boundary is not a set of closed loops");
    }
  }
}

std::string write_mesh_text(const Mesh &mesh)
{
  std::string out;
  out += "nodes " + std::to_string(mesh.num_nodes()) + "\n";
  for (const auto &p : mesh.nodes())
  {
    append_double(out, p.x);
    out += ' ';
    append_double(out, p.y);
    out += '\n';
  }
  out += "elements " + std::to_string(mesh.num_elements()) + " " +
         std::string(to_string(mesh.kind())) + "\n";
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto el = mesh.element(e);
    for (std::size_t a = 0; a < el.size(); ++a)
    {
      out += std::to_string(el[a]);
      out += (a + 1 == el.size()) ? '\n' : ' ';
    }
  }
  out += "facets " + std::to_string(mesh.facets().size()) + "\n";
  for (const auto &f : mesh.facets())
  {
    out += std::to_string(f.nodes[0]) + " " + std::to_string(f.nodes[1]) + " " +
           std::string(to_string(f.tag)) + "\n";
  }
  return out;
}

Mesh read_mesh_text(std::string_view text)
{
  TokenReader in(text);
  in.expect("nodes");
  const auto nn = in.next_int();
  if (nn < 0)
  {
    throw FormatError("negative node count");
  }
  std::vector<Vec2> nodes(static_cast<std::size_t>(nn));
  for (auto &p : nodes)
  {
    p.x = in.next_double();
    p.y = in.next_double();
  }
  in.expect("elements");
  const auto ne = in.next_int();
  const auto kind_tok = in.next();
  ElementKind kind;
  if (kind_tok == "tri3")
  {
    kind = ElementKind::Tri3;
  }
  else if (kind_tok == "quad4")
  {
    kind = ElementKind::Quad4;
  }
  else
  {
    throw FormatError("unknown element kind '" + std::string(kind_tok) + "'");
  }
  if (ne < 0)
  {
    throw FormatError("negative element count");
  }
  std::vector<std::int32_t> conn(static_cast<std::size_t>(ne) * nodes_per_element(kind));
  for (auto &i : conn)
  {
    i = static_cast<std::int32_t>(in.next_int());
  }
  in.expect("facets");
  const auto nf = in.next_int();
  if (nf < 0)
  {
    throw FormatError("negative facet count");
  }
  std::vector<Facet> facets(static_cast<std::size_t>(nf));
  for (auto &f : facets)
  {
    f.nodes[0] = static_cast<std::int32_t>(in.next_int());
    f.nodes[1] = static_cast<std::int32_t>(in.next_int());
    f.tag = parse_boundary_tag(in.next());
  }
  if (!in.at_end())
  {
    throw FormatError("trailing content after facets");
  }
  try
  {
    return Mesh(std::move(nodes), kind, std::move(conn), std::move(facets));
  }
  catch (const std::invalid_argument &e)
  {
    throw FormatError(e.what());
  }
}

namespace
{

// Nodes per element for the Gmsh 2.2 element types we may meet; 0 for unknown.
int gmsh_type_nodes(long long type)
{
  switch (type)
  {
    case 1:
      return 2;  // line
    case 2:
      return 3;  // triangle
    case 3:
      return 4;  // quadrangle
    case 4:
      return 4;  // tetrahedron
    case 5:
      return 8;  // hexahedron
    case 6:
      return 6;  // prism
    case 7:
      return 5;  // pyramid
    case 8:
      return 3;  // second-order line
    case 9:
      return 6;  // second-order triangle
    case 10:
      return 9;  // second-order quadrangle
    case 15:
      return 1;  // point
    case 16:
      return 8;  // serendipity quadrangle
    default:
      return 0;
  }
}

}  // namespace

Mesh import_gmsh_ascii(std::string_view text)
{
  TokenReader in(text);
  bool have_format = false;
  bool have_nodes = false;
  bool have_elements = false;
  std::unordered_map<long long, std::size_t> node_index;
  std::vector<Vec2> file_nodes;
  std::vector<long long> tri_nodes;

  while (!in.at_end())
  {
    const std::string section(in.next());
    if (section == "$MeshFormat")
    {
      const auto version = in.next();
      if (version != "2.2")
      {
        throw FormatError("unsupported MSH version '" + std::string(version) + "', need 2.2");
      }
      if (in.next_int() != 0)
      {
        throw FormatError("binary MSH files are not supported");
      }
      in.next_int();  // data size
      in.expect("$EndMeshFormat");
      have_format = true;
    }
    else if (section == "$Nodes")
    {
      const auto n = in.next_int();
      for (long long k = 0; k < n; ++k)
      {
        const auto id = in.next_int();
        const double x = in.next_double();
        const double y = in.next_double();
        in.next_double();  // z
        if (!node_index.emplace(id, file_nodes.size()).second)
        {
          throw FormatError("duplicate node id " + std::to_string(id));
        }
        file_nodes.push_back({x, y});
      }
      in.expect("$EndNodes");
      have_nodes = true;
    }
    else if (section == "$Elements")
    {
      const auto n = in.next_int();
      for (long long k = 0; k < n; ++k)
      {
        in.next_int();  // id
        const auto type = in.next_int();
        const auto ntags = in.next_int();
        for (long long t = 0; t < ntags; ++t)
        {
          in.next_int();
        }
        const int nn = gmsh_type_nodes(type);
        if (nn == 0)
        {
          throw FormatError("unknown MSH element type " + std::to_string(type));
        }
        if (type != 1 && type != 2 && type != 8 && type != 15)
        {
          throw FormatError("only 3-node triangles are supported as cells, found type " +
                            std::to_string(type));
        }
        for (int a = 0; a < nn; ++a)
        {
          const auto id = in.next_int();
          if (type == 2)
          {
            tri_nodes.push_back(id);
          }
        }
      }
      in.expect("$EndElements");
      have_elements = true;
    }
    else if (!section.empty() && section[0] == '$')
    {
      const std::string end = "$End" + section.substr(1);
      while (in.next() != end)
      {
      }
    }
    else
    {
      throw FormatError("unexpected token '" + section + "' outside a section");
    }
  }
  if (!have_format || !have_nodes || !have_elements)
  {
    throw FormatError("MSH document lacks $MeshFormat, $Nodes or $Elements");
  }
  if (tri_nodes.empty())
  {
    throw FormatError("MSH document has no triangles");
  }

  std::vector<std::int32_t> remap(file_nodes.size(), -1);
  std::vector<Vec2> nodes;
  std::vector<std::int32_t> conn;
  conn.reserve(tri_nodes.size());
  std::vector<std::size_t> file_idx;
  for (auto id : tri_nodes)
  {
    const auto it = node_index.find(id);
    if (it == node_index.end())
    {
      throw FormatError("triangle references missing node " + std::to_string(id));
    }
    file_idx.push_back(it->second);
  }
  // Renumber in file order of the nodes, not in first-use order.
  std::vector<char> used(file_nodes.size(), 0);
  for (auto k : file_idx)
  {
    used[k] = 1;
  }
  for (std::size_t k = 0; k < file_nodes.size(); ++k)
  {
    if (used[k])
    {
      remap[k] = static_cast<std::int32_t>(nodes.size());
      nodes.push_back(file_nodes[k]);
    }
  }
  for (auto k : file_idx)
  {
    conn.push_back(remap[k]);
  }
  for (std::size_t e = 0; e < conn.size(); e += 3)
  {
    if (signed_area(nodes[conn[e]], nodes[conn[e + 1]], nodes[conn[e + 2]]) < 0.0)
    {
      std::swap(conn[e + 1], conn[e + 2]);
    }
  }
  Mesh raw(std::move(nodes), ElementKind::Tri3, std::move(conn), {});
  return raw.with_facets(extract_boundary_facets(raw));
}

std::string export_gmsh_ascii(const Mesh &mesh)
{
  std::string out = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n";
  out += std::to_string(mesh.num_nodes()) + "\n";
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
  {
    out += std::to_string(i + 1) + " ";
    append_double(out, mesh.nodes()[i].x);
    out += ' ';
    append_double(out, mesh.nodes()[i].y);
    out += " 0\n";
  }
  out += "$EndNodes\n$Elements\n";
  out += std::to_string(mesh.facets().size() + mesh.num_elements()) + "\n";
  std::size_t id = 1;
  for (const auto &f : mesh.facets())
  {
    const int phys = static_cast<int>(f.tag) + 1;
    out += std::to_string(id++) + " 1 2 " + std::to_string(phys) + " " + std::to_string(phys) +
           " " + std::to_string(f.nodes[0] + 1) + " " + std::to_string(f.nodes[1] + 1) + "\n";
  }
  const int type = mesh.kind() == ElementKind::Tri3 ? 2 : 3;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    out += std::to_string(id++) + " " + std::to_string(type) + " 2 10 10";
    for (auto i : mesh.element(e))
    {
      out += " " + std::to_string(i + 1);
    }
    out += "\n";
  }
  out += "$EndElements\n";
  return out;
}

}  // namespace nopc
