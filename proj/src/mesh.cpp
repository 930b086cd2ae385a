#include "phfem/mesh.hpp"

#include "phfem/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace phfem
{

namespace
{

Mesh::EdgeKey make_key(Index a, Index b)
{
  return a < b ? Mesh::EdgeKey{a, b} : Mesh::EdgeKey{b, a};
}

double signed_area(const Point & a, const Point & b, const Point & c)
{
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

// Local edge k joins the vertices following k in CCW order.
constexpr std::array<std::array<int, 2>, 3> local_edge_vertices{{{1, 2}, {2, 0}, {0, 1}}};

} // namespace

std::string_view to_string(BoundaryTag tag)
{
  switch (tag)
  {
  case BoundaryTag::G1:
    return "G1";
  case BoundaryTag::G2:
    return "G2";
  case BoundaryTag::G3:
    return "G3";
  case BoundaryTag::G4:
    return "G4";
  case BoundaryTag::Other:
    return "Other";
  }
  return "Other";
}

BoundaryTag tag_from_string(std::string_view name)
{
  if (name == "G1")
    return BoundaryTag::G1;
  if (name == "G2")
    return BoundaryTag::G2;
  if (name == "G3")
    return BoundaryTag::G3;
  if (name == "G4")
    return BoundaryTag::G4;
  if (name == "Other")
    return BoundaryTag::Other;
  throw InvalidArgument("unknown boundary tag '" + std::string(name) + "'");
}

TagSet all_rectangle_tags()
{
  return {BoundaryTag::G1, BoundaryTag::G2, BoundaryTag::G3, BoundaryTag::G4};
}

Mesh::Mesh(std::vector<Point> vertices,
           std::vector<Triangle> cells,
           const std::map<EdgeKey, BoundaryTag> & edge_tags)
    : vertices_(std::move(vertices)), cells_(std::move(cells))
{
  if (cells_.empty())
    throw MeshError("mesh has no cells");
  const auto nv = static_cast<Index>(vertices_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c)
  {
    auto & tri = cells_[c];
    for (Index v : tri)
      if (v < 0 || v >= nv)
        throw MeshError("cell " + std::to_string(c) + " references missing vertex " +
                        std::to_string(v));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw MeshError("cell " + std::to_string(c) + " repeats a vertex");
    const double a = signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    const Point ext = (vertices_[tri[1]] - vertices_[tri[0]]).cwiseAbs() +
                      (vertices_[tri[2]] - vertices_[tri[0]]).cwiseAbs();
    const double scale = ext.squaredNorm();
    if (std::abs(a) <= 1e-14 * scale)
      throw MeshError("cell " + std::to_string(c) + " is degenerate (collinear vertices)");
    if (a < 0)
      std::swap(tri[1], tri[2]);
  }
  build_topology(edge_tags);
  validate();
}

void Mesh::build_topology(const std::map<EdgeKey, BoundaryTag> & edge_tags)
{
  std::map<EdgeKey, Index> edge_index;
  cell_edges_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c)
  {
    const auto & tri = cells_[c];
    for (int k = 0; k < 3; ++k)
    {
      const auto key =
          make_key(tri[local_edge_vertices[k][0]], tri[local_edge_vertices[k][1]]);
      auto [it, inserted] = edge_index.try_emplace(key, static_cast<Index>(edges_.size()));
      if (inserted)
      {
        edges_.push_back(key);
        edge_cells_.push_back({static_cast<Index>(c), -1});
      }
      else
      {
        auto & owners = edge_cells_[it->second];
        if (owners[1] != -1)
          throw MeshError("edge (" + std::to_string(key.first) + "," +
                          std::to_string(key.second) + ") shared by more than two cells");
        owners[1] = static_cast<Index>(c);
      }
      cell_edges_[c][k] = it->second;
    }
  }

  for (const auto & [key, tag] : edge_tags)
  {
    auto it = edge_index.find(make_key(key.first, key.second));
    if (it == edge_index.end() || edge_cells_[it->second][1] != -1)
      throw MeshError("tagged edge (" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + ") is not a boundary edge");
  }

  // Boundary edges enumerated in cell order, then local edge order.
  for (std::size_t c = 0; c < cells_.size(); ++c)
  {
    for (int k = 0; k < 3; ++k)
    {
      const Index e = cell_edges_[c][k];
      if (edge_cells_[e][1] != -1)
        continue;
      BoundaryEdge be;
      be.vertices = {cells_[c][local_edge_vertices[k][0]], cells_[c][local_edge_vertices[k][1]]};
      be.cell = static_cast<Index>(c);
      be.local_edge = k;
      be.edge = e;
      auto it = edge_tags.find(edges_[e]);
      be.tag = it == edge_tags.end() ? BoundaryTag::Other : it->second;
      boundary_edges_.push_back(be);
    }
  }
}

void Mesh::validate() const
{
  // Interior edges must be traversed in opposite directions by their two cells.
  for (std::size_t e = 0; e < edges_.size(); ++e)
  {
    const auto & owners = edge_cells_[e];
    if (owners[1] == -1)
      continue;
    int dir[2];
    for (int s = 0; s < 2; ++s)
    {
      const auto & tri = cells_[owners[s]];
      const auto & ce = cell_edges_[owners[s]];
      const int k = static_cast<int>(std::find(ce.begin(), ce.end(), static_cast<Index>(e)) - ce.begin());
      dir[s] = tri[local_edge_vertices[k][0]] < tri[local_edge_vertices[k][1]] ? 1 : -1;
    }
    if (dir[0] == dir[1])
      throw MeshError("edge " + std::to_string(e) + " has inconsistent orientation");
  }

  // Closed boundary loops: every boundary vertex has even boundary degree.
  std::map<Index, int> degree;
  for (const auto & be : boundary_edges_)
  {
    ++degree[be.vertices[0]];
    ++degree[be.vertices[1]];
  }
  for (const auto & [v, d] : degree)
    if (d % 2 != 0)
      throw MeshError("boundary is not closed at vertex " + std::to_string(v));
}

Point Mesh::edge_normal(Index e) const
{
  const auto & [a, b] = edges_[e];
  const Point t = (vertices_[b] - vertices_[a]).normalized();
  return {t.y(), -t.x()};
}

CellGeometry Mesh::cell_geometry(Index c) const
{
  if (c < 0 || c >= n_cells())
    throw InvalidArgument("cell index " + std::to_string(c) + " out of range");
  const auto & tri = cells_[c];
  const Point & p0 = vertices_[tri[0]];
  const Point & p1 = vertices_[tri[1]];
  const Point & p2 = vertices_[tri[2]];

  CellGeometry g;
  g.offset = p0;
  g.jacobian.col(0) = p1 - p0;
  g.jacobian.col(1) = p2 - p0;
  g.area = 0.5 * std::abs(g.jacobian.determinant());
  for (int k = 0; k < 3; ++k)
  {
    const Point & a = vertices_[tri[local_edge_vertices[k][0]]];
    const Point & b = vertices_[tri[local_edge_vertices[k][1]]];
    const Point t = b - a;
    g.edge_lengths[k] = t.norm();
    // CCW cell: the outward normal is the tangent rotated clockwise.
    g.outward_normals[k] = Point(t.y(), -t.x()) / g.edge_lengths[k];
  }
  return g;
}

double Mesh::total_area() const
{
  double sum = 0.0;
  for (Index c = 0; c < n_cells(); ++c)
    sum += cell_geometry(c).area;
  return sum;
}

Mesh generate_rectangle(int nx, int ny, double x0, double xL, double y0, double yL)
{
  if (nx <= 0 || ny <= 0)
    throw InvalidArgument("rectangle mesh needs nx, ny >= 1");
  if (!(xL > x0) || !(yL > y0))
    throw InvalidArgument("rectangle mesh needs xL > x0 and yL > y0");

  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
  {
    const double y = j == ny ? yL : y0 + (yL - y0) * j / ny;
    for (int i = 0; i <= nx; ++i)
    {
      const double x = i == nx ? xL : x0 + (xL - x0) * i / nx;
      vertices.emplace_back(x, y);
    }
  }
  auto id = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };

  std::vector<Mesh::Triangle> cells;
  cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }

  std::map<Mesh::EdgeKey, BoundaryTag> tags;
  for (int j = 0; j < ny; ++j)
  {
    tags[make_key(id(0, j), id(0, j + 1))] = BoundaryTag::G1;
    tags[make_key(id(nx, j), id(nx, j + 1))] = BoundaryTag::G3;
  }
  for (int i = 0; i < nx; ++i)
  {
    tags[make_key(id(i, 0), id(i + 1, 0))] = BoundaryTag::G2;
    tags[make_key(id(i, ny), id(i + 1, ny))] = BoundaryTag::G4;
  }
  return Mesh(std::move(vertices), std::move(cells), tags);
}

Mesh refine_uniform(const Mesh & mesh, int levels)
{
  if (levels < 0)
    throw InvalidArgument("refinement levels must be non-negative");
  if (levels == 0)
    return mesh;

  std::vector<Point> vertices = mesh.vertices();
  const Index nv = mesh.n_vertices();
  for (const auto & [a, b] : mesh.edges())
    vertices.push_back(0.5 * (mesh.vertex(a) + mesh.vertex(b)));
  auto mid = [&](Index e) { return nv + e; };

  std::vector<Mesh::Triangle> cells;
  cells.reserve(4 * mesh.cells().size());
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const auto & t = mesh.cell(c);
    const auto & ce = mesh.cell_edges(c);
    const Index m0 = mid(ce[0]); // opposite vertex 0, i.e. between v1 and v2
    const Index m1 = mid(ce[1]);
    const Index m2 = mid(ce[2]);
    cells.push_back({t[0], m2, m1});
    cells.push_back({m2, t[1], m0});
    cells.push_back({m1, m0, t[2]});
    cells.push_back({m0, m1, m2});
  }

  std::map<Mesh::EdgeKey, BoundaryTag> tags;
  for (const auto & be : mesh.boundary_edges())
  {
    if (be.tag == BoundaryTag::Other)
      continue;
    const Index m = mid(be.edge);
    tags[make_key(be.vertices[0], m)] = be.tag;
    tags[make_key(m, be.vertices[1])] = be.tag;
  }
  return refine_uniform(Mesh(std::move(vertices), std::move(cells), tags), levels - 1);
}

} // namespace phfem
