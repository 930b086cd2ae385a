#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phfem
{

using Index = std::int32_t;
using Point = Eigen::Vector2d;

// Boundary labels of a rectangle: left, bottom, right, top.
enum class BoundaryTag : std::uint8_t
{
  G1 = 1,
  G2 = 2,
  G3 = 3,
  G4 = 4,
  Other = 0,
};

using TagSet = std::set<BoundaryTag>;

std::string_view to_string(BoundaryTag tag);
BoundaryTag tag_from_string(std::string_view name);
TagSet all_rectangle_tags();

struct BoundaryEdge
{
  std::array<Index, 2> vertices; // ordered along the CCW traversal of the owning cell
  Index cell;
  int local_edge; // local edge index in the owning cell (edge k is opposite vertex k)
  Index edge;     // global edge index
  BoundaryTag tag;
};

struct CellGeometry
{
  double area;
  Eigen::Matrix2d jacobian; // columns p1 - p0, p2 - p0
  Point offset;             // p0
  std::array<double, 3> edge_lengths;
  std::array<Point, 3> outward_normals;

  Point map(const Point & ref) const { return offset + jacobian * ref; }
};

/// Conforming triangulation of a planar domain.
///
/// Cells are stored counter-clockwise. Edges are numbered globally with the
/// vertex pair sorted by index; local edge k of a cell joins the two vertices
/// other than vertex k. Boundary edges carry a tag. Immutable after
/// construction.
class Mesh
{
public:
  using Triangle = std::array<Index, 3>;
  using EdgeKey = std::pair<Index, Index>;

  /// Builds the topology and validates the invariants. Cells listed
  /// clockwise are reoriented. `edge_tags` maps (lower, higher) vertex pairs
  /// to a boundary tag; untagged boundary edges get BoundaryTag::Other.
  Mesh(std::vector<Point> vertices,
       std::vector<Triangle> cells,
       const std::map<EdgeKey, BoundaryTag> & edge_tags = {});

  Index n_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index n_cells() const { return static_cast<Index>(cells_.size()); }
  Index n_edges() const { return static_cast<Index>(edges_.size()); }

  const std::vector<Point> & vertices() const { return vertices_; }
  const Point & vertex(Index v) const { return vertices_[v]; }
  const std::vector<Triangle> & cells() const { return cells_; }
  const Triangle & cell(Index c) const { return cells_[c]; }

  /// Global edges as (lower, higher) vertex index pairs.
  const std::vector<EdgeKey> & edges() const { return edges_; }
  const std::array<Index, 3> & cell_edges(Index c) const { return cell_edges_[c]; }
  /// One or two cells sharing the edge; second entry is -1 on the boundary.
  const std::array<Index, 2> & edge_cells(Index e) const { return edge_cells_[e]; }

  const std::vector<BoundaryEdge> & boundary_edges() const { return boundary_edges_; }

  /// Unit normal of global edge e: the edge tangent from its lower to its
  /// higher vertex, rotated clockwise.
  Point edge_normal(Index e) const;

  CellGeometry cell_geometry(Index c) const;

  double total_area() const;

private:
  void build_topology(const std::map<EdgeKey, BoundaryTag> & edge_tags);
  void validate() const;

  std::vector<Point> vertices_;
  std::vector<Triangle> cells_;
  std::vector<EdgeKey> edges_;
  std::vector<std::array<Index, 3>> cell_edges_;
  std::vector<std::array<Index, 2>> edge_cells_;
  std::vector<BoundaryEdge> boundary_edges_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Structured triangulation of [x0,xL]x[y0,yL]; each grid quad is split along
/// its bottom-left to top-right diagonal.
Mesh generate_rectangle(int nx, int ny, double x0, double xL, double y0, double yL);

/// Red refinement: each level splits every cell into four through the edge
/// midpoints. Boundary tags are inherited.
Mesh refine_uniform(const Mesh & mesh, int levels);

/// Gmsh MSH 2.2 ASCII reader. Triangles (type 2) become cells; lines
/// (type 1) with physical tag 1..4 tag boundary edges G1..G4.
Mesh read_msh(std::istream & in);
Mesh read_msh_file(const std::string & path);

} // namespace phfem
