#pragma once

#include "phfem/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace phfem
{

enum class Family
{
  CG1Scalar,
  CG1Vector2,
  RT0,
  DG0Scalar,
  DG0Vector2,
  DG0SymTensor2, // components (11, 12, 22)
  BoundaryCG1Scalar,
  BoundaryCG1Vector2,
};

std::string_view to_string(Family family);

bool is_boundary_family(Family family);

/// Number of value components: 1 (scalar), 2 (vector) or 3 (symmetric tensor).
int value_size(Family family);

inline constexpr int max_local_dofs = 6;

// Small matrices with a compile-time bound, so basis evaluation never allocates.
using LocalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                  max_local_dofs, 3>;
using LocalVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, max_local_dofs, 1>;

/// Basis functions of one cell (or boundary edge) evaluated at one point.
/// Row i of every table belongs to global dof `dofs[i]`.
struct BasisValues
{
  std::array<Index, max_local_dofs> dofs{};
  int size = 0;
  LocalMatrix values;        // value components; symmetric tensors as (11, 12, 22)
  LocalMatrix gradients;     // CG1Scalar only: (d/dx, d/dy)
  LocalVector divergence;    // RT0 only
  LocalMatrix sym_gradients; // CG1Vector2 only: (11, 12, 22) of the symmetric gradient
};

/// Lowest-order finite element space on a mesh.
///
/// Dof numbering: CG1Scalar by vertex; CG1Vector2 interleaved (2v + c);
/// RT0 by global edge; DG0 families cell-major (k*c + component); boundary
/// families by the ascending list of boundary vertices touched by the tag
/// set (interleaved for vectors).
///
/// RT0 basis: psi_e = s (l_e / 2A) (x - p_e) on each cell, with p_e the
/// vertex opposite e and s = +1 when the local outward normal agrees with the
/// global edge normal (lower -> higher vertex, rotated clockwise). Its normal
/// component is 1 on e, 0 on the other edges; its divergence is s l_e / A.
class FESpace
{
public:
  FESpace(MeshPtr mesh, Family family, std::optional<TagSet> boundary_tags = std::nullopt);

  const Mesh & mesh() const { return *mesh_; }
  const MeshPtr & mesh_ptr() const { return mesh_; }
  Family family() const { return family_; }
  Index n_dofs() const { return n_dofs_; }
  int value_size() const { return phfem::value_size(family_); }
  bool is_boundary() const { return is_boundary_family(family_); }

  /// Volume families: global dofs of cell c in local order.
  std::span<const Index> cell_dofs(Index c) const;
  int dofs_per_cell() const { return dofs_per_cell_; }

  /// RT0: sign relating local edge k of cell c to the global orientation.
  double rt0_sign(Index c, int k) const { return rt0_signs_[3 * c + k]; }

  /// Boundary families.
  const TagSet & boundary_tags() const { return boundary_tags_; }
  const std::vector<Index> & boundary_vertices() const { return boundary_vertices_; }
  /// Dof of (vertex, component) or -1 if the vertex is not in the space.
  Index boundary_dof(Index vertex, int component = 0) const;
  /// Indices into mesh().boundary_edges() whose tag is in the tag set.
  const std::vector<Index> & boundary_edge_ids() const { return boundary_edge_ids_; }

private:
  MeshPtr mesh_;
  Family family_;
  Index n_dofs_ = 0;
  int dofs_per_cell_ = 0;
  std::vector<Index> dof_map_;
  std::vector<double> rt0_signs_;
  TagSet boundary_tags_;
  std::vector<Index> boundary_vertices_;
  std::vector<Index> vertex_to_boundary_;
  std::vector<Index> boundary_edge_ids_;
};

FESpace build_space(MeshPtr mesh, Family family, std::optional<TagSet> boundary_tags = std::nullopt);

/// Evaluates the basis of a volume space on cell `cell` at a point of the
/// reference triangle. Throws InvalidArgument if the point lies outside.
BasisValues eval_basis(const FESpace & space, Index cell, const Eigen::Vector2d & ref_point);

/// Evaluates the basis of a boundary space on boundary edge `boundary_edge`
/// (index into mesh().boundary_edges()) at parameter s in [0, 1] measured
/// from the edge's first vertex.
BasisValues eval_boundary_basis(const FESpace & space, Index boundary_edge, double s);

/// Reference coordinates of the point at parameter s on local edge k.
Eigen::Vector2d reference_edge_point(int local_edge, double s);

} // namespace phfem
