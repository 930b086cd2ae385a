#include "phfem/fe_space.hpp"

#include "phfem/error.hpp"

#include <Eigen/LU>

#include <algorithm>

namespace phfem
{

namespace
{

constexpr std::array<std::array<int, 2>, 3> local_edge_vertices{{{1, 2}, {2, 0}, {0, 1}}};

const std::array<Eigen::Vector2d, 3> & reference_vertices()
{
  static const std::array<Eigen::Vector2d, 3> v{
      Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
  return v;
}

void check_reference_point(const Eigen::Vector2d & p)
{
  constexpr double tol = 1e-12;
  if (p.x() < -tol || p.y() < -tol || p.x() + p.y() > 1.0 + tol)
    throw InvalidArgument("point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                          ") lies outside the reference triangle");
}

} // namespace

std::string_view to_string(Family family)
{
  switch (family)
  {
  case Family::CG1Scalar:
    return "CG1-scalar";
  case Family::CG1Vector2:
    return "CG1-vector2";
  case Family::RT0:
    return "RT0";
  case Family::DG0Scalar:
    return "DG0-scalar";
  case Family::DG0Vector2:
    return "DG0-vector2";
  case Family::DG0SymTensor2:
    return "DG0-symtensor2";
  case Family::BoundaryCG1Scalar:
    return "BoundaryCG1-scalar";
  case Family::BoundaryCG1Vector2:
    return "BoundaryCG1-vector2";
  }
  throw InvalidArgument("unknown element family");
}

bool is_boundary_family(Family family)
{
  return family == Family::BoundaryCG1Scalar || family == Family::BoundaryCG1Vector2;
}

int value_size(Family family)
{
  switch (family)
  {
  case Family::CG1Scalar:
  case Family::DG0Scalar:
  case Family::BoundaryCG1Scalar:
    return 1;
  case Family::CG1Vector2:
  case Family::RT0:
  case Family::DG0Vector2:
  case Family::BoundaryCG1Vector2:
    return 2;
  case Family::DG0SymTensor2:
    return 3;
  }
  throw InvalidArgument("unknown element family");
}

FESpace::FESpace(MeshPtr mesh, Family family, std::optional<TagSet> boundary_tags)
    : mesh_(std::move(mesh)), family_(family)
{
  if (!mesh_)
    throw InvalidArgument("finite element space needs a mesh");
  const Mesh & m = *mesh_;
  const Index nc = m.n_cells();

  if (is_boundary_family(family_))
  {
    if (!boundary_tags)
      throw InvalidArgument(std::string(to_string(family_)) + " requires a boundary tag set");
    boundary_tags_ = *boundary_tags;
    const auto & bes = m.boundary_edges();
    for (std::size_t i = 0; i < bes.size(); ++i)
    {
      if (!boundary_tags_.count(bes[i].tag))
        continue;
      boundary_edge_ids_.push_back(static_cast<Index>(i));
      boundary_vertices_.push_back(bes[i].vertices[0]);
      boundary_vertices_.push_back(bes[i].vertices[1]);
    }
    std::sort(boundary_vertices_.begin(), boundary_vertices_.end());
    boundary_vertices_.erase(std::unique(boundary_vertices_.begin(), boundary_vertices_.end()),
                             boundary_vertices_.end());
    vertex_to_boundary_.assign(static_cast<std::size_t>(m.n_vertices()), -1);
    for (std::size_t i = 0; i < boundary_vertices_.size(); ++i)
      vertex_to_boundary_[boundary_vertices_[i]] = static_cast<Index>(i);
    const int vs = family_ == Family::BoundaryCG1Vector2 ? 2 : 1;
    n_dofs_ = vs * static_cast<Index>(boundary_vertices_.size());
    return;
  }

  if (boundary_tags)
    throw InvalidArgument(std::string(to_string(family_)) + " does not take a boundary tag set");

  switch (family_)
  {
  case Family::CG1Scalar:
    dofs_per_cell_ = 3;
    n_dofs_ = m.n_vertices();
    for (Index c = 0; c < nc; ++c)
      for (Index v : m.cell(c))
        dof_map_.push_back(v);
    break;
  case Family::CG1Vector2:
    dofs_per_cell_ = 6;
    n_dofs_ = 2 * m.n_vertices();
    for (Index c = 0; c < nc; ++c)
      for (Index v : m.cell(c))
      {
        dof_map_.push_back(2 * v);
        dof_map_.push_back(2 * v + 1);
      }
    break;
  case Family::RT0:
    dofs_per_cell_ = 3;
    n_dofs_ = m.n_edges();
    rt0_signs_.resize(3 * static_cast<std::size_t>(nc));
    for (Index c = 0; c < nc; ++c)
    {
      const CellGeometry g = m.cell_geometry(c);
      for (int k = 0; k < 3; ++k)
      {
        const Index e = m.cell_edges(c)[k];
        dof_map_.push_back(e);
        rt0_signs_[3 * c + k] = g.outward_normals[k].dot(m.edge_normal(e)) > 0.0 ? 1.0 : -1.0;
      }
    }
    break;
  case Family::DG0Scalar:
  case Family::DG0Vector2:
  case Family::DG0SymTensor2:
  {
    const int k = phfem::value_size(family_);
    dofs_per_cell_ = k;
    n_dofs_ = k * nc;
    for (Index c = 0; c < nc; ++c)
      for (int i = 0; i < k; ++i)
        dof_map_.push_back(k * c + i);
    break;
  }
  default:
    throw InvalidArgument("unknown element family");
  }
}

std::span<const Index> FESpace::cell_dofs(Index c) const
{
  if (is_boundary())
    throw InvalidArgument("boundary spaces have no cell dofs");
  if (c < 0 || c >= mesh_->n_cells())
    throw InvalidArgument("cell index " + std::to_string(c) + " out of range");
  return {dof_map_.data() + static_cast<std::size_t>(dofs_per_cell_) * c,
          static_cast<std::size_t>(dofs_per_cell_)};
}

Index FESpace::boundary_dof(Index vertex, int component) const
{
  if (!is_boundary())
    throw InvalidArgument("boundary_dof on a volume space");
  if (vertex < 0 || vertex >= static_cast<Index>(vertex_to_boundary_.size()))
    return -1;
  const Index b = vertex_to_boundary_[vertex];
  if (b < 0)
    return -1;
  return family_ == Family::BoundaryCG1Vector2 ? 2 * b + component : b;
}

FESpace build_space(MeshPtr mesh, Family family, std::optional<TagSet> boundary_tags)
{
  return FESpace(std::move(mesh), family, std::move(boundary_tags));
}

Eigen::Vector2d reference_edge_point(int local_edge, double s)
{
  const auto & rv = reference_vertices();
  const auto & ev = local_edge_vertices[local_edge];
  return (1.0 - s) * rv[ev[0]] + s * rv[ev[1]];
}

BasisValues eval_basis(const FESpace & space, Index cell, const Eigen::Vector2d & ref_point)
{
  if (space.is_boundary())
    throw InvalidArgument("eval_basis needs a volume space; use eval_boundary_basis");
  check_reference_point(ref_point);
  const Mesh & mesh = space.mesh();
  const CellGeometry g = mesh.cell_geometry(cell);
  const auto dofs = space.cell_dofs(cell);

  BasisValues b;
  b.size = static_cast<int>(dofs.size());
  std::copy(dofs.begin(), dofs.end(), b.dofs.begin());

  const double xi = ref_point.x();
  const double eta = ref_point.y();
  const std::array<double, 3> lambda{1.0 - xi - eta, xi, eta};

  auto physical_gradients = [&g]() {
    // Rows: grad lambda_i = J^{-T} grad_ref lambda_i.
    Eigen::Matrix<double, 3, 2> ref;
    ref << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
    return Eigen::Matrix<double, 3, 2>(ref * g.jacobian.inverse());
  };

  switch (space.family())
  {
  case Family::CG1Scalar:
    b.values.resize(3, 1);
    for (int i = 0; i < 3; ++i)
      b.values(i, 0) = lambda[i];
    b.gradients = physical_gradients();
    break;
  case Family::CG1Vector2:
  {
    const auto grads = physical_gradients();
    b.values.setZero(6, 2);
    b.sym_gradients.setZero(6, 3);
    for (int i = 0; i < 3; ++i)
    {
      b.values(2 * i, 0) = lambda[i];
      b.values(2 * i + 1, 1) = lambda[i];
      b.sym_gradients.row(2 * i) << grads(i, 0), 0.5 * grads(i, 1), 0.0;
      b.sym_gradients.row(2 * i + 1) << 0.0, 0.5 * grads(i, 0), grads(i, 1);
    }
    break;
  }
  case Family::RT0:
  {
    const Point x = g.map(ref_point);
    const auto & tri = mesh.cell(cell);
    b.values.resize(3, 2);
    b.divergence.resize(3);
    for (int k = 0; k < 3; ++k)
    {
      const double s = space.rt0_sign(cell, k);
      const double scale = s * g.edge_lengths[k] / (2.0 * g.area);
      b.values.row(k) = scale * (x - mesh.vertex(tri[k])).transpose();
      b.divergence(k) = 2.0 * scale;
    }
    break;
  }
  case Family::DG0Scalar:
  case Family::DG0Vector2:
  case Family::DG0SymTensor2:
  {
    const int k = space.value_size();
    b.values.setIdentity(k, k);
    break;
  }
  default:
    throw InvalidArgument("eval_basis: unsupported family");
  }
  return b;
}

BasisValues eval_boundary_basis(const FESpace & space, Index boundary_edge, double s)
{
  if (!space.is_boundary())
    throw InvalidArgument("eval_boundary_basis needs a boundary space");
  const auto & bes = space.mesh().boundary_edges();
  if (boundary_edge < 0 || boundary_edge >= static_cast<Index>(bes.size()))
    throw InvalidArgument("boundary edge index out of range");
  if (s < -1e-12 || s > 1.0 + 1e-12)
    throw InvalidArgument("edge parameter outside [0, 1]");
  const BoundaryEdge & be = bes[boundary_edge];
  if (!space.boundary_tags().count(be.tag))
    throw InvalidArgument("boundary edge is not in the space's tag set");

  const std::array<double, 2> phi{1.0 - s, s};
  BasisValues b;
  if (space.family() == Family::BoundaryCG1Scalar)
  {
    b.size = 2;
    b.values.resize(2, 1);
    for (int i = 0; i < 2; ++i)
    {
      b.dofs[i] = space.boundary_dof(be.vertices[i]);
      b.values(i, 0) = phi[i];
    }
  }
  else
  {
    b.size = 4;
    b.values.setZero(4, 2);
    for (int i = 0; i < 2; ++i)
      for (int c = 0; c < 2; ++c)
      {
        b.dofs[2 * i + c] = space.boundary_dof(be.vertices[i], c);
        b.values(2 * i + c, c) = phi[i];
      }
  }
  return b;
}

} // namespace phfem
