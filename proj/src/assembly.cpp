#include "phfem/assembly.hpp"

#include "phfem/error.hpp"
#include "phfem/quadrature.hpp"

#include <sstream>

namespace phfem
{

namespace
{

using Triplets = std::vector<Eigen::Triplet<double>>;
using LocalBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                                 max_local_dofs, max_local_dofs>;

void require_same_mesh(const FESpace & a, const FESpace & b)
{
  if (a.mesh_ptr().get() != b.mesh_ptr().get())
    throw InvalidArgument(std::string("spaces ") + std::string(to_string(a.family())) + " and " +
                          std::string(to_string(b.family())) + " live on different meshes");
}

void require_family(const FESpace & s, std::initializer_list<Family> allowed, const char * op)
{
  for (Family f : allowed)
    if (s.family() == f)
      return;
  throw InvalidArgument(std::string(op) + ": unsupported family " +
                        std::string(to_string(s.family())));
}

std::string point_string(const Point & x)
{
  std::ostringstream ss;
  ss.precision(17);
  ss << "(" << x.x() << ", " << x.y() << ")";
  return ss.str();
}

void scatter(Triplets & out, const BasisValues & rows, const BasisValues & cols,
             const LocalBlock & local)
{
  for (int i = 0; i < rows.size; ++i)
    for (int j = 0; j < cols.size; ++j)
      if (local(i, j) != 0.0)
        out.emplace_back(rows.dofs[i], cols.dofs[j], local(i, j));
}

SparseMatrix build(Index rows, Index cols, const Triplets & t)
{
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Visits every triangle quadrature point: f(cell, x, weight).
template <class F>
void for_each_cell_point(const Mesh & mesh, F && f)
{
  static const QuadratureRule rule = quadrature(QuadratureKind::Triangle, triangle_quadrature_degree);
  for (Index c = 0; c < mesh.n_cells(); ++c)
  {
    const CellGeometry g = mesh.cell_geometry(c);
    const double det = 2.0 * g.area;
    for (std::size_t q = 0; q < rule.size(); ++q)
      f(c, rule.points[q], g.map(rule.points[q]), rule.weights[q] * det);
  }
}

// Visits every edge quadrature point of the selected boundary edges:
// f(boundary edge index, edge, s, x, weight, outward normal).
template <class F>
void for_each_edge_point(const Mesh & mesh, const std::vector<Index> & edge_ids, F && f)
{
  static const QuadratureRule rule = quadrature(QuadratureKind::Edge, edge_quadrature_degree);
  const auto & bes = mesh.boundary_edges();
  for (Index id : edge_ids)
  {
    const BoundaryEdge & be = bes[id];
    const CellGeometry g = mesh.cell_geometry(be.cell);
    const Point & a = mesh.vertex(be.vertices[0]);
    const Point & b = mesh.vertex(be.vertices[1]);
    const double len = g.edge_lengths[be.local_edge];
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double s = rule.points[q].x();
      f(id, be, s, Point((1.0 - s) * a + s * b), rule.weights[q] * len,
        g.outward_normals[be.local_edge]);
    }
  }
}

std::vector<Index> selected_edges(const FESpace & bnd_space, const std::optional<TagSet> & tags)
{
  std::vector<Index> ids;
  const auto & bes = bnd_space.mesh().boundary_edges();
  for (Index id : bnd_space.boundary_edge_ids())
    if (!tags || tags->count(bes[id].tag))
      ids.push_back(id);
  return ids;
}

std::vector<Index> edges_with_tags(const Mesh & mesh, const TagSet & tags)
{
  std::vector<Index> ids;
  const auto & bes = mesh.boundary_edges();
  for (std::size_t i = 0; i < bes.size(); ++i)
    if (tags.count(bes[i].tag))
      ids.push_back(static_cast<Index>(i));
  return ids;
}

// Trace of the volume basis on a boundary edge, as a value table with the
// columns the coupling pairs against the boundary basis.
LocalMatrix trace_values(const FESpace & vol, const BasisValues & b, CouplingKind kind,
                         const Point & n)
{
  if (kind == CouplingKind::DirichletTrace)
    return b.values;
  LocalMatrix t;
  if (vol.family() == Family::RT0)
  {
    t.resize(b.size, 1);
    for (int i = 0; i < b.size; ++i)
      t(i, 0) = b.values.row(i).dot(n.transpose());
    return t;
  }
  // DG0-symtensor2: Phi n for Phi in (11, 12, 22).
  t.resize(b.size, 2);
  for (int i = 0; i < b.size; ++i)
  {
    const double s11 = b.values(i, 0), s12 = b.values(i, 1), s22 = b.values(i, 2);
    t(i, 0) = s11 * n.x() + s12 * n.y();
    t(i, 1) = s12 * n.x() + s22 * n.y();
  }
  return t;
}

} // namespace

SparseMatrix assemble_mass(const FESpace & space, const CoefficientField & coeff)
{
  if (space.is_boundary())
    return assemble_boundary_mass(space, coeff);
  const int vs = space.value_size();
  if (vs == 1 && coeff.kind() != CoefficientField::Kind::Scalar)
    throw InvalidArgument("scalar space needs a scalar coefficient");

  Triplets t;
  t.reserve(static_cast<std::size_t>(space.mesh().n_cells()) * space.dofs_per_cell() *
            space.dofs_per_cell());
  LocalBlock local;
  const int n = space.dofs_per_cell();
  Index current = -1;
  BasisValues rows;
  for_each_cell_point(space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point & x,
                                        double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, rows, rows, local);
      current = c;
      local.setZero(n, n);
    }
    rows = eval_basis(space, c, ref);
    const auto & v = rows.values;
    if (vs == 1)
      local.noalias() += (w * coeff.scalar_at(x)) * (v * v.transpose());
    else if (vs == 2)
      local.noalias() += w * (v * coeff.tensor_at(x) * v.transpose());
    else
      local.noalias() += w * (v * coeff.operator_at(x) * v.transpose());
  });
  if (current >= 0)
    scatter(t, rows, rows, local);
  return build(space.n_dofs(), space.n_dofs(), t);
}

SparseMatrix assemble_d_grad(const FESpace & p_space, const FESpace & q_space)
{
  require_same_mesh(p_space, q_space);
  require_family(p_space, {Family::CG1Scalar}, "assemble_d_grad");
  require_family(q_space, {Family::RT0, Family::DG0Vector2}, "assemble_d_grad");
  Triplets t;
  LocalBlock local;
  Index current = -1;
  BasisValues qb, pb;
  for_each_cell_point(p_space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point &,
                                          double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, qb, pb, local);
      current = c;
      local.setZero(q_space.dofs_per_cell(), 3);
    }
    qb = eval_basis(q_space, c, ref);
    pb = eval_basis(p_space, c, ref);
    local.noalias() += w * (qb.values * pb.gradients.transpose());
  });
  if (current >= 0)
    scatter(t, qb, pb, local);
  return build(q_space.n_dofs(), p_space.n_dofs(), t);
}

SparseMatrix assemble_d_div(const FESpace & p_space, const FESpace & q_space)
{
  require_same_mesh(p_space, q_space);
  require_family(p_space, {Family::CG1Scalar}, "assemble_d_div");
  require_family(q_space, {Family::RT0}, "assemble_d_div");
  Triplets t;
  LocalBlock local;
  Index current = -1;
  BasisValues qb, pb;
  for_each_cell_point(p_space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point &,
                                          double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, pb, qb, local);
      current = c;
      local.setZero(3, 3);
    }
    qb = eval_basis(q_space, c, ref);
    pb = eval_basis(p_space, c, ref);
    local.noalias() += w * (pb.values.col(0) * qb.divergence.transpose());
  });
  if (current >= 0)
    scatter(t, pb, qb, local);
  return build(p_space.n_dofs(), q_space.n_dofs(), t);
}

SparseMatrix assemble_d_Grad(const FESpace & theta_space, const FESpace & kappa_space)
{
  require_same_mesh(theta_space, kappa_space);
  require_family(theta_space, {Family::CG1Vector2}, "assemble_d_Grad");
  require_family(kappa_space, {Family::DG0SymTensor2}, "assemble_d_Grad");
  const Eigen::Matrix3d weight = Eigen::Vector3d(1.0, 2.0, 1.0).asDiagonal();
  Triplets t;
  LocalBlock local;
  Index current = -1;
  BasisValues kb, tb;
  for_each_cell_point(theta_space.mesh(), [&](Index c, const Eigen::Vector2d & ref,
                                              const Point &, double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, kb, tb, local);
      current = c;
      local.setZero(3, 6);
    }
    kb = eval_basis(kappa_space, c, ref);
    tb = eval_basis(theta_space, c, ref);
    local.noalias() += w * (kb.values * weight * tb.sym_gradients.transpose());
  });
  if (current >= 0)
    scatter(t, kb, tb, local);
  return build(kappa_space.n_dofs(), theta_space.n_dofs(), t);
}

SparseMatrix assemble_d0(const FESpace & gamma_space, const FESpace & theta_space)
{
  require_same_mesh(gamma_space, theta_space);
  require_family(gamma_space, {Family::DG0Vector2}, "assemble_d0");
  require_family(theta_space, {Family::CG1Vector2}, "assemble_d0");
  Triplets t;
  LocalBlock local;
  Index current = -1;
  BasisValues gb, tb;
  for_each_cell_point(theta_space.mesh(), [&](Index c, const Eigen::Vector2d & ref,
                                              const Point &, double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, gb, tb, local);
      current = c;
      local.setZero(2, 6);
    }
    gb = eval_basis(gamma_space, c, ref);
    tb = eval_basis(theta_space, c, ref);
    local.noalias() -= w * (gb.values * tb.values.transpose());
  });
  if (current >= 0)
    scatter(t, gb, tb, local);
  return build(gamma_space.n_dofs(), theta_space.n_dofs(), t);
}

SparseMatrix assemble_boundary_coupling(const FESpace & vol_space, const FESpace & bnd_space,
                                        CouplingKind kind, const std::optional<TagSet> & tags)
{
  require_same_mesh(vol_space, bnd_space);
  if (!bnd_space.is_boundary())
    throw InvalidArgument("assemble_boundary_coupling: second space must be a boundary family");
  const bool scalar_bnd = bnd_space.family() == Family::BoundaryCG1Scalar;
  bool ok = false;
  if (kind == CouplingKind::DirichletTrace)
    ok = (vol_space.family() == Family::CG1Scalar && scalar_bnd) ||
         (vol_space.family() == Family::CG1Vector2 && !scalar_bnd);
  else
    ok = (vol_space.family() == Family::RT0 && scalar_bnd) ||
         (vol_space.family() == Family::DG0SymTensor2 && !scalar_bnd);
  if (!ok)
    throw InvalidArgument(std::string("boundary coupling kind does not match spaces ") +
                          std::string(to_string(vol_space.family())) + " / " +
                          std::string(to_string(bnd_space.family())));

  Triplets t;
  LocalBlock local;
  for_each_edge_point(bnd_space.mesh(), selected_edges(bnd_space, tags),
                      [&](Index id, const BoundaryEdge & be, double s, const Point &, double w,
                          const Point & n) {
                        const BasisValues vb =
                            eval_basis(vol_space, be.cell, reference_edge_point(be.local_edge, s));
                        const BasisValues bb = eval_boundary_basis(bnd_space, id, s);
                        local.noalias() =
                            w * (trace_values(vol_space, vb, kind, n) * bb.values.transpose());
                        scatter(t, vb, bb, local);
                      });
  return build(vol_space.n_dofs(), bnd_space.n_dofs(), t);
}

SparseMatrix assemble_boundary_mass(const FESpace & bnd_space, const CoefficientField & coeff,
                                    bool require_positive, const std::optional<TagSet> & tags)
{
  if (!bnd_space.is_boundary())
    throw InvalidArgument("assemble_boundary_mass needs a boundary family");
  Triplets t;
  LocalBlock local;
  for_each_edge_point(bnd_space.mesh(), selected_edges(bnd_space, tags),
                      [&](Index id, const BoundaryEdge &, double s, const Point & x, double w,
                          const Point &) {
                        const double c = coeff.scalar_at(x);
                        if (require_positive && !(c > 0.0))
                          throw AssemblyError("non-positive boundary coefficient '" +
                                              coeff.name() + "' at " + point_string(x));
                        const BasisValues bb = eval_boundary_basis(bnd_space, id, s);
                        local.noalias() = (w * c) * (bb.values * bb.values.transpose());
                        scatter(t, bb, bb, local);
                      });
  return build(bnd_space.n_dofs(), bnd_space.n_dofs(), t);
}

SparseMatrix assemble_trace_mass(const FESpace & vol_space, const TagSet & tags,
                                 const CoefficientField & coeff)
{
  require_family(vol_space, {Family::CG1Scalar, Family::RT0}, "assemble_trace_mass");
  const CouplingKind kind = vol_space.family() == Family::RT0 ? CouplingKind::NormalTrace
                                                              : CouplingKind::DirichletTrace;
  Triplets t;
  LocalBlock local;
  for_each_edge_point(vol_space.mesh(), edges_with_tags(vol_space.mesh(), tags),
                      [&](Index, const BoundaryEdge & be, double s, const Point & x, double w,
                          const Point & n) {
                        const double c = coeff.scalar_at(x);
                        if (!(c > 0.0))
                          throw AssemblyError("non-positive boundary coefficient '" +
                                              coeff.name() + "' at " + point_string(x));
                        const BasisValues vb =
                            eval_basis(vol_space, be.cell, reference_edge_point(be.local_edge, s));
                        const LocalMatrix tr = trace_values(vol_space, vb, kind, n);
                        local.noalias() = (w * c) * (tr * tr.transpose());
                        scatter(t, vb, vb, local);
                      });
  return build(vol_space.n_dofs(), vol_space.n_dofs(), t);
}

SparseMatrix assemble_state_mass(const FESpace & space, const FESpace & weight_space,
                                 const Vector & weight)
{
  require_same_mesh(space, weight_space);
  require_family(weight_space, {Family::CG1Scalar}, "assemble_state_mass");
  if (weight.size() != weight_space.n_dofs())
    throw InvalidArgument("assemble_state_mass: weight has wrong size");
  if (space.is_boundary() || space.value_size() == 3)
    throw InvalidArgument("assemble_state_mass: unsupported family");
  Triplets t;
  LocalBlock local;
  const int n = space.dofs_per_cell();
  Index current = -1;
  BasisValues rows;
  for_each_cell_point(space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point & x,
                                        double w) {
    if (c != current)
    {
      if (current >= 0)
        scatter(t, rows, rows, local);
      current = c;
      local.setZero(n, n);
    }
    const BasisValues wb = eval_basis(weight_space, c, ref);
    double value = 0.0;
    for (int i = 0; i < 3; ++i)
      value += weight(wb.dofs[i]) * wb.values(i, 0);
    if (!(value > 0.0))
      throw NumericalFailure("non-positive state weight " + std::to_string(value) + " at " +
                             point_string(x));
    rows = eval_basis(space, c, ref);
    local.noalias() += (w * value) * (rows.values * rows.values.transpose());
  });
  if (current >= 0)
    scatter(t, rows, rows, local);
  return build(space.n_dofs(), space.n_dofs(), t);
}

Vector assemble_product_vector(const FESpace & sigma_space, const FESpace & vec_space,
                               const Vector & f, const Vector & e)
{
  require_same_mesh(sigma_space, vec_space);
  require_family(sigma_space, {Family::CG1Scalar}, "assemble_product_vector");
  if (vec_space.is_boundary() || vec_space.value_size() != 2)
    throw InvalidArgument("assemble_product_vector needs a vector volume space");
  if (f.size() != vec_space.n_dofs() || e.size() != vec_space.n_dofs())
    throw InvalidArgument("assemble_product_vector: field sizes do not match the space");
  Vector n = Vector::Zero(sigma_space.n_dofs());
  for_each_cell_point(sigma_space.mesh(), [&](Index c, const Eigen::Vector2d & ref,
                                              const Point &, double w) {
    const BasisValues vb = eval_basis(vec_space, c, ref);
    Eigen::Vector2d fd = Eigen::Vector2d::Zero(), ed = Eigen::Vector2d::Zero();
    for (int i = 0; i < vb.size; ++i)
    {
      fd += f(vb.dofs[i]) * vb.values.row(i).transpose();
      ed += e(vb.dofs[i]) * vb.values.row(i).transpose();
    }
    const double prod = w * fd.dot(ed);
    const BasisValues sb = eval_basis(sigma_space, c, ref);
    for (int i = 0; i < 3; ++i)
      n(sb.dofs[i]) += prod * sb.values(i, 0);
  });
  return n;
}

Vector assemble_load(const FESpace & space, const ScalarFunction & f)
{
  if (space.is_boundary() || space.value_size() != 1)
    throw InvalidArgument("scalar load needs a scalar volume space");
  Vector b = Vector::Zero(space.n_dofs());
  for_each_cell_point(space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point & x,
                                        double w) {
    const BasisValues vb = eval_basis(space, c, ref);
    const double fx = w * f(x);
    for (int i = 0; i < vb.size; ++i)
      b(vb.dofs[i]) += fx * vb.values(i, 0);
  });
  return b;
}

Vector assemble_load(const FESpace & space, const VectorFunction & f)
{
  if (space.is_boundary() || space.value_size() != 2)
    throw InvalidArgument("vector load needs a vector volume space");
  Vector b = Vector::Zero(space.n_dofs());
  for_each_cell_point(space.mesh(), [&](Index c, const Eigen::Vector2d & ref, const Point & x,
                                        double w) {
    const BasisValues vb = eval_basis(space, c, ref);
    const Eigen::Vector2d fx = w * f(x);
    for (int i = 0; i < vb.size; ++i)
      b(vb.dofs[i]) += vb.values.row(i).dot(fx.transpose());
  });
  return b;
}

Vector interpolate(const FESpace & space, const std::vector<ScalarFunction> & components)
{
  const int vs = space.value_size();
  if (static_cast<int>(components.size()) != vs)
    throw InvalidArgument("interpolate: expected " + std::to_string(vs) + " component(s)");
  const Mesh & mesh = space.mesh();
  Vector v = Vector::Zero(space.n_dofs());
  switch (space.family())
  {
  case Family::CG1Scalar:
  case Family::CG1Vector2:
    for (Index i = 0; i < mesh.n_vertices(); ++i)
      for (int c = 0; c < vs; ++c)
        if (components[c])
          v(vs * i + c) = components[c](mesh.vertex(i));
    return v;
  case Family::DG0Scalar:
  case Family::DG0Vector2:
  case Family::DG0SymTensor2:
    for_each_cell_point(mesh, [&](Index c, const Eigen::Vector2d &, const Point & x, double w) {
      const double area = mesh.cell_geometry(c).area;
      for (int k = 0; k < vs; ++k)
        if (components[k])
          v(vs * c + k) += w / area * components[k](x);
    });
    return v;
  default:
    break;
  }
  throw InvalidArgument(std::string("interpolate: unsupported family ") +
                        std::string(to_string(space.family())));
}

Vector interpolate_boundary(const FESpace & bnd_space, const ScalarFunction & f)
{
  require_family(bnd_space, {Family::BoundaryCG1Scalar}, "interpolate_boundary");
  const auto & verts = bnd_space.boundary_vertices();
  Vector v(static_cast<Index>(verts.size()));
  for (std::size_t i = 0; i < verts.size(); ++i)
    v(static_cast<Index>(i)) = f(bnd_space.mesh().vertex(verts[i]));
  return v;
}

} // namespace phfem
