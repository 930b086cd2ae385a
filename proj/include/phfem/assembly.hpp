#pragma once

#include "phfem/coefficient.hpp"
#include "phfem/fe_space.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <optional>

namespace phfem
{

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// (i, j) = int coeff phi_i . phi_j over the domain. Scalar spaces take a
/// scalar coefficient; vector spaces a scalar or 2x2 tensor (phi_i^T T phi_j);
/// DG0-symtensor2 a scalar (weighted by the contraction) or a symmetric-tensor
/// operator.
SparseMatrix assemble_mass(const FESpace & space, const CoefficientField & coeff = 1.0);

/// (m, i) = int phi_q^m . grad phi_p^i. Rows: q_space (RT0 or DG0-vector2),
/// columns: p_space (CG1-scalar).
SparseMatrix assemble_d_grad(const FESpace & p_space, const FESpace & q_space);

/// (i, m) = int phi_p^i div psi_q^m. Rows: p_space (CG1-scalar), columns: RT0.
SparseMatrix assemble_d_div(const FESpace & p_space, const FESpace & q_space);

/// (p, n) = int Phi_kappa^p : Grad phi_theta^n (symmetric gradient, tensor
/// contraction). Rows: DG0-symtensor2, columns: CG1-vector2.
SparseMatrix assemble_d_Grad(const FESpace & theta_space, const FESpace & kappa_space);

/// (r, n) = -int phi_gamma^r . phi_theta^n. Rows: DG0-vector2, columns: CG1-vector2.
SparseMatrix assemble_d0(const FESpace & gamma_space, const FESpace & theta_space);

enum class CouplingKind
{
  DirichletTrace, // CG1 value trace against the boundary basis
  NormalTrace,    // RT0 psi.n, or DG0-symtensor2 Phi n, against the boundary basis
};

/// (i, k) = int_{tagged edges} trace(phi_i) . psi_k ds. Rows: vol_space,
/// columns: bnd_space. Edges are those of the boundary space, optionally
/// restricted further to `tags`.
SparseMatrix assemble_boundary_coupling(const FESpace & vol_space, const FESpace & bnd_space,
                                        CouplingKind kind,
                                        const std::optional<TagSet> & tags = std::nullopt);

/// (l, k) = int coeff psi_l . psi_k ds over the boundary space's edges. With
/// `require_positive` (impedance use) a non-positive coefficient at an edge
/// quadrature point throws AssemblyError.
SparseMatrix assemble_boundary_mass(const FESpace & bnd_space,
                                    const CoefficientField & coeff = 1.0,
                                    bool require_positive = false,
                                    const std::optional<TagSet> & tags = std::nullopt);

/// Boundary mass of the traces of a volume space over `tags`:
/// CG1: int c phi_i phi_j ds; RT0: int c (psi_i.n)(psi_j.n) ds.
/// The coefficient must be positive at edge quadrature points.
SparseMatrix assemble_trace_mass(const FESpace & vol_space, const TagSet & tags,
                                 const CoefficientField & coeff);

/// (i, j) = int w phi_i . phi_j with w the CG1 field `weight` on `weight_space`.
/// Throws NumericalFailure if w <= 0 at a quadrature point.
SparseMatrix assemble_state_mass(const FESpace & space, const FESpace & weight_space,
                                 const Vector & weight);

/// N_i = int phi_sigma^i (f . e) with f, e coefficient vectors on vec_space.
Vector assemble_product_vector(const FESpace & sigma_space, const FESpace & vec_space,
                               const Vector & f, const Vector & e);

/// (i) = int f phi_i for scalar volume spaces.
Vector assemble_load(const FESpace & space, const ScalarFunction & f);
/// (i) = int f . phi_i for vector volume spaces.
Vector assemble_load(const FESpace & space, const VectorFunction & f);

/// CG1 nodal interpolation (scalar or vector2), DG0 cell averages
/// (degree-4 quadrature). Components of vector fields are given separately;
/// empty components are zero.
Vector interpolate(const FESpace & space, const std::vector<ScalarFunction> & components);

/// Values of f at the boundary vertices of a scalar boundary space.
Vector interpolate_boundary(const FESpace & bnd_space, const ScalarFunction & f);

} // namespace phfem
