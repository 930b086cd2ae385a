#pragma once

#include "phfem/assembly.hpp"
#include "phfem/linear_solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace phfem
{

using Signal = std::function<Vector(double)>;

/// Boundary port: input u(t) enters as B u, the collocated output solves
/// M_bnd y = B^T e.
struct Port
{
  std::string name;
  SparseMatrix B;     // n x m
  SparseMatrix M_bnd; // m x m
  Signal u;           // empty: zero input
};

/// Algebraic constraint G^T e = v(t), enforced by a multiplier entering the
/// dynamics as G lambda.
struct ConstraintBlock
{
  SparseMatrix G; // n x k
  Signal v;
  Signal v_dot;
};

/// M edot = (J - R) e + sum_k B_k u_k(t) [+ G lambda].
struct PHLinearSystem
{
  SparseMatrix M;
  SparseMatrix J;
  SparseMatrix R;
  std::vector<Port> ports;
  std::optional<ConstraintBlock> constraint;

  Index dim() const { return static_cast<Index>(M.rows()); }

  /// Input values of every port at time t (zero vectors for empty signals).
  std::vector<Vector> inputs(double t) const;
  /// sum_k B_k u_k.
  Vector input_term(const std::vector<Vector> & u) const;
};

/// Throws InvalidArgument if block dimensions are inconsistent.
void check_dimensions(const PHLinearSystem & sys);

struct StructureReport
{
  double J_max = 0.0;
  double skew_defect = 0.0; // max |J + J^T|
  double R_max = 0.0;
  double symmetry_defect = 0.0; // max |R - R^T|
  double min_rayleigh_R = 0.0;  // min x^T R x / |x|^2 over random x
  double min_rayleigh_M = 0.0;
  double M_symmetry_defect = 0.0;
  double M_max = 0.0;
  double dirac_defect = 0.0;   // max over samples of |e^T M f - sum u^T M_bnd y|
  double dirac_relative = 0.0; // max over samples of defect / scale

  /// Checks against the given relative tolerance.
  bool passes(double tol = 1e-12) const;
};

/// Skew/symmetry/definiteness and Dirac pairing checks with 20 random samples
/// drawn from a fixed seed.
StructureReport validate_structure(const PHLinearSystem & sys, unsigned seed = 12345);

/// |x|^T |A| |y|: magnitude of the terms summed in x^T A y.
double abs_form(const SparseMatrix & a, const Vector & x, const Vector & y);

/// 1/2 e^T M e.
double hamiltonian(const PHLinearSystem & sys, const Vector & e);

/// Terms of the power balance e^T M edot = P_supplied - P_dissipated + P_constraint.
struct PowerBalance
{
  double energy_rate = 0.0;
  double supplied = 0.0;
  double dissipated = 0.0;
  double constraint = 0.0;
  double residual = 0.0;
  double scale = 0.0;
};

/// Holds the factorizations needed to evaluate a system: mass matrix and
/// boundary masses.
class PHSolver
{
public:
  explicit PHSolver(const PHLinearSystem & sys);

  const PHLinearSystem & system() const { return sys_; }
  const LinearSolver & mass_solver() const { return mass_; }

  /// y_k solving M_bnd,k y_k = B_k^T e. Throws SolverError for an empty port.
  std::vector<Vector> observe(const Vector & e) const;
  Vector observe_port(std::size_t k, const Vector & e) const;

  /// edot = M^{-1} ((J - R) e + B u).
  Vector rate(const Vector & e, const std::vector<Vector> & u) const;

  /// Balance terms from a given (e, edot) pair, inputs and multiplier.
  PowerBalance balance(const Vector & e, const Vector & e_dot, const std::vector<Vector> & u,
                       const Vector * lambda = nullptr) const;

private:
  PHLinearSystem sys_;
  LinearSolver mass_;
  std::vector<LinearSolver> port_mass_;
};

std::vector<Vector> observe(const PHLinearSystem & sys, const Vector & e);

/// |e^T M edot - (u^T B^T e - e^T R e)| with edot solved from the dynamics.
PowerBalance power_residual(const PHLinearSystem & sys, const Vector & e,
                            const std::vector<Vector> & u);

} // namespace phfem
