#pragma once

#include "phfem/assembly.hpp"

#include <memory>

namespace phfem
{

/// Sparse direct solver (LU with partial pivoting) followed by iterative
/// refinement until the normwise backward error
///   |b - A x|_inf <= tol * (|A|_inf |x|_inf + |b|_inf)
/// drops below 1e-12. Copies share the factorization.
class LinearSolver
{
public:
  static constexpr double tolerance = 1e-12;

  LinearSolver() = default;
  explicit LinearSolver(const SparseMatrix & a);

  /// Throws SolverError if the matrix is not square or is singular.
  void factorize(const SparseMatrix & a);
  bool factorized() const { return impl_ != nullptr; }
  Index size() const;

  /// Throws SolverError if refinement does not reach the tolerance.
  Vector solve(const Vector & b) const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// One-shot factorize-and-solve.
Vector solve(const SparseMatrix & a, const Vector & b);

} // namespace phfem
