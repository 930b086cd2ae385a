#include "phfem/linear_solver.hpp"

#include "phfem/error.hpp"

#include <Eigen/SparseLU>

namespace phfem
{

struct LinearSolver::Impl
{
  SparseMatrix a;
  double a_norm = 0.0; // infinity norm
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

LinearSolver::LinearSolver(const SparseMatrix & a)
{
  factorize(a);
}

void LinearSolver::factorize(const SparseMatrix & a)
{
  if (a.rows() != a.cols())
    throw SolverError("cannot factorize a non-square " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " matrix");
  auto impl = std::make_shared<Impl>();
  impl->a = a;
  impl->a.makeCompressed();
  Vector row_sums = Vector::Zero(a.rows());
  for (int k = 0; k < impl->a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(impl->a, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  impl->a_norm = a.rows() > 0 ? row_sums.maxCoeff() : 0.0;
  if (a.rows() > 0)
  {
    impl->lu.analyzePattern(impl->a);
    impl->lu.factorize(impl->a);
    if (impl->lu.info() != Eigen::Success)
      throw SolverError("sparse LU factorization failed (singular matrix?)");
  }
  impl_ = std::move(impl);
}

Index LinearSolver::size() const
{
  return impl_ ? static_cast<Index>(impl_->a.rows()) : 0;
}

Vector LinearSolver::solve(const Vector & b) const
{
  if (!impl_)
    throw SolverError("solve called before factorize");
  if (b.size() != impl_->a.rows())
    throw SolverError("right-hand side has size " + std::to_string(b.size()) + ", expected " +
                      std::to_string(impl_->a.rows()));
  if (b.size() == 0)
    return Vector();
  Vector x = impl_->lu.solve(b);
  const double b_norm = b.lpNorm<Eigen::Infinity>();
  double defect = 0.0;
  for (int iter = 0; iter < 10; ++iter)
  {
    if (!x.allFinite())
      throw SolverError("sparse LU produced non-finite values (singular matrix?)");
    const Vector r = b - impl_->a * x;
    const double bound = tolerance * (impl_->a_norm * x.lpNorm<Eigen::Infinity>() + b_norm);
    defect = r.lpNorm<Eigen::Infinity>();
    if (defect <= bound)
      return x;
    x += impl_->lu.solve(r);
  }
  throw SolverError("iterative refinement stalled at residual " + std::to_string(defect));
}

Vector solve(const SparseMatrix & a, const Vector & b)
{
  return LinearSolver(a).solve(b);
}

} // namespace phfem
