#include "phfem/ph_system.hpp"

#include "phfem/error.hpp"

#include <random>

namespace phfem
{

namespace
{

double max_abs(const SparseMatrix & a)
{
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

Vector random_vector(std::mt19937_64 & rng, Index n)
{
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    v(i) = dist(rng);
  return v;
}

} // namespace

double abs_form(const SparseMatrix & a, const Vector & x, const Vector & y)
{
  double s = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      s += std::abs(x(it.row()) * it.value() * y(it.col()));
  return s;
}

std::vector<Vector> PHLinearSystem::inputs(double t) const
{
  std::vector<Vector> u;
  u.reserve(ports.size());
  for (const auto & p : ports)
    u.push_back(p.u ? p.u(t) : Vector::Zero(p.B.cols()));
  return u;
}

Vector PHLinearSystem::input_term(const std::vector<Vector> & u) const
{
  if (u.size() != ports.size())
    throw InvalidArgument("expected " + std::to_string(ports.size()) + " port inputs");
  Vector b = Vector::Zero(dim());
  for (std::size_t k = 0; k < ports.size(); ++k)
  {
    if (u[k].size() != ports[k].B.cols())
      throw InvalidArgument("input of port '" + ports[k].name + "' has wrong size");
    b += ports[k].B * u[k];
  }
  return b;
}

void check_dimensions(const PHLinearSystem & sys)
{
  const Index n = sys.dim();
  auto square = [n](const SparseMatrix & a, const char * name) {
    if (a.rows() != n || a.cols() != n)
      throw InvalidArgument(std::string(name) + " must be " + std::to_string(n) + "x" +
                            std::to_string(n));
  };
  square(sys.M, "M");
  square(sys.J, "J");
  square(sys.R, "R");
  for (const auto & p : sys.ports)
  {
    if (p.B.rows() != n)
      throw InvalidArgument("port '" + p.name + "': B has wrong row count");
    if (p.M_bnd.rows() != p.B.cols() || p.M_bnd.cols() != p.B.cols())
      throw InvalidArgument("port '" + p.name + "': boundary mass does not match B");
  }
  if (sys.constraint && sys.constraint->G.rows() != n)
    throw InvalidArgument("constraint block has wrong row count");
}

bool StructureReport::passes(double tol) const
{
  return skew_defect <= tol * J_max && symmetry_defect <= tol * R_max &&
         min_rayleigh_R >= -tol * R_max && M_symmetry_defect <= tol * M_max &&
         min_rayleigh_M > 0.0 && dirac_relative <= tol;
}

StructureReport validate_structure(const PHLinearSystem & sys, unsigned seed)
{
  check_dimensions(sys);
  StructureReport r;
  r.J_max = max_abs(sys.J);
  r.skew_defect = max_abs(SparseMatrix(sys.J + SparseMatrix(sys.J.transpose())));
  r.R_max = max_abs(sys.R);
  r.symmetry_defect = max_abs(SparseMatrix(sys.R - SparseMatrix(sys.R.transpose())));
  r.M_max = max_abs(sys.M);
  r.M_symmetry_defect = max_abs(SparseMatrix(sys.M - SparseMatrix(sys.M.transpose())));

  std::mt19937_64 rng(seed);
  const Index n = sys.dim();
  r.min_rayleigh_R = std::numeric_limits<double>::infinity();
  r.min_rayleigh_M = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 20; ++s)
  {
    const Vector x = random_vector(rng, n);
    const double nx = x.squaredNorm();
    r.min_rayleigh_R = std::min(r.min_rayleigh_R, x.dot(sys.R * x) / nx);
    r.min_rayleigh_M = std::min(r.min_rayleigh_M, x.dot(sys.M * x) / nx);
  }

  const PHSolver solver(sys);
  for (int s = 0; s < 20; ++s)
  {
    const Vector e = random_vector(rng, n);
    std::vector<Vector> u;
    for (const auto & p : sys.ports)
      u.push_back(random_vector(rng, static_cast<Index>(p.B.cols())));
    Vector rhs = sys.J * e + sys.input_term(u);
    double constraint_power = 0.0;
    if (sys.constraint)
    {
      const Vector lambda = random_vector(rng, static_cast<Index>(sys.constraint->G.cols()));
      rhs += sys.constraint->G * lambda;
      constraint_power = lambda.dot(sys.constraint->G.transpose() * e);
    }
    const Vector f = solver.mass_solver().solve(rhs);
    const double volume = e.dot(sys.M * f);
    double boundary = 0.0, boundary_abs = 0.0;
    for (std::size_t k = 0; k < sys.ports.size(); ++k)
    {
      if (sys.ports[k].B.cols() == 0)
        continue;
      const Vector y = solver.observe_port(k, e);
      const double p = u[k].dot(sys.ports[k].M_bnd * y);
      boundary += p;
      boundary_abs += std::abs(p);
    }
    const double defect = std::abs(volume - boundary - constraint_power);
    const double scale = abs_form(sys.M, e, f) + boundary_abs + std::abs(constraint_power) +
                         abs_form(sys.J, e, e);
    r.dirac_defect = std::max(r.dirac_defect, defect);
    if (scale > 0.0)
      r.dirac_relative = std::max(r.dirac_relative, defect / scale);
  }
  return r;
}

double hamiltonian(const PHLinearSystem & sys, const Vector & e)
{
  if (e.size() != sys.dim())
    throw InvalidArgument("state has size " + std::to_string(e.size()) + ", system has " +
                          std::to_string(sys.dim()));
  return 0.5 * e.dot(sys.M * e);
}

PHSolver::PHSolver(const PHLinearSystem & sys) : sys_(sys)
{
  check_dimensions(sys_);
  mass_.factorize(sys_.M);
  port_mass_.resize(sys_.ports.size());
  for (std::size_t k = 0; k < sys_.ports.size(); ++k)
    if (sys_.ports[k].M_bnd.rows() > 0)
      port_mass_[k].factorize(sys_.ports[k].M_bnd);
}

std::vector<Vector> PHSolver::observe(const Vector & e) const
{
  if (e.size() != sys_.dim())
    throw InvalidArgument("observe: state has wrong size");
  std::vector<Vector> y;
  for (std::size_t k = 0; k < sys_.ports.size(); ++k)
    y.push_back(observe_port(k, e));
  return y;
}

Vector PHSolver::observe_port(std::size_t k, const Vector & e) const
{
  if (k >= sys_.ports.size())
    throw InvalidArgument("port index out of range");
  if (!port_mass_[k].factorized())
    throw SolverError("port '" + sys_.ports[k].name + "' has an empty boundary mass");
  return port_mass_[k].solve(sys_.ports[k].B.transpose() * e);
}

Vector PHSolver::rate(const Vector & e, const std::vector<Vector> & u) const
{
  if (e.size() != sys_.dim())
    throw InvalidArgument("rate: state has wrong size");
  return mass_.solve(sys_.J * e - sys_.R * e + sys_.input_term(u));
}

PowerBalance PHSolver::balance(const Vector & e, const Vector & e_dot,
                               const std::vector<Vector> & u, const Vector * lambda) const
{
  PowerBalance p;
  p.energy_rate = e.dot(sys_.M * e_dot);
  p.scale = abs_form(sys_.M, e, e_dot) + abs_form(sys_.J, e, e) + abs_form(sys_.R, e, e);
  for (std::size_t k = 0; k < sys_.ports.size(); ++k)
  {
    p.supplied += u[k].dot(sys_.ports[k].B.transpose() * e);
    p.scale += abs_form(sys_.ports[k].B, e, u[k]);
  }
  p.dissipated = e.dot(sys_.R * e);
  if (lambda && sys_.constraint)
  {
    p.constraint = lambda->dot(sys_.constraint->G.transpose() * e);
    p.scale += abs_form(sys_.constraint->G, e, *lambda);
  }
  p.residual = std::abs(p.energy_rate - p.supplied + p.dissipated - p.constraint);
  return p;
}

std::vector<Vector> observe(const PHLinearSystem & sys, const Vector & e)
{
  return PHSolver(sys).observe(e);
}

PowerBalance power_residual(const PHLinearSystem & sys, const Vector & e,
                            const std::vector<Vector> & u)
{
  const PHSolver solver(sys);
  return solver.balance(e, solver.rate(e, u), u);
}

} // namespace phfem
