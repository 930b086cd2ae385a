#include "phfem/integrators.hpp"

#include "phfem/error.hpp"

#include <cmath>
#include <sstream>

namespace phfem
{

namespace
{

void check_step(double dt, int nsteps)
{
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw InvalidArgument("time step must be positive, got " + std::to_string(dt));
  if (nsteps < 0)
    throw InvalidArgument("number of steps must be non-negative");
}

void check_initial(const PHLinearSystem & sys, const Vector & e0)
{
  if (e0.size() != sys.dim())
    throw InvalidArgument("initial state has size " + std::to_string(e0.size()) +
                          ", system has " + std::to_string(sys.dim()));
}

// Snapshot bookkeeping and blow-up detection shared by all schemes.
class Recorder
{
public:
  Recorder(Trajectory & traj, const IntegratorOptions & options, const SparseMatrix & mass,
           const Vector & e0)
      : traj_(traj), options_(options), mass_(mass)
  {
    if (options_.stride < 1)
      throw InvalidArgument("snapshot stride must be >= 1");
    traj_.times.push_back(options_.t0);
    traj_.states.push_back(e0);
    reference_ = energy_norm(e0);
  }

  void step(int n, double t, const Vector & e_old, const Vector & e_new, bool last)
  {
    if (!e_new.allFinite())
      throw NumericalFailure("non-finite state at t = " + time_string(t));
    const double norm = energy_norm(e_new);
    if (options_.blowup_factor > 0.0)
    {
      if (reference_ == 0.0)
        reference_ = norm;
      else if (norm > options_.blowup_factor * reference_)
        throw NumericalFailure("instability detected at t = " + time_string(t) +
                               ": energy norm grew by more than " +
                               time_string(options_.blowup_factor) + " (|e|_M = sqrt(e^T M e))");
    }
    if (options_.on_step)
      options_.on_step(n, t, e_old, e_new);
    if (n % options_.stride == 0 || last)
    {
      traj_.times.push_back(t);
      traj_.states.push_back(e_new);
    }
  }

  static std::string time_string(double t)
  {
    std::ostringstream ss;
    ss.precision(10);
    ss << t;
    return ss.str();
  }

private:
  double energy_norm(const Vector & e) const { return std::sqrt(std::abs(e.dot(mass_ * e))); }

  Trajectory & traj_;
  const IntegratorOptions & options_;
  const SparseMatrix & mass_;
  double reference_ = 0.0;
};

double time_at(const IntegratorOptions & o, double dt, int n)
{
  return o.t0 + dt * n;
}

void append_row(HamiltonianTrace & trace, const PHLinearSystem & sys, double t,
                const Vector & e, const PowerBalance & p)
{
  trace.append(t, hamiltonian(sys, e), p.supplied, p.dissipated, p.residual, p.scale);
}

double relative(const PowerBalance & p)
{
  return p.scale > 0.0 ? p.residual / p.scale : p.residual;
}

// Instantaneous supplied/dissipated power at (e, t) with the balance of the
// given pair merged in.
PowerBalance row_balance(const PHSolver & solver, const Vector & e, double t,
                         const PowerBalance & step_balance)
{
  const auto & sys = solver.system();
  PowerBalance p = step_balance;
  const std::vector<Vector> u = sys.inputs(t);
  p.supplied = 0.0;
  for (std::size_t k = 0; k < sys.ports.size(); ++k)
    p.supplied += u[k].dot(sys.ports[k].B.transpose() * e);
  p.dissipated = e.dot(sys.R * e);
  return p;
}

void record_constraint(Trajectory & traj, const ConstraintBlock & c, const Vector & e, double t)
{
  const Vector v = c.v ? c.v(t) : Vector::Zero(c.G.cols());
  const Vector g = c.G.transpose() * e;
  traj.constraint_defect.push_back((g - v).lpNorm<Eigen::Infinity>());
  // Magnitude of the traces the constrained components can produce: a state
  // whose trace vanishes by symmetry still sets the roundoff level.
  const SparseMatrix g_abs = c.G.cwiseAbs();
  const Vector rows = g_abs * Vector::Ones(g_abs.cols());
  const Vector cols = SparseMatrix(g_abs.transpose()) * Vector::Ones(g_abs.rows());
  double e_coupled = 0.0;
  for (Index i = 0; i < rows.size(); ++i)
    if (rows(i) > 0.0)
      e_coupled = std::max(e_coupled, std::abs(e(i)));
  double scale = v.lpNorm<Eigen::Infinity>();
  if (cols.size())
    scale = std::max(scale, cols.maxCoeff() * e_coupled);
  // Running maximum, so zero crossings of the signal do not shrink the scale.
  if (!traj.constraint_scale.empty())
    scale = std::max(scale, traj.constraint_scale.back());
  traj.constraint_scale.push_back(scale);
}

} // namespace

void HamiltonianTrace::append(double time, double h, double p_supplied, double p_dissipated,
                              double res, double res_scale)
{
  t.push_back(time);
  H.push_back(h);
  supplied.push_back(p_supplied);
  dissipated.push_back(p_dissipated);
  residual.push_back(res);
  scale.push_back(res_scale);
}

Trajectory implicit_midpoint(const PHLinearSystem & sys, const Vector & e0, double dt,
                             int nsteps, const IntegratorOptions & options)
{
  check_step(dt, nsteps);
  check_initial(sys, e0);
  if (sys.constraint)
    throw InvalidArgument("implicit_midpoint does not handle constraint blocks");

  const PHSolver solver(sys);
  const SparseMatrix jr = sys.J - sys.R;
  const LinearSolver lhs(SparseMatrix(sys.M - 0.5 * dt * jr));
  const SparseMatrix rhs_matrix = sys.M + 0.5 * dt * jr;

  Trajectory traj;
  Recorder rec(traj, options, sys.M, e0);
  {
    const double t = options.t0;
    const std::vector<Vector> u = sys.inputs(t);
    append_row(traj.trace, sys, t, e0, solver.balance(e0, solver.rate(e0, u), u));
  }

  Vector e = e0;
  for (int n = 0; n < nsteps; ++n)
  {
    const double t = time_at(options, dt, n);
    const double t_mid = t + 0.5 * dt;
    const double t_new = time_at(options, dt, n + 1);
    const std::vector<Vector> u_mid = sys.inputs(t_mid);
    const Vector e_new = lhs.solve(rhs_matrix * e + dt * sys.input_term(u_mid));

    const Vector e_mid = 0.5 * (e + e_new);
    const Vector e_dot = (e_new - e) / dt;
    const PowerBalance step = solver.balance(e_mid, e_dot, u_mid);
    append_row(traj.trace, sys, t_new, e_new, row_balance(solver, e_new, t_new, step));

    rec.step(n + 1, t_new, e, e_new, n + 1 == nsteps);
    e = e_new;
  }
  return traj;
}

Trajectory rk4(const PHLinearSystem & sys, const Vector & e0, double dt, int nsteps,
               const IntegratorOptions & options)
{
  check_step(dt, nsteps);
  check_initial(sys, e0);
  if (sys.constraint)
    throw InvalidArgument("rk4 does not handle constraint blocks; use rk4_augmented");

  const PHSolver solver(sys);
  Trajectory traj;
  Recorder rec(traj, options, sys.M, e0);

  Vector e = e0;
  for (int n = 0; n <= nsteps; ++n)
  {
    const double t = time_at(options, dt, n);
    const double ts[4] = {t, t + 0.5 * dt, t + 0.5 * dt, t + dt};
    const double a[4] = {0.0, 0.5 * dt, 0.5 * dt, dt};
    Vector k[4];
    PowerBalance worst;
    bool have = false;
    const int stages = n < nsteps ? 4 : 1;
    for (int s = 0; s < stages; ++s)
    {
      const Vector es = s == 0 ? e : Vector(e + a[s] * k[s - 1]);
      const std::vector<Vector> u = sys.inputs(ts[s]);
      k[s] = solver.rate(es, u);
      const PowerBalance p = solver.balance(es, k[s], u);
      if (!have || relative(p) > relative(worst))
      {
        worst = p;
        have = true;
      }
    }
    append_row(traj.trace, sys, t, e, row_balance(solver, e, t, worst));
    if (n == nsteps)
      break;
    const Vector e_new = e + (dt / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
    rec.step(n + 1, time_at(options, dt, n + 1), e, e_new, n + 1 == nsteps);
    e = e_new;
  }
  return traj;
}

SaddleSolver::SaddleSolver(const PHLinearSystem & sys) : sys_(sys)
{
  check_dimensions(sys_);
  if (!sys_.constraint)
    throw InvalidArgument("system has no constraint block");
  const SparseMatrix & g = sys_.constraint->G;
  const Index n = sys_.dim();
  const Index m = static_cast<Index>(g.cols());
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < sys_.M.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys_.M, k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < g.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(g, k); it; ++it)
    {
      t.emplace_back(it.row(), n + it.col(), -it.value());
      t.emplace_back(n + it.col(), it.row(), it.value());
    }
  SparseMatrix k(n + m, n + m);
  k.setFromTriplets(t.begin(), t.end());
  try
  {
    solver_.factorize(k);
  }
  catch (const SolverError & err)
  {
    throw SolverError(std::string("singular saddle matrix: ") + err.what());
  }
}

ConstrainedRate SaddleSolver::rate(const Vector & e, double t) const
{
  const Index n = sys_.dim();
  const auto & c = *sys_.constraint;
  const Index m = static_cast<Index>(c.G.cols());
  Vector rhs(n + m);
  rhs.head(n) = sys_.J * e - sys_.R * e + sys_.input_term(sys_.inputs(t));
  rhs.tail(m) = c.v_dot ? c.v_dot(t) : Vector::Zero(m);
  const Vector x = solver_.solve(rhs);
  return {x.head(n), x.tail(m)};
}

Trajectory rk4_augmented(const PHLinearSystem & sys, const Vector & e0, double dt, int nsteps,
                         const IntegratorOptions & options)
{
  check_step(dt, nsteps);
  check_initial(sys, e0);
  if (!sys.constraint)
    throw InvalidArgument("rk4_augmented needs a constraint block");
  const ConstraintBlock & c = *sys.constraint;

  Trajectory traj;
  record_constraint(traj, c, e0, options.t0);
  if (traj.constraint_defect[0] > 1e-10 * traj.constraint_scale[0])
  {
    std::ostringstream ss;
    ss << "initial state violates the constraint: defect " << traj.constraint_defect[0];
    throw NumericalFailure(ss.str());
  }

  const PHSolver solver(sys);
  const SaddleSolver saddle(sys);
  Recorder rec(traj, options, sys.M, e0);

  Vector e = e0;
  for (int n = 0; n <= nsteps; ++n)
  {
    const double t = time_at(options, dt, n);
    const double ts[4] = {t, t + 0.5 * dt, t + 0.5 * dt, t + dt};
    const double a[4] = {0.0, 0.5 * dt, 0.5 * dt, dt};
    Vector k[4];
    PowerBalance worst;
    bool have = false;
    const int stages = n < nsteps ? 4 : 1;
    for (int s = 0; s < stages; ++s)
    {
      const Vector es = s == 0 ? e : Vector(e + a[s] * k[s - 1]);
      const ConstrainedRate r = saddle.rate(es, ts[s]);
      k[s] = r.k;
      if (s == 0)
        traj.multipliers.push_back(r.lambda);
      const std::vector<Vector> u = sys.inputs(ts[s]);
      const PowerBalance p = solver.balance(es, r.k, u, &r.lambda);
      if (!have || relative(p) > relative(worst))
      {
        worst = p;
        have = true;
      }
    }
    append_row(traj.trace, sys, t, e, row_balance(solver, e, t, worst));
    if (n == nsteps)
      break;
    const Vector e_new = e + (dt / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
    const double t_new = time_at(options, dt, n + 1);
    rec.step(n + 1, t_new, e, e_new, n + 1 == nsteps);
    record_constraint(traj, c, e_new, t_new);
    e = e_new;
  }
  return traj;
}

} // namespace phfem
