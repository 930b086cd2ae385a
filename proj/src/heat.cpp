#include "phfem/heat.hpp"

#include "phfem/assembly.hpp"
#include "phfem/error.hpp"

#include "block_builder.hpp"

#include <Eigen/SparseCholesky>

#include <sstream>

namespace phfem
{

namespace
{

std::string at_time(double t)
{
  std::ostringstream ss;
  ss.precision(10);
  ss << " at t = " << t;
  return ss.str();
}

// The temperature-weighted masses are SPD whenever the temperature is positive.
Vector spd_solve(const SparseMatrix & a, const Vector & b, double t)
{
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw NumericalFailure("temperature-weighted mass is not positive definite" + at_time(t));
  Vector x = ldlt.solve(b);
  x += ldlt.solve(b - a * x);
  return x;
}

} // namespace

Vector HeatOperators::input(double t) const
{
  return u ? u(t) : Vector::Zero(bnd_space.n_dofs());
}

HeatOperators build_heat_operators(MeshPtr mesh, const HeatConfig & config)
{
  HeatOperators ops{mesh,
                    FESpace(mesh, Family::CG1Scalar),
                    FESpace(mesh, Family::RT0),
                    FESpace(mesh, Family::BoundaryCG1Scalar, all_rectangle_tags()),
                    {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};

  const CoefficientField rho = require_spd(config.rho);
  const CoefficientField cv = require_spd(config.cv);
  const CoefficientField rho_cv = CoefficientField::scalar(
      [rho, cv](const Point & x) { return rho.scalar_at(x) * cv.scalar_at(x); }, "rho*cv");

  ops.M_s = assemble_mass(ops.s_space);
  ops.M_rhoCv = assemble_mass(ops.s_space, rho_cv);
  ops.M_S = assemble_mass(ops.S_space);
  ops.M_sigma = ops.M_s;
  ops.Lambda = assemble_mass(ops.S_space, require_spd(config.lambda));
  ops.D = -assemble_d_div(ops.s_space, ops.S_space);
  ops.B0 = -assemble_boundary_coupling(ops.S_space, ops.bnd_space, CouplingKind::NormalTrace);
  ops.M_bnd = assemble_boundary_mass(ops.bnd_space);

  ops.M_s_solver.factorize(ops.M_s);
  ops.M_rhoCv_solver.factorize(ops.M_rhoCv);
  ops.M_S_solver.factorize(ops.M_S);
  ops.M_bnd_solver.factorize(ops.M_bnd);
  ops.u = boundary_signal(ops.bnd_space, config.control);
  return ops;
}

PHLinearSystem heat_dirac_system(const HeatOperators & ops)
{
  const Index ns = ops.n_s(), nS = ops.n_S();
  const Index n = 2 * ns + nS;
  BlockBuilder m, j, b;
  m.add(ops.M_s, 0, 0);
  m.add(ops.M_S, ns, ns);
  m.add(ops.M_sigma, ns + nS, ns + nS);
  j.add(ops.D, 0, ns);
  j.add(ops.M_sigma, 0, ns + nS, -1.0);
  j.add(SparseMatrix(ops.D.transpose()), ns, 0, -1.0);
  j.add(ops.M_sigma, ns + nS, 0);
  b.add(ops.B0, ns, 0);

  PHLinearSystem sys;
  sys.M = m.build(n, n);
  sys.J = j.build(n, n);
  sys.R = SparseMatrix(n, n);
  sys.ports.push_back(Port{"temperature", b.build(n, ops.bnd_space.n_dofs()), ops.M_bnd, ops.u});
  return sys;
}

HeatState heat_stage(const HeatOperators & ops, double t, const Vector & alpha_s,
                     const Vector & u)
{
  if (alpha_s.size() != ops.n_s())
    throw InvalidArgument("alpha_s has wrong size");
  if (u.size() != ops.bnd_space.n_dofs())
    throw InvalidArgument("boundary input has wrong size");

  HeatState s;
  s.t = t;
  s.alpha_s = alpha_s;
  s.u = u;
  // Dulong-Petit.
  s.e_s = ops.M_rhoCv_solver.solve(ops.M_s * alpha_s);
  if (!s.e_s.allFinite())
    throw NumericalFailure("non-finite temperature" + at_time(t));
  s.f_S = ops.M_S_solver.solve(-(ops.D.transpose() * s.e_s) + ops.B0 * u);

  // Fourier's law and the entropy production closure; both masses are
  // weighted by the temperature.
  SparseMatrix m_es, m_sigma_es;
  try
  {
    m_es = assemble_state_mass(ops.S_space, ops.s_space, s.e_s);
    m_sigma_es = assemble_state_mass(ops.s_space, ops.s_space, s.e_s);
  }
  catch (const NumericalFailure & err)
  {
    throw NumericalFailure(err.what() + at_time(t));
  }
  s.e_S = spd_solve(m_es, ops.Lambda * s.f_S, t);
  const Vector n = assemble_product_vector(ops.s_space, ops.S_space, s.f_S, s.e_S);
  s.e_sigma = spd_solve(m_sigma_es, -n, t);
  s.f_sigma = s.e_s;

  s.alpha_s_dot = ops.M_s_solver.solve(ops.D * s.e_S - ops.M_sigma * s.e_sigma);
  s.y_bnd = ops.M_bnd_solver.solve(ops.B0.transpose() * s.e_S);
  return s;
}

HeatState heat_step(const HeatState & state, const HeatOperators & ops, const Vector & u_next,
                    double dt)
{
  if (!(dt > 0.0))
    throw InvalidArgument("time step must be positive");
  return heat_stage(ops, state.t + dt, state.alpha_s + dt * state.alpha_s_dot, u_next);
}

HeatBalance heat_power_balance(const HeatState & s, const HeatOperators & ops)
{
  HeatBalance b;
  b.energy_rate = s.e_s.dot(ops.M_s * s.alpha_s_dot);
  b.supplied = s.u.dot(ops.M_bnd * s.y_bnd);
  b.residual = std::abs(b.energy_rate - b.supplied);
  b.scale = abs_form(ops.M_s, s.e_s, s.alpha_s_dot) + abs_form(ops.D, s.e_s, s.e_S) +
            abs_form(ops.M_sigma, s.e_s, s.e_sigma) + abs_form(ops.M_S, s.e_S, s.f_S) +
            abs_form(ops.M_bnd, s.u, s.y_bnd);
  return b;
}

double heat_power_residual(const HeatState & state, const HeatOperators & ops)
{
  return heat_power_balance(state, ops).residual;
}

double heat_hamiltonian(const HeatState & state, const HeatOperators & ops)
{
  return 0.5 * state.alpha_s.dot(ops.M_s * state.e_s);
}

double heat_internal_energy(const HeatState & state, const HeatOperators & ops)
{
  return (ops.M_rhoCv * state.e_s).sum();
}

Vector heat_initial_alpha(const HeatOperators & ops, const HeatConfig & config)
{
  if (config.eu_0)
  {
    const Vector e_s = ops.M_s_solver.solve(assemble_load(ops.s_space, config.eu_0));
    return ops.M_s_solver.solve(ops.M_rhoCv * e_s);
  }
  if (config.au_0)
    return ops.M_s_solver.solve(assemble_load(ops.s_space, config.au_0));
  throw ConfigError("heat model needs an initial temperature (eu_0) or entropy (au_0)");
}

HeatRun run_heat(const HeatOperators & ops, const HeatConfig & config)
{
  const int nsteps = step_count(config.ti, config.tf, config.dt);
  if (config.stride < 1)
    throw InvalidArgument("snapshot stride must be >= 1");

  HeatRun run;
  HeatState s = heat_stage(ops, config.ti, heat_initial_alpha(ops, config), ops.input(config.ti));
  auto record = [&](const HeatState & st) {
    const HeatBalance b = heat_power_balance(st, ops);
    run.trace.append(st.t, heat_hamiltonian(st, ops), b.supplied, 0.0, b.residual, b.scale);
    run.internal_energy.push_back(heat_internal_energy(st, ops));
  };
  record(s);
  run.times.push_back(s.t);
  run.temperature.push_back(s.e_s);

  for (int n = 1; n <= nsteps; ++n)
  {
    const double t_new = config.ti + n * config.dt;
    s = heat_step(s, ops, ops.input(t_new), config.dt);
    s.t = t_new;
    record(s);
    if (n % config.stride == 0 || n == nsteps)
    {
      run.times.push_back(s.t);
      run.temperature.push_back(s.e_s);
    }
  }
  return run;
}

} // namespace phfem
