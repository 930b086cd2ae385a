#include "phfem/wave.hpp"

#include "phfem/assembly.hpp"
#include "phfem/error.hpp"

#include "block_builder.hpp"

namespace phfem
{

WaveModel build_wave_system(MeshPtr mesh, const WaveConfig & config)
{
  WaveModel m{mesh,
              FESpace(mesh, Family::CG1Scalar),
              FESpace(mesh, Family::RT0),
              FESpace(mesh, Family::BoundaryCG1Scalar, all_rectangle_tags()),
              {},
              {},
              {},
              {}};
  const Index np = m.n_p();
  const Index nq = m.n_q();
  const Index n = np + nq;

  m.M_rho = assemble_mass(m.p_space, require_spd(config.rho));
  m.M_T_inv = assemble_mass(m.q_space, inverse(config.T));

  BlockBuilder mass;
  mass.add(m.M_rho, 0, 0);
  mass.add(m.M_T_inv, np, np);
  m.system.M = mass.build(n, n);

  const TagSet tags = all_rectangle_tags();
  BlockBuilder j, r;
  Port port;
  port.M_bnd = assemble_boundary_mass(m.bnd_space);
  if (config.formulation == WaveFormulation::Grad)
  {
    m.D = assemble_d_grad(m.p_space, m.q_space);
    j.add(SparseMatrix(m.D.transpose()), 0, np, -1.0);
    j.add(m.D, np, 0);
    port.name = "neumann";
    BlockBuilder b;
    b.add(assemble_boundary_coupling(m.p_space, m.bnd_space, CouplingKind::DirichletTrace), 0, 0);
    port.B = b.build(n, m.bnd_space.n_dofs());
    if (config.Z)
      r.add(assemble_trace_mass(m.p_space, tags, inverse(*config.Z)), 0, 0);
  }
  else
  {
    m.D = assemble_d_div(m.p_space, m.q_space);
    j.add(m.D, 0, np);
    j.add(SparseMatrix(m.D.transpose()), np, 0, -1.0);
    port.name = "dirichlet";
    BlockBuilder b;
    b.add(assemble_boundary_coupling(m.q_space, m.bnd_space, CouplingKind::NormalTrace), np, 0);
    port.B = b.build(n, m.bnd_space.n_dofs());
    if (config.Z)
      r.add(assemble_trace_mass(m.q_space, tags, *config.Z), np, np);
  }
  if (config.eps)
    r.add(assemble_mass(m.p_space, *config.eps), 0, 0);
  m.system.J = j.build(n, n);
  m.system.R = r.build(n, n);
  port.u = boundary_signal(m.bnd_space, config.control);
  m.system.ports.push_back(std::move(port));
  check_dimensions(m.system);
  return m;
}

Vector wave_initial_state(const WaveModel & model, const WaveConfig & config)
{
  Vector e = Vector::Zero(model.system.dim());
  if (config.ap_0)
    e.head(model.n_p()) = solve(model.M_rho, assemble_load(model.p_space, config.ap_0));
  if (config.aq_0_1 || config.aq_0_2)
  {
    const ScalarFunction a1 = config.aq_0_1, a2 = config.aq_0_2;
    const VectorFunction aq = [a1, a2](const Point & x) {
      return Eigen::Vector2d(a1 ? a1(x) : 0.0, a2 ? a2(x) : 0.0);
    };
    e.tail(model.n_q()) = solve(model.M_T_inv, assemble_load(model.q_space, aq));
  }
  return e;
}

WaveRun run_wave(const WaveModel & model, const WaveConfig & config)
{
  const int nsteps = step_count(config.ti, config.tf, config.dt);
  const Vector e0 = wave_initial_state(model, config);
  const Index np = model.n_p();

  WaveRun run;
  Vector w = Vector::Zero(np);
  if (config.w_0)
  {
    const SparseMatrix m1 = assemble_mass(model.p_space);
    w = solve(m1, assemble_load(model.p_space, config.w_0));
  }
  run.deflection.push_back(w);

  IntegratorOptions options;
  options.t0 = config.ti;
  options.stride = config.stride;
  const double dt = config.dt;
  options.on_step = [&](int step, double, const Vector & e_old, const Vector & e_new) {
    w += (0.5 * dt) * (e_old.head(np) + e_new.head(np));
    if (step % config.stride == 0 || step == nsteps)
      run.deflection.push_back(w);
  };

  if (config.scheme == TimeScheme::Midpoint)
    run.trajectory = implicit_midpoint(model.system, e0, dt, nsteps, options);
  else
    run.trajectory = rk4(model.system, e0, dt, nsteps, options);
  return run;
}

} // namespace phfem
