#include "phfem/mindlin.hpp"

#include "phfem/assembly.hpp"
#include "phfem/error.hpp"

#include "block_builder.hpp"

namespace phfem
{

void validate(const MindlinConfig & c)
{
  if (!(c.E > 0.0))
    throw ConfigError("Young modulus must be positive");
  if (!(c.rho > 0.0))
    throw ConfigError("density must be positive");
  if (!(c.b > 0.0))
    throw ConfigError("thickness must be positive");
  if (!(c.k_sh > 0.0))
    throw ConfigError("shear correction factor must be positive");
  if (!(c.nu > 0.0 && c.nu < 0.5))
    throw ConfigError("Poisson ratio must lie in (0, 0.5)");
  for (BoundaryTag t : c.dir_tags)
    if (c.nor_tags.count(t))
      throw ConfigError("boundary tag " + std::string(to_string(t)) +
                        " is both Dirichlet and Neumann");
}

double shear_rigidity(const MindlinConfig & c)
{
  return c.E * c.b * c.k_sh / (2.0 * (1.0 + c.nu));
}

double bending_rigidity(const MindlinConfig & c)
{
  return c.E * c.b * c.b * c.b / (12.0 * (1.0 - c.nu * c.nu));
}

namespace
{

double rigidity(double E, double nu, double b)
{
  return E * b * b * b / (12.0 * (1.0 - nu * nu));
}

} // namespace

Eigen::Matrix2d bending_stiffness(const Eigen::Matrix2d & x, double E, double nu, double b)
{
  const double c = rigidity(E, nu, b);
  return c * ((1.0 - nu) * x + nu * x.trace() * Eigen::Matrix2d::Identity());
}

Eigen::Matrix2d bending_compliance(const Eigen::Matrix2d & y, double E, double nu, double b)
{
  const double c = rigidity(E, nu, b);
  return y / (c * (1.0 - nu)) -
         nu * y.trace() / (c * (1.0 - nu) * (1.0 + nu)) * Eigen::Matrix2d::Identity();
}

Eigen::Matrix3d bending_compliance_operator(double E, double nu, double b)
{
  const double c = rigidity(E, nu, b);
  return isotropic_operator(1.0 / (c * (1.0 - nu)), nu / (c * (1.0 - nu) * (1.0 + nu)));
}

MindlinModel build_mindlin_system(MeshPtr mesh, const MindlinConfig & config)
{
  validate(config);
  for (const auto & be : mesh->boundary_edges())
    if (!config.dir_tags.count(be.tag) && !config.nor_tags.count(be.tag))
      throw ConfigError("boundary edges tagged " + std::string(to_string(be.tag)) +
                        " are neither Dirichlet nor Neumann");

  MindlinModel m{mesh,
                 FESpace(mesh, Family::CG1Scalar),
                 FESpace(mesh, Family::CG1Vector2),
                 FESpace(mesh, Family::DG0SymTensor2),
                 FESpace(mesh, Family::DG0Vector2),
                 {}, {}, {}, {}, {}, {}};
  const Index n = m.n_w() + m.n_th() + m.n_kap() + m.n_gam();
  const Index o_th = m.offset_th(), o_kap = m.offset_kap(), o_gam = m.offset_gam();

  const double rb = config.rho * config.b;
  const double i_theta = config.rho * config.b * config.b * config.b / 12.0;
  const Eigen::Matrix3d compliance = bending_compliance_operator(config.E, config.nu, config.b);

  m.M_w = assemble_mass(m.w_space, rb);
  BlockBuilder mass;
  mass.add(m.M_w, 0, 0);
  mass.add(assemble_mass(m.th_space, i_theta), o_th, o_th);
  mass.add(assemble_mass(m.kap_space, CoefficientField::sym_tensor_operator(
                                          [compliance](const Point &) { return compliance; },
                                          "bending compliance")),
           o_kap, o_kap);
  mass.add(assemble_mass(m.gam_space, 1.0 / shear_rigidity(config)), o_gam, o_gam);
  m.system.M = mass.build(n, n);

  const SparseMatrix d_grad = assemble_d_grad(m.w_space, m.gam_space);
  const SparseMatrix d_Grad = assemble_d_Grad(m.th_space, m.kap_space);
  const SparseMatrix d0 = assemble_d0(m.gam_space, m.th_space);
  BlockBuilder j;
  j.add(SparseMatrix(d_grad.transpose()), 0, o_gam, -1.0);
  j.add(SparseMatrix(d_Grad.transpose()), o_th, o_kap, -1.0);
  j.add(SparseMatrix(d0.transpose()), o_th, o_gam, -1.0);
  j.add(d_Grad, o_kap, o_th);
  j.add(d_grad, o_gam, 0);
  j.add(d0, o_gam, o_th);
  m.system.J = j.build(n, n);
  m.system.R = SparseMatrix(n, n);

  if (!config.nor_tags.empty())
  {
    m.nor_w_space.emplace(mesh, Family::BoundaryCG1Scalar, config.nor_tags);
    m.nor_th_space.emplace(mesh, Family::BoundaryCG1Vector2, config.nor_tags);

    Port shear;
    shear.name = "shear";
    BlockBuilder bw;
    bw.add(assemble_boundary_coupling(m.w_space, *m.nor_w_space, CouplingKind::DirichletTrace),
           0, 0);
    shear.B = bw.build(n, m.nor_w_space->n_dofs());
    shear.M_bnd = assemble_boundary_mass(*m.nor_w_space);
    shear.u = boundary_signal(*m.nor_w_space, config.shear);
    m.system.ports.push_back(std::move(shear));

    Port moment;
    moment.name = "moment";
    BlockBuilder bt;
    bt.add(assemble_boundary_coupling(m.th_space, *m.nor_th_space, CouplingKind::DirichletTrace),
           o_th, 0);
    moment.B = bt.build(n, m.nor_th_space->n_dofs());
    moment.M_bnd = assemble_boundary_mass(*m.nor_th_space);
    m.system.ports.push_back(std::move(moment));
  }

  if (!config.dir_tags.empty())
  {
    m.dir_w_space.emplace(mesh, Family::BoundaryCG1Scalar, config.dir_tags);
    m.dir_th_space.emplace(mesh, Family::BoundaryCG1Vector2, config.dir_tags);
    const Index kw = m.dir_w_space->n_dofs();
    const Index kt = m.dir_th_space->n_dofs();

    ConstraintBlock c;
    BlockBuilder g;
    g.add(assemble_boundary_coupling(m.w_space, *m.dir_w_space, CouplingKind::DirichletTrace),
          0, 0);
    g.add(assemble_boundary_coupling(m.th_space, *m.dir_th_space, CouplingKind::DirichletTrace),
          o_th, kw);
    c.G = g.build(n, kw + kt);

    if (config.dir_sp0 && (config.dir_tm0 || config.dir_tm0_dot))
    {
      const Vector weak = assemble_boundary_mass(*m.dir_w_space) *
                          interpolate_boundary(*m.dir_w_space, config.dir_sp0);
      auto make = [weak, kt](TimeFunction tm) -> Signal {
        if (!tm)
          return {};
        return [weak, kt, tm](double t) {
          Vector v = Vector::Zero(weak.size() + kt);
          v.head(weak.size()) = tm(t) * weak;
          return v;
        };
      };
      c.v = make(config.dir_tm0);
      c.v_dot = make(config.dir_tm0_dot);
    }
    m.system.constraint = std::move(c);
  }
  check_dimensions(m.system);
  return m;
}

Vector mindlin_initial_state(const MindlinModel & m, const MindlinConfig & c)
{
  Vector e = Vector::Zero(m.system.dim());
  e.segment(0, m.n_w()) = interpolate(m.w_space, {c.ew_0});
  e.segment(m.offset_th(), m.n_th()) = interpolate(m.th_space, {c.eth1_0, c.eth2_0});
  e.segment(m.offset_kap(), m.n_kap()) =
      interpolate(m.kap_space, {c.ekap11_0, c.ekap12_0, c.ekap22_0});
  e.segment(m.offset_gam(), m.n_gam()) = interpolate(m.gam_space, {c.egam1_0, c.egam2_0});
  return e;
}

MindlinRun run_mindlin(const MindlinModel & model, const MindlinConfig & config)
{
  const int nsteps = step_count(config.ti, config.tf, config.dt);
  const Vector e0 = mindlin_initial_state(model, config);
  const Index nw = model.n_w();

  MindlinRun run;
  Vector w = Vector::Zero(nw);
  run.deflection.push_back(w);

  IntegratorOptions options;
  options.t0 = config.ti;
  options.stride = config.stride;
  options.blowup_factor = 1e6;
  const double dt = config.dt;
  options.on_step = [&](int step, double, const Vector & e_old, const Vector & e_new) {
    w += (0.5 * dt) * (e_old.head(nw) + e_new.head(nw));
    if (step % config.stride == 0 || step == nsteps)
      run.deflection.push_back(w);
  };

  if (model.system.constraint)
    run.trajectory = rk4_augmented(model.system, e0, dt, nsteps, options);
  else
    run.trajectory = rk4(model.system, e0, dt, nsteps, options);
  return run;
}

} // namespace phfem
