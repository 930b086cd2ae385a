#pragma once

#include "phfem/control.hpp"
#include "phfem/integrators.hpp"

namespace phfem
{

struct MindlinConfig
{
  double E = 70e9;       // Young modulus [Pa]
  double rho = 2700.0;   // density [kg/m^3]
  double nu = 0.3;       // Poisson ratio
  double k_sh = 5.0 / 6; // shear correction
  double b = 0.1;        // thickness [m]
  TagSet dir_tags = {BoundaryTag::G1};
  TagSet nor_tags = {BoundaryTag::G2, BoundaryTag::G3, BoundaryTag::G4};
  // Shear force q.n on the Neumann part; the moment M n is zero there.
  BoundaryControl shear;
  // Dirichlet velocity v_D = dir_tm0(t) dir_sp0(x) and its time derivative
  // dir_tm0_dot(t) dir_sp0(x); the rotation velocity is zero on the Dirichlet part.
  TimeFunction dir_tm0, dir_tm0_dot;
  ScalarFunction dir_sp0;
  // Initial co-energy variables.
  ScalarFunction ew_0, eth1_0, eth2_0, ekap11_0, ekap12_0, ekap22_0, egam1_0, egam2_0;
  double ti = 0.0;
  double tf = 0.01;
  double dt = 1e-6;
  int stride = 50;
};

/// Throws ConfigError on parameters out of range.
void validate(const MindlinConfig & config);

double shear_rigidity(const MindlinConfig & config);
/// E b^3 / (12 (1 - nu^2)).
double bending_rigidity(const MindlinConfig & config);

/// D_b(X) = c [(1 - nu) X + nu tr(X) I].
Eigen::Matrix2d bending_stiffness(const Eigen::Matrix2d & x, double E, double nu, double b);
/// D_b^{-1}(Y) = Y / (c (1 - nu)) - nu tr(Y) I / (c (1 - nu) (1 + nu)).
Eigen::Matrix2d bending_compliance(const Eigen::Matrix2d & y, double E, double nu, double b);
/// Contraction matrix of D_b^{-1} in (11, 12, 22) coordinates.
Eigen::Matrix3d bending_compliance_operator(double E, double nu, double b);

/// Assembled plate system; state layout [e_w (CG1), e_theta (CG1 vector),
/// E_kappa (DG0 sym tensor), e_gamma (DG0 vector)].
struct MindlinModel
{
  MeshPtr mesh;
  FESpace w_space;
  FESpace th_space;
  FESpace kap_space;
  FESpace gam_space;
  std::optional<FESpace> nor_w_space; // scalar boundary CG1 on the Neumann tags
  std::optional<FESpace> nor_th_space;
  std::optional<FESpace> dir_w_space; // scalar boundary CG1 on the Dirichlet tags
  std::optional<FESpace> dir_th_space;
  PHLinearSystem system;
  SparseMatrix M_w; // rho b weighted CG1 mass

  Index n_w() const { return w_space.n_dofs(); }
  Index n_th() const { return th_space.n_dofs(); }
  Index n_kap() const { return kap_space.n_dofs(); }
  Index n_gam() const { return gam_space.n_dofs(); }
  Index offset_th() const { return n_w(); }
  Index offset_kap() const { return n_w() + n_th(); }
  Index offset_gam() const { return n_w() + n_th() + n_kap(); }
};

/// Ports "shear" and "moment" on the Neumann tags, constraint block on the
/// Dirichlet tags. Throws ConfigError if the tag sets do not partition the
/// boundary.
MindlinModel build_mindlin_system(MeshPtr mesh, const MindlinConfig & config);

/// Nodal interpolation (CG1) and cell averages (DG0) of the initial fields.
Vector mindlin_initial_state(const MindlinModel & model, const MindlinConfig & config);

struct MindlinRun
{
  Trajectory trajectory;
  std::vector<Vector> deflection; // at the snapshot times
};

/// RK4 on the index-reduced system (plain RK4 without Dirichlet part); aborts
/// if the energy norm sqrt(e^T M e) grows by more than 1e6.
MindlinRun run_mindlin(const MindlinModel & model, const MindlinConfig & config);

} // namespace phfem
