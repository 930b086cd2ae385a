#pragma once

#include "phfem/control.hpp"
#include "phfem/integrators.hpp"

namespace phfem
{

struct HeatConfig
{
  CoefficientField rho = 1.0;
  CoefficientField cv = 1.0;
  CoefficientField lambda = 1.0; // scalar or symmetric tensor
  BoundaryControl control;       // boundary temperature
  // Initial entropy density and temperature; eu_0 takes precedence.
  ScalarFunction au_0, eu_0;
  double ti = 0.0;
  double tf = 1.0;
  double dt = 1e-3;
  int stride = 50;
};

/// Operators of the internal-energy heat system. Spaces: e_s, f_sigma,
/// e_sigma in CG1; f_S, e_S in RT0; boundary temperature in boundary CG1.
struct HeatOperators
{
  MeshPtr mesh;
  FESpace s_space;
  FESpace S_space;
  FESpace bnd_space;
  SparseMatrix M_s;     // CG1 mass
  SparseMatrix M_rhoCv; // rho Cv weighted CG1 mass
  SparseMatrix M_S;     // RT0 mass
  SparseMatrix M_sigma; // CG1 mass
  SparseMatrix Lambda;  // lambda weighted RT0 mass
  SparseMatrix D;       // (i, m) = int phi_i (-div psi_m)
  SparseMatrix B0;      // (m, k) = -int (psi_m . n) psi_k ds
  SparseMatrix M_bnd;
  LinearSolver M_s_solver;
  LinearSolver M_rhoCv_solver;
  LinearSolver M_S_solver;
  LinearSolver M_bnd_solver;
  Signal u; // boundary temperature coefficients; empty: zero

  Index n_s() const { return s_space.n_dofs(); }
  Index n_S() const { return S_space.n_dofs(); }
  Vector input(double t) const;
};

/// Throws AssemblyError if rho, cv are not positive or lambda is not SPD.
HeatOperators build_heat_operators(MeshPtr mesh, const HeatConfig & config);

/// All flows and efforts at one time, derived from alpha_s and u.
struct HeatState
{
  double t = 0.0;
  Vector alpha_s;
  Vector e_s;
  Vector f_S;
  Vector e_S;
  Vector f_sigma;
  Vector e_sigma;
  Vector alpha_s_dot;
  Vector y_bnd;
  Vector u;
};

/// Linear Dirac structure linking flows (alpha_s_dot, f_S, f_sigma) and
/// efforts (e_s, e_S, e_sigma): M = blockdiag(M_s, M_S, M_sigma),
/// J = [[0, D, -M_sigma], [-D^T, 0, 0], [M_sigma, 0, 0]], R = 0 and one
/// boundary-temperature port with B = [0; B0; 0].
PHLinearSystem heat_dirac_system(const HeatOperators & ops);

/// Solves the constitutive relations and the Dirac structure for the given
/// energy variable. Throws NumericalFailure (with t) if the temperature is not
/// positive.
HeatState heat_stage(const HeatOperators & ops, double t, const Vector & alpha_s,
                     const Vector & u);

/// Forward Euler: alpha_s += dt alpha_s_dot, restaged at t + dt with u_next.
HeatState heat_step(const HeatState & state, const HeatOperators & ops, const Vector & u_next,
                    double dt);

struct HeatBalance
{
  double energy_rate = 0.0; // e_s^T M_s alpha_s_dot
  double supplied = 0.0;    // u^T M_bnd y
  double residual = 0.0;
  double scale = 0.0;
};

HeatBalance heat_power_balance(const HeatState & state, const HeatOperators & ops);

/// |e_s^T M_s alpha_s_dot - u^T M_bnd y|.
double heat_power_residual(const HeatState & state, const HeatOperators & ops);

/// 1/2 alpha_s^T M_s e_s.
double heat_hamiltonian(const HeatState & state, const HeatOperators & ops);

/// int rho Cv e_s.
double heat_internal_energy(const HeatState & state, const HeatOperators & ops);

/// Initial energy variable: alpha_s = M_s^{-1} M_rhoCv e_s with e_s the L2
/// projection of eu_0, otherwise the L2 projection of au_0.
Vector heat_initial_alpha(const HeatOperators & ops, const HeatConfig & config);

struct HeatRun
{
  std::vector<double> times; // snapshot times
  std::vector<Vector> temperature;
  HamiltonianTrace trace; // dissipated column holds 0
  std::vector<double> internal_energy;
};

HeatRun run_heat(const HeatOperators & ops, const HeatConfig & config);

} // namespace phfem
