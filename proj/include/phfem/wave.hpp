#pragma once

#include "phfem/control.hpp"
#include "phfem/integrators.hpp"

#include <optional>

namespace phfem
{

enum class WaveFormulation
{
  Grad, // Neumann-type control u = e_q.n, impedance on e_p traces
  Div,  // Dirichlet-type control u = e_p, impedance on e_q normal traces
};

enum class TimeScheme
{
  Midpoint,
  RK4,
};

struct WaveConfig
{
  CoefficientField rho = 1.0;
  CoefficientField T = 1.0; // scalar or symmetric tensor
  std::optional<CoefficientField> Z;
  std::optional<CoefficientField> eps;
  WaveFormulation formulation = WaveFormulation::Grad;
  BoundaryControl control;
  // Initial energy variables (alpha_p = rho e_p, alpha_q = T^{-1} e_q) and deflection.
  ScalarFunction ap_0, aq_0_1, aq_0_2, w_0;
  double ti = 0.0;
  double tf = 1.0;
  double dt = 1e-3;
  TimeScheme scheme = TimeScheme::Midpoint;
  int stride = 50;
};

/// Assembled wave system; state layout [e_p (CG1), e_q (RT0)].
struct WaveModel
{
  MeshPtr mesh;
  FESpace p_space;
  FESpace q_space;
  FESpace bnd_space;
  PHLinearSystem system;
  SparseMatrix M_rho;
  SparseMatrix M_T_inv;
  SparseMatrix D; // D_grad (grad) or D_div (div)

  Index n_p() const { return p_space.n_dofs(); }
  Index n_q() const { return q_space.n_dofs(); }
};

WaveModel build_wave_system(MeshPtr mesh, const WaveConfig & config);

/// Weighted L2 projections of the initial energy variables.
Vector wave_initial_state(const WaveModel & model, const WaveConfig & config);

struct WaveRun
{
  Trajectory trajectory;
  std::vector<Vector> deflection; // at the trajectory snapshot times
};

/// Integrates over [ti, tf]; the deflection is w += dt (e_p^n + e_p^{n+1}) / 2.
WaveRun run_wave(const WaveModel & model, const WaveConfig & config);

} // namespace phfem
