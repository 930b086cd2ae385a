#pragma once

#include "phfem/ph_system.hpp"

#include <functional>
#include <vector>

namespace phfem
{

/// Time series of the Hamiltonian and the power-balance terms. Row n belongs
/// to time t[n]; `scale` is the magnitude against which `residual` is judged.
struct HamiltonianTrace
{
  std::vector<double> t;
  std::vector<double> H;
  std::vector<double> supplied;
  std::vector<double> dissipated;
  std::vector<double> residual;
  std::vector<double> scale;

  void append(double time, double h, double p_supplied, double p_dissipated, double res,
              double res_scale);
  std::size_t size() const { return t.size(); }
};

struct Trajectory
{
  std::vector<double> times; // snapshot times
  std::vector<Vector> states;
  HamiltonianTrace trace;

  // Constrained runs only, one entry per trace row.
  std::vector<double> constraint_defect; // |G^T e - v(t)|_inf
  std::vector<double> constraint_scale;  // running max of max(|v(t)|_inf, ||G^T||_inf max_{i in G rows} |e_i|)
  std::vector<Vector> multipliers;       // lambda at the first stage of each step (and at t_end)

  const Vector & final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

using StepCallback =
    std::function<void(int step, double t_new, const Vector & e_old, const Vector & e_new)>;

struct IntegratorOptions
{
  double t0 = 0.0;
  int stride = 1;             // keep every stride-th state (the last state is always kept)
  double blowup_factor = 0.0; // > 0: abort when |e|_M exceeds factor * (first nonzero |e|_M)
  StepCallback on_step;
};

/// (M - dt/2 (J - R)) e+ = (M + dt/2 (J - R)) e + dt B u(t + dt/2).
/// Row n >= 1 of the trace carries the discrete balance of step n-1 -> n,
/// evaluated at the midpoint state with edot = (e+ - e)/dt.
Trajectory implicit_midpoint(const PHLinearSystem & sys, const Vector & e0, double dt,
                             int nsteps, const IntegratorOptions & options = {});

/// Classical RK4 on edot = M^{-1}((J - R) e + B u). Row n of the trace carries
/// the worst (relative) stage balance of the step leaving t_n; the final row
/// is evaluated at the final state.
Trajectory rk4(const PHLinearSystem & sys, const Vector & e0, double dt, int nsteps,
               const IntegratorOptions & options = {});

/// RK4 on the index-reduced constrained system: each stage solves
/// [[M, -G], [G^T, 0]] (k, lambda) = ((J - R) e + B u, vdot(t)).
Trajectory rk4_augmented(const PHLinearSystem & sys, const Vector & e0, double dt, int nsteps,
                         const IntegratorOptions & options = {});

/// Stage slope and multiplier of the constrained system at (t, e).
struct ConstrainedRate
{
  Vector k;
  Vector lambda;
};

/// Factorized saddle matrix of a constrained system.
class SaddleSolver
{
public:
  explicit SaddleSolver(const PHLinearSystem & sys);
  ConstrainedRate rate(const Vector & e, double t) const;

private:
  PHLinearSystem sys_;
  LinearSolver solver_;
};

} // namespace phfem
