#pragma once

#include "phfem/coefficient.hpp"
#include "phfem/fe_space.hpp"
#include "phfem/ph_system.hpp"

#include <functional>

namespace phfem
{

using TimeFunction = std::function<double(double)>;

/// Boundary datum u(t, x) = tm0(t) sp0(x) + tm1(t) + sp1(x); empty parts are zero.
struct BoundaryControl
{
  TimeFunction tm0;
  ScalarFunction sp0;
  TimeFunction tm1;
  ScalarFunction sp1;

  bool active() const { return (tm0 && sp0) || tm1 || sp1; }
  double operator()(double t, const Point & x) const;
};

/// u(t) interpolated at the vertices of a scalar boundary space; the spatial
/// parts are sampled once. Returns an empty signal if the control is inactive.
Signal boundary_signal(const FESpace & bnd_space, const BoundaryControl & control);

/// Number of steps covering [ti, tf] with step dt; throws InvalidArgument
/// unless tf > ti, dt > 0 and (tf - ti)/dt is an integer up to 1e-9.
int step_count(double ti, double tf, double dt);

} // namespace phfem
