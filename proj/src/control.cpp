#include "phfem/control.hpp"

#include "phfem/assembly.hpp"
#include "phfem/error.hpp"

#include <cmath>

namespace phfem
{

double BoundaryControl::operator()(double t, const Point & x) const
{
  double u = 0.0;
  if (tm0 && sp0)
    u += tm0(t) * sp0(x);
  if (tm1)
    u += tm1(t);
  if (sp1)
    u += sp1(x);
  return u;
}

Signal boundary_signal(const FESpace & bnd_space, const BoundaryControl & control)
{
  if (!control.active())
    return {};
  const Index m = bnd_space.n_dofs();
  const Vector sp0 = control.tm0 && control.sp0 ? interpolate_boundary(bnd_space, control.sp0)
                                                : Vector::Zero(m);
  const Vector sp1 = control.sp1 ? interpolate_boundary(bnd_space, control.sp1) : Vector::Zero(m);
  return [tm0 = control.tm0, tm1 = control.tm1, sp0, sp1](double t) {
    Vector u = sp1;
    if (tm0)
      u += tm0(t) * sp0;
    if (tm1)
      u.array() += tm1(t);
    return u;
  };
}

int step_count(double ti, double tf, double dt)
{
  if (!(dt > 0.0))
    throw InvalidArgument("dt must be positive");
  if (!(tf > ti))
    throw InvalidArgument("tf must be greater than ti");
  const double n = (tf - ti) / dt;
  const double r = std::round(n);
  if (std::abs(n - r) > 1e-9 * std::max(1.0, n))
    throw InvalidArgument("(tf - ti) / dt is not an integer");
  if (r > 2e9)
    throw InvalidArgument("too many time steps");
  return static_cast<int>(r);
}

} // namespace phfem
