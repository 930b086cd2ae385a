#include "phfem/quadrature.hpp"

#include "phfem/error.hpp"

#include <cmath>
#include <string>

namespace phfem
{

namespace
{

void add_symmetric_orbit(QuadratureRule & rule, double a, double weight)
{
  // Orbit of the barycentric point (a, a, 1-2a).
  const double b = 1.0 - 2.0 * a;
  rule.points.emplace_back(a, a);
  rule.points.emplace_back(b, a);
  rule.points.emplace_back(a, b);
  for (int i = 0; i < 3; ++i)
    rule.weights.push_back(weight);
}

QuadratureRule triangle_rule(int degree)
{
  QuadratureRule rule{QuadratureKind::Triangle, degree, {}, {}};
  switch (degree)
  {
  case 1:
    rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    rule.weights.push_back(0.5);
    break;
  case 2:
    add_symmetric_orbit(rule, 1.0 / 6.0, 1.0 / 6.0);
    break;
  case 3:
  case 4:
    // Six-point Strang-Fix/Dunavant rule, exact to degree 4.
    add_symmetric_orbit(rule, 0.445948490915964886318329253883, 0.5 * 0.223381589678011465944827736007);
    add_symmetric_orbit(rule, 0.091576213509770743459571463402, 0.5 * 0.109951743655321867638505596660);
    break;
  default:
    throw InvalidArgument("unsupported triangle quadrature degree " + std::to_string(degree));
  }
  return rule;
}

QuadratureRule edge_rule(int degree)
{
  QuadratureRule rule{QuadratureKind::Edge, degree, {}, {}};
  auto add = [&rule](double s, double w) {
    rule.points.emplace_back(s, 0.0);
    rule.weights.push_back(w);
  };
  switch (degree)
  {
  case 1:
    add(0.5, 1.0);
    break;
  case 2:
  case 3:
  {
    const double d = 0.5 / std::sqrt(3.0);
    add(0.5 - d, 0.5);
    add(0.5 + d, 0.5);
    break;
  }
  case 4:
  case 5:
  {
    const double d = 0.5 * std::sqrt(0.6);
    add(0.5 - d, 5.0 / 18.0);
    add(0.5, 8.0 / 18.0);
    add(0.5 + d, 5.0 / 18.0);
    break;
  }
  default:
    throw InvalidArgument("unsupported edge quadrature degree " + std::to_string(degree));
  }
  return rule;
}

} // namespace

QuadratureRule quadrature(QuadratureKind kind, int degree)
{
  return kind == QuadratureKind::Triangle ? triangle_rule(degree) : edge_rule(degree);
}

} // namespace phfem
