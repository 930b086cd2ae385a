#pragma once

#include <Eigen/Core>

#include <vector>

namespace phfem
{

enum class QuadratureKind
{
  Triangle,
  Edge,
};

/// Rule on the reference triangle {(s,t): s,t >= 0, s+t <= 1} (weights sum
/// to 1/2) or on the unit interval [0,1] (weights sum to 1). Edge points use
/// only the first coordinate.
struct QuadratureRule
{
  QuadratureKind kind;
  int degree;
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Positive-weight rules: triangle degrees 1..4, edge degrees 1..5.
QuadratureRule quadrature(QuadratureKind kind, int degree);

/// Degrees used by every assembly routine.
inline constexpr int triangle_quadrature_degree = 4;
inline constexpr int edge_quadrature_degree = 3;

} // namespace phfem
