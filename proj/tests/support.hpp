#pragma once

// Test-only oracles: a collapsed Gauss-Legendre rule (exact for polynomials of
// degree 8 on triangles, 9 on segments) and basis functions written out from
// their closed forms, independent of the library's element code.

#include "phfem/assembly.hpp"
#include "phfem/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>

namespace phfem::test
{

inline constexpr std::array<double, 5> gl_nodes = {
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> gl_weights = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};

/// int_0^1 f(s) ds, exact for degree <= 9.
inline double oracle_segment(const std::function<double(double)> & f)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < gl_nodes.size(); ++i)
    sum += 0.5 * gl_weights[i] * f(0.5 * (gl_nodes[i] + 1.0));
  return sum;
}

/// int over the triangle (a, b, c) of f, exact for degree <= 8 (Duffy map).
inline double oracle_triangle(const Point & a, const Point & b, const Point & c,
                              const std::function<double(const Point &)> & f)
{
  const double area2 = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  double sum = 0.0;
  for (std::size_t i = 0; i < gl_nodes.size(); ++i)
    for (std::size_t j = 0; j < gl_nodes.size(); ++j)
    {
      const double u = 0.5 * (gl_nodes[i] + 1.0);
      const double v = 0.5 * (gl_nodes[j] + 1.0);
      const double s = u;
      const double t = (1.0 - u) * v;
      const double w = 0.25 * gl_weights[i] * gl_weights[j] * (1.0 - u);
      sum += w * f(a + s * (b - a) + t * (c - a));
    }
  return sum * area2;
}

/// Barycentric coordinate of vertex k of the triangle p.
inline double barycentric(const std::array<Point, 3> & p, int k, const Point & x)
{
  const Point & a = p[(k + 1) % 3];
  const Point & b = p[(k + 2) % 3];
  auto cross = [](const Point & u, const Point & v) { return u.x() * v.y() - u.y() * v.x(); };
  return cross(b - a, x - a) / cross(b - a, p[k] - a);
}

inline Point barycentric_gradient(const std::array<Point, 3> & p, int k)
{
  const Point & a = p[(k + 1) % 3];
  const Point & b = p[(k + 2) % 3];
  const double den = (b - a).x() * (p[k] - a).y() - (b - a).y() * (p[k] - a).x();
  return Point(-(b - a).y(), (b - a).x()) / den;
}

/// Lowest-order Raviart-Thomas function of the edge opposite vertex k, with
/// unit normal component along the normal obtained by rotating the
/// lower-to-higher vertex tangent clockwise.
inline Point rt0_oracle(const std::array<Point, 3> & p, const std::array<Index, 3> & ids, int k,
                        const Point & x)
{
  const int i = (k + 1) % 3;
  const int j = (k + 2) % 3;
  const Point lo = ids[i] < ids[j] ? p[i] : p[j];
  const Point hi = ids[i] < ids[j] ? p[j] : p[i];
  const Point t = hi - lo;
  const Point n_global = Point(t.y(), -t.x()).normalized();
  const Point mid = 0.5 * (p[i] + p[j]);
  const double sign = n_global.dot(mid - p[k]) > 0.0 ? 1.0 : -1.0;
  const double len = t.norm();
  const double area =
      0.5 * std::abs((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
  return sign * len / (2.0 * area) * (x - p[k]);
}

inline double rt0_divergence_oracle(const std::array<Point, 3> & p,
                                    const std::array<Index, 3> & ids, int k)
{
  // div (x - p_k) = 2
  const Point e0 = rt0_oracle(p, ids, k, p[k] + Point(1.0, 0.0));
  const Point e1 = rt0_oracle(p, ids, k, p[k] + Point(0.0, 1.0));
  return e0.x() + e1.y();
}

/// Reference triangle (0,0), (1,0), (0,1) with the legs tagged G2 (bottom),
/// G1 (left) and the hypotenuse G3.
inline MeshPtr reference_mesh()
{
  return std::make_shared<const Mesh>(
      std::vector<Point>{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
      std::vector<Mesh::Triangle>{{0, 1, 2}},
      std::map<Mesh::EdgeKey, BoundaryTag>{
          {{0, 1}, BoundaryTag::G2}, {{1, 2}, BoundaryTag::G3}, {{0, 2}, BoundaryTag::G1}});
}

inline MeshPtr rectangle(int nx, int ny, double xL = 1.0, double yL = 1.0)
{
  return std::make_shared<const Mesh>(generate_rectangle(nx, ny, 0.0, xL, 0.0, yL));
}

inline std::array<Point, 3> cell_points(const Mesh & mesh, Index c)
{
  const auto & t = mesh.cell(c);
  return {mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])};
}

inline Eigen::MatrixXd dense(const SparseMatrix & a)
{
  return Eigen::MatrixXd(a);
}

/// Fixed-seed generator for property tests.
class Random
{
public:
  explicit Random(unsigned seed) : engine_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0)
  {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Vector vector(Index n, double lo = -1.0, double hi = 1.0)
  {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
      v(i) = uniform(lo, hi);
    return v;
  }

  /// Point of the reference triangle.
  Eigen::Vector2d reference_point()
  {
    double s = uniform(0.0, 1.0);
    double t = uniform(0.0, 1.0);
    if (s + t > 1.0)
    {
      s = 1.0 - s;
      t = 1.0 - t;
    }
    return {s, t};
  }

private:
  std::mt19937_64 engine_;
};

inline double max_abs(const Eigen::MatrixXd & a)
{
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

} // namespace phfem::test
