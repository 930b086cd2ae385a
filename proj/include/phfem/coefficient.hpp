#pragma once

#include "phfem/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>

namespace phfem
{

using ScalarFunction = std::function<double(const Point &)>;
using TensorFunction = std::function<Eigen::Matrix2d(const Point &)>;
using VectorFunction = std::function<Eigen::Vector2d(const Point &)>;
// Bilinear form on symmetric tensors in (11, 12, 22) basis coordinates,
// i.e. K(i, j) = Phi_i : C(Phi_j) for the DG0 symmetric-tensor basis.
using SymTensorOperatorFunction = std::function<Eigen::Matrix3d(const Point &)>;

/// Spatially varying material coefficient: a scalar, a symmetric 2x2 tensor,
/// or a linear operator on symmetric tensors.
class CoefficientField
{
public:
  enum class Kind
  {
    Scalar,
    Tensor,
    SymTensorOperator,
  };

  CoefficientField() : CoefficientField(1.0) {}
  CoefficientField(double value);

  static CoefficientField scalar(ScalarFunction f, std::string name = "coefficient");
  /// Symmetric tensor from its three independent entries.
  static CoefficientField tensor(ScalarFunction t11, ScalarFunction t12, ScalarFunction t22,
                                 std::string name = "tensor");
  static CoefficientField tensor(TensorFunction f, std::string name = "tensor");
  static CoefficientField sym_tensor_operator(SymTensorOperatorFunction f,
                                              std::string name = "operator");

  Kind kind() const { return kind_; }
  const std::string & name() const { return name_; }

  double scalar_at(const Point & x) const;
  /// Scalars are promoted to s*I.
  Eigen::Matrix2d tensor_at(const Point & x) const;
  /// Scalars are promoted to s*diag(1, 2, 1) (the contraction weight).
  Eigen::Matrix3d operator_at(const Point & x) const;

private:
  Kind kind_ = Kind::Scalar;
  std::string name_;
  ScalarFunction scalar_;
  TensorFunction tensor_;
  SymTensorOperatorFunction operator_;
};

/// Pointwise analytic inverse of a scalar or tensor field. Evaluation throws
/// AssemblyError naming the point if the value is not SPD (or not positive).
CoefficientField inverse(const CoefficientField & field);

/// Same field, but evaluation throws AssemblyError at points where it is not
/// positive (scalar) or not SPD (tensor).
CoefficientField require_spd(const CoefficientField & field);

bool is_spd(const Eigen::Matrix2d & t);

/// Contraction matrix of the map Y -> a Y - b tr(Y) I in (11, 12, 22) coordinates.
Eigen::Matrix3d isotropic_operator(double a, double b);

} // namespace phfem
