#include "phfem/coefficient.hpp"

#include "phfem/error.hpp"

#include <Eigen/LU>

#include <sstream>

namespace phfem
{

namespace
{

std::string where(const std::string & name, const Point & x)
{
  std::ostringstream ss;
  ss.precision(17);
  ss << name << " at (" << x.x() << ", " << x.y() << ")";
  return ss.str();
}

Eigen::Matrix3d contraction_weight()
{
  return Eigen::Vector3d(1.0, 2.0, 1.0).asDiagonal();
}

} // namespace

CoefficientField::CoefficientField(double value) : name_("constant")
{
  scalar_ = [value](const Point &) { return value; };
}

CoefficientField CoefficientField::scalar(ScalarFunction f, std::string name)
{
  CoefficientField c;
  c.kind_ = Kind::Scalar;
  c.name_ = std::move(name);
  c.scalar_ = std::move(f);
  return c;
}

CoefficientField CoefficientField::tensor(ScalarFunction t11, ScalarFunction t12,
                                          ScalarFunction t22, std::string name)
{
  return tensor(
      [t11 = std::move(t11), t12 = std::move(t12), t22 = std::move(t22)](const Point & x) {
        const double off = t12(x);
        Eigen::Matrix2d t;
        t << t11(x), off, off, t22(x);
        return t;
      },
      std::move(name));
}

CoefficientField CoefficientField::tensor(TensorFunction f, std::string name)
{
  CoefficientField c;
  c.kind_ = Kind::Tensor;
  c.name_ = std::move(name);
  c.scalar_ = nullptr;
  c.tensor_ = std::move(f);
  return c;
}

CoefficientField CoefficientField::sym_tensor_operator(SymTensorOperatorFunction f,
                                                       std::string name)
{
  CoefficientField c;
  c.kind_ = Kind::SymTensorOperator;
  c.name_ = std::move(name);
  c.scalar_ = nullptr;
  c.operator_ = std::move(f);
  return c;
}

double CoefficientField::scalar_at(const Point & x) const
{
  if (kind_ != Kind::Scalar)
    throw InvalidArgument("coefficient '" + name_ + "' is not scalar");
  return scalar_(x);
}

Eigen::Matrix2d CoefficientField::tensor_at(const Point & x) const
{
  switch (kind_)
  {
  case Kind::Scalar:
    return scalar_(x) * Eigen::Matrix2d::Identity();
  case Kind::Tensor:
    return tensor_(x);
  case Kind::SymTensorOperator:
    break;
  }
  throw InvalidArgument("coefficient '" + name_ + "' is not a 2x2 tensor");
}

Eigen::Matrix3d CoefficientField::operator_at(const Point & x) const
{
  switch (kind_)
  {
  case Kind::Scalar:
    return scalar_(x) * contraction_weight();
  case Kind::SymTensorOperator:
    return operator_(x);
  case Kind::Tensor:
    break;
  }
  throw InvalidArgument("coefficient '" + name_ + "' is not a symmetric-tensor operator");
}

bool is_spd(const Eigen::Matrix2d & t)
{
  return std::abs(t(0, 1) - t(1, 0)) <= 1e-13 * t.cwiseAbs().maxCoeff() && t(0, 0) > 0.0 &&
         t.determinant() > 0.0;
}

CoefficientField require_spd(const CoefficientField & field)
{
  switch (field.kind())
  {
  case CoefficientField::Kind::Scalar:
    return CoefficientField::scalar(
        [field](const Point & x) {
          const double v = field.scalar_at(x);
          if (!(v > 0.0))
            throw AssemblyError("non-positive " + where(field.name(), x));
          return v;
        },
        field.name());
  case CoefficientField::Kind::Tensor:
    return CoefficientField::tensor(
        [field](const Point & x) {
          const Eigen::Matrix2d t = field.tensor_at(x);
          if (!is_spd(t))
            throw AssemblyError("tensor not SPD: " + where(field.name(), x));
          return t;
        },
        field.name());
  case CoefficientField::Kind::SymTensorOperator:
    break;
  }
  return field;
}

CoefficientField inverse(const CoefficientField & field)
{
  const std::string name = field.name() + "^-1";
  switch (field.kind())
  {
  case CoefficientField::Kind::Scalar:
    return CoefficientField::scalar(
        [field](const Point & x) {
          const double v = field.scalar_at(x);
          if (!(v > 0.0))
            throw AssemblyError("non-positive " + where(field.name(), x));
          return 1.0 / v;
        },
        name);
  case CoefficientField::Kind::Tensor:
    return CoefficientField::tensor(
        [field](const Point & x) {
          const Eigen::Matrix2d t = field.tensor_at(x);
          if (!is_spd(t))
            throw AssemblyError("tensor not SPD: " + where(field.name(), x));
          const double det = t(0, 0) * t(1, 1) - t(0, 1) * t(0, 1);
          Eigen::Matrix2d inv;
          inv << t(1, 1) / det, -t(0, 1) / det, -t(0, 1) / det, t(0, 0) / det;
          return inv;
        },
        name);
  case CoefficientField::Kind::SymTensorOperator:
    break;
  }
  throw InvalidArgument("inverse of a symmetric-tensor operator is not supported");
}

Eigen::Matrix3d isotropic_operator(double a, double b)
{
  const Eigen::Vector3d trace(1.0, 0.0, 1.0);
  return a * contraction_weight() - b * trace * trace.transpose();
}

} // namespace phfem
