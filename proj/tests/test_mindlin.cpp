#include "phfem/error.hpp"
#include "phfem/mindlin.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace phfem;
using phfem::test::dense;
using phfem::test::Random;

namespace
{

constexpr double xL = 2.0;
constexpr double yL = 1.0;
constexpr double pi = std::numbers::pi;

MeshPtr domain(int nx, int ny)
{
  return test::rectangle(nx, ny, xL, yL);
}

// Aluminium plate clamped on the left with an oscillating support and a
// sinusoidal shear load on the remaining sides.
MindlinConfig plate_config(double tf)
{
  MindlinConfig c;
  const double omega = 2.0 * pi / tf;
  c.shear.tm0 = [tf](double t) { return 1.0 - std::exp(-10.0 * t / tf); };
  c.shear.sp0 = [](const Point & x) { return 1e5 * std::sin(2.0 * pi / xL * x.x()); };
  c.dir_tm0 = [omega](double t) { return -0.01 * omega * std::sin(omega * t); };
  c.dir_tm0_dot = [omega](double t) { return -0.01 * omega * omega * std::cos(omega * t); };
  c.dir_sp0 = [](const Point &) { return 1.0; };
  c.ew_0 = [](const Point & x) { return x.x() * x.y(); };
  c.tf = tf;
  c.dt = 1e-6;
  c.stride = 10;
  return c;
}

// Clamped on the whole boundary with a bump vanishing there.
MindlinConfig clamped_config()
{
  MindlinConfig c;
  c.dir_tags = all_rectangle_tags();
  c.nor_tags = {};
  const auto bump = [](const Point & x) {
    return std::sin(pi * x.x() / xL) * std::sin(pi * x.y() / yL);
  };
  c.ew_0 = bump;
  c.eth1_0 = [bump](const Point & x) { return 0.5 * bump(x); };
  c.ekap12_0 = [](const Point & x) { return 1e3 * x.x(); };
  c.egam2_0 = [](const Point & x) { return 1e4 * x.y(); };
  c.tf = 1e-4;
  c.dt = 1e-6;
  c.stride = 10;
  return c;
}

Eigen::Matrix2d random_sym(Random & rng)
{
  const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0), d = rng.uniform(-1.0, 1.0);
  return (Eigen::Matrix2d() << a, b, b, d).finished();
}

} // namespace

TEST(MindlinMaterial, RigiditiesOfAluminiumPlate)
{
  const MindlinConfig c;
  EXPECT_NEAR(bending_rigidity(c), 7e7 / 10.92, 1e-8);
  EXPECT_NEAR(shear_rigidity(c), 70e9 * 0.1 * (5.0 / 6) / 2.6, 1e-5);
  const Eigen::Matrix2d di = bending_stiffness(Eigen::Matrix2d::Identity(), c.E, c.nu, c.b);
  EXPECT_NEAR(di(0, 0), 8.333333333333333e6, 1e-7);
  EXPECT_NEAR(di(1, 1), 8.333333333333333e6, 1e-7);
  EXPECT_EQ(di(0, 1), 0.0);
}

TEST(MindlinMaterial, TracelessTensorsScaleIsotropically)
{
  const MindlinConfig c;
  const double rigidity = bending_rigidity(c);
  Eigen::Matrix2d x;
  x << 1.5, -0.3, -0.3, -1.5;
  const Eigen::Matrix2d y = bending_stiffness(x, c.E, c.nu, c.b);
  EXPECT_LE((y - rigidity * (1.0 - c.nu) * x).cwiseAbs().maxCoeff(), 1e-15 * y.norm());
  EXPECT_LE((bending_compliance(y, c.E, c.nu, c.b) - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MindlinMaterial, ComplianceInvertsStiffness)
{
  Random rng(7001);
  for (int trial = 0; trial < 50; ++trial)
  {
    const double E = rng.uniform(1e9, 2e11), nu = rng.uniform(0.05, 0.45);
    const double b = rng.uniform(0.01, 0.5);
    const Eigen::Matrix2d x = random_sym(rng);
    const Eigen::Matrix2d back = bending_compliance(bending_stiffness(x, E, nu, b), E, nu, b);
    EXPECT_LE((back - x).norm(), 1e-13 * x.norm());
  }
}

TEST(MindlinMaterial, ComplianceOperatorMatchesContraction)
{
  Random rng(7002);
  const MindlinConfig c;
  const Eigen::Matrix3d k = bending_compliance_operator(c.E, c.nu, c.b);
  EXPECT_LE((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-13 * k.cwiseAbs().maxCoeff());
  for (int trial = 0; trial < 20; ++trial)
  {
    const Eigen::Matrix2d x = random_sym(rng), y = random_sym(rng);
    const double contraction = (x.array() * bending_compliance(y, c.E, c.nu, c.b).array()).sum();
    const Eigen::Vector3d xv(x(0, 0), x(0, 1), x(1, 1)), yv(y(0, 0), y(0, 1), y(1, 1));
    EXPECT_NEAR(xv.dot(k * yv), contraction, 1e-13 * std::abs(k(0, 0)) * x.norm() * y.norm());
    EXPECT_GT(xv.dot(k * xv), 0.0);
  }
}

TEST(MindlinConfig, ParameterValidation)
{
  MindlinConfig c;
  EXPECT_NO_THROW(validate(c));
  c.nu = 0.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = MindlinConfig{};
  c.b = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = MindlinConfig{};
  c.E = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = MindlinConfig{};
  c.nor_tags.insert(BoundaryTag::G1);
  EXPECT_THROW(validate(c), ConfigError);
  c = MindlinConfig{};
  c.nor_tags.erase(BoundaryTag::G4);
  EXPECT_THROW(build_mindlin_system(domain(2, 1), c), ConfigError);
}

TEST(MindlinSystem, PlateParametersAssembleValidly)
{
  const MindlinModel m = build_mindlin_system(domain(10, 5), plate_config(0.01));
  EXPECT_EQ(m.n_w(), 66);
  EXPECT_EQ(m.n_th(), 132);
  EXPECT_EQ(m.n_kap(), 300);
  EXPECT_EQ(m.n_gam(), 200);
  ASSERT_EQ(m.system.ports.size(), 2u);
  EXPECT_EQ(m.system.ports[0].name, "shear");
  EXPECT_EQ(m.system.ports[1].name, "moment");
  EXPECT_FALSE(static_cast<bool>(m.system.ports[1].u));
  ASSERT_TRUE(m.system.constraint.has_value());
  // Six left-side vertices, each with a deflection and two rotations.
  EXPECT_EQ(m.system.constraint->G.cols(), 18);
  const StructureReport r = validate_structure(m.system);
  EXPECT_LE(r.skew_defect, 1e-12 * r.J_max);
  EXPECT_GT(r.min_rayleigh_M, 0.0);
  EXPECT_LE(r.dirac_relative, 1e-12);
  EXPECT_TRUE(r.passes());
}

TEST(MindlinSystem, RigidTranslationIsInKernel)
{
  MindlinConfig c;
  c.dir_tags = {};
  c.nor_tags = all_rectangle_tags();
  const MindlinModel m = build_mindlin_system(domain(4, 2), c);
  EXPECT_FALSE(m.system.constraint.has_value());
  Vector e = Vector::Zero(m.system.dim());
  e.head(m.n_w()).setConstant(2.5);
  const Vector je = m.system.J * e;
  EXPECT_LE(je.segment(m.offset_kap(), m.n_kap()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE(je.segment(m.offset_gam(), m.n_gam()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MindlinSystem, SingleCellRotationShearCoupling)
{
  MindlinConfig c;
  c.dir_tags = {};
  c.nor_tags = all_rectangle_tags();
  const MindlinModel m = build_mindlin_system(test::reference_mesh(), c);
  const Eigen::MatrixXd j = dense(m.system.J);
  // gamma rows against theta columns: -int phi_gamma . phi_theta = -A/3.
  for (int comp = 0; comp < 2; ++comp)
    for (int v = 0; v < 3; ++v)
    {
      EXPECT_NEAR(j(m.offset_gam() + comp, m.offset_th() + 2 * v + comp), -1.0 / 6, 1e-15);
      EXPECT_EQ(j(m.offset_gam() + comp, m.offset_th() + 2 * v + 1 - comp), 0.0);
    }
}

TEST(MindlinSystem, MassBlocksArePhysical)
{
  const MindlinConfig c;
  const MindlinModel m = build_mindlin_system(domain(2, 1), c);
  const double area = xL * yL;
  // Sum of a CG1 mass is the weighted area.
  EXPECT_NEAR(dense(m.M_w).sum(), c.rho * c.b * area, 1e-9);
  const Eigen::MatrixXd mass = dense(m.system.M);
  const double i_theta = c.rho * c.b * c.b * c.b / 12.0;
  EXPECT_NEAR(mass.block(m.offset_th(), m.offset_th(), m.n_th(), m.n_th()).sum(), 2.0 * i_theta * area,
              1e-12);
  EXPECT_NEAR(mass.block(m.offset_gam(), m.offset_gam(), m.n_gam(), m.n_gam()).sum(),
              2.0 * area / shear_rigidity(c), 1e-22);
}

TEST(MindlinRun, ZeroDataStaysZero)
{
  MindlinConfig c = plate_config(1e-4);
  c.shear = {};
  c.dir_tm0 = nullptr;
  c.dir_tm0_dot = nullptr;
  c.ew_0 = nullptr;
  const MindlinModel m = build_mindlin_system(domain(3, 2), c);
  const MindlinRun run = run_mindlin(m, c);
  for (double h : run.trajectory.trace.H)
    EXPECT_EQ(h, 0.0);
  for (const Vector & s : run.trajectory.states)
    EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
  for (const Vector & w : run.deflection)
    EXPECT_EQ(w.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MindlinRun, ClampedPlateBalancesPower)
{
  const MindlinConfig c = clamped_config();
  const MindlinModel m = build_mindlin_system(domain(4, 2), c);
  EXPECT_TRUE(m.system.ports.empty());
  const MindlinRun run = run_mindlin(m, c);
  const Trajectory & tr = run.trajectory;
  ASSERT_EQ(tr.trace.size(), 101u);
  const double h0 = tr.trace.H.front();
  ASSERT_GT(h0, 0.0);
  for (std::size_t n = 0; n < tr.trace.size(); ++n)
  {
    EXPECT_LE(tr.trace.residual[n], 1e-10 * tr.trace.scale[n]) << "row " << n;
    EXPECT_LE(tr.constraint_defect[n], 1e-8 * tr.constraint_scale[n]) << "row " << n;
    EXPECT_NEAR(tr.trace.H[n], h0, 1e-6 * h0);
  }
}

TEST(MindlinRun, PlateConstraintAndBalance)
{
  const MindlinConfig c = plate_config(1e-3);
  const MindlinModel m = build_mindlin_system(domain(4, 2), c);
  MindlinConfig short_run = c;
  short_run.tf = 2e-4;
  const MindlinRun run = run_mindlin(m, short_run);
  const Trajectory & tr = run.trajectory;
  ASSERT_EQ(tr.trace.size(), 201u);
  ASSERT_EQ(tr.constraint_defect.size(), tr.trace.size());
  for (std::size_t n = 0; n < tr.trace.size(); ++n)
  {
    EXPECT_LE(tr.trace.residual[n], 1e-10 * tr.trace.scale[n]) << "row " << n;
    EXPECT_LE(tr.constraint_defect[n], 1e-8 * tr.constraint_scale[n]) << "row " << n;
  }
  EXPECT_EQ(run.deflection.size(), tr.times.size());
}

TEST(MindlinRun, IncompatibleInitialDataIsRejected)
{
  MindlinConfig c = plate_config(1e-4);
  c.ew_0 = [](const Point &) { return 1.0; };
  const MindlinModel m = build_mindlin_system(domain(3, 2), c);
  EXPECT_THROW(run_mindlin(m, c), NumericalFailure);
}

TEST(MindlinRun, UnstableStepIsDetected)
{
  MindlinConfig c = clamped_config();
  c.dt = 1e-3;
  c.tf = 1.0;
  const MindlinModel m = build_mindlin_system(domain(4, 2), c);
  EXPECT_THROW(run_mindlin(m, c), NumericalFailure);
}
