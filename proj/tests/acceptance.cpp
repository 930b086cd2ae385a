// Acceptance suite: one PASS/FAIL line per criterion. Usage: acceptance [N ...]
// runs the listed criteria (all when none are given); the exit status is
// nonzero if any of them fails.

#include "phfem/config.hpp"
#include "phfem/error.hpp"
#include "phfem/output.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace phfem;

namespace
{

constexpr double pi = std::numbers::pi;

// Collects the individual checks of one criterion.
class Report
{
public:
  void check(bool ok, const char * fmt, ...) __attribute__((format(printf, 3, 4)))
  {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    lines_.push_back(std::string(ok ? "  ok    " : "  FAIL  ") + buf);
    pass_ = pass_ && ok;
  }

  void note(const std::string & text) { lines_.push_back("  note  " + text); }

  bool passed() const { return pass_; }
  const std::vector<std::string> & lines() const { return lines_; }

private:
  bool pass_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(const char * f, double a)
{
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RunConfig load(const std::string & name, int nx, int ny, double tf, double dt)
{
  RunConfig cfg = parse_config_file(std::string(PHFEM_CONFIG_DIR) + "/" + name);
  cfg.mesh.nx = nx;
  cfg.mesh.ny = ny;
  cfg.time.tf = tf;
  cfg.time.dt = dt;
  cfg.output.stride = 1000000;
  return cfg;
}

double max_ratio(const std::vector<double> & num, const std::vector<double> & den)
{
  double worst = 0.0;
  for (std::size_t n = 0; n < num.size(); ++n)
    worst = std::max(worst, den[n] > 0.0 ? num[n] / den[n] : (num[n] > 0.0 ? INFINITY : 0.0));
  return worst;
}

double m_norm(const SparseMatrix & m, const Vector & v)
{
  return std::sqrt(v.dot(m * v));
}

void structure_checks(Report & r, const char * name, const PHLinearSystem & sys)
{
  const StructureReport s = validate_structure(sys);
  r.check(s.skew_defect <= 1e-12 * s.J_max, "%s: skew defect %.3e <= 1e-12 * |J|max (%.3e)", name,
          s.skew_defect, s.J_max);
  r.check(s.symmetry_defect <= 1e-12 * s.R_max && s.min_rayleigh_R >= -1e-12 * s.R_max,
          "%s: R symmetry defect %.3e, min Rayleigh %.3e (|R|max %.3e)", name, s.symmetry_defect,
          s.min_rayleigh_R, s.R_max);
  r.check(s.M_symmetry_defect <= 1e-12 * s.M_max && s.min_rayleigh_M > 0.0,
          "%s: M symmetry defect %.3e, min Rayleigh %.3e", name, s.M_symmetry_defect,
          s.min_rayleigh_M);
  r.check(s.dirac_relative <= 1e-12, "%s: Dirac pairing defect %.3e <= 1e-12 * scale", name,
          s.dirac_relative);
}

// 1. Structure of the three assembled systems on a 10 x 5 rectangle.
void structure(Report & r)
{
  {
    RunConfig cfg = load("wave.ini", 10, 5, 5.0, 1e-3);
    const MeshPtr mesh = build_mesh(cfg);
    WaveConfig wc = make_wave_config(cfg, *mesh);
    structure_checks(r, "wave (div)", build_wave_system(mesh, wc).system);
    wc.formulation = WaveFormulation::Grad;
    structure_checks(r, "wave (grad)", build_wave_system(mesh, wc).system);
  }
  {
    const RunConfig cfg = load("heat.ini", 10, 5, 5.0, 1e-3);
    const MeshPtr mesh = build_mesh(cfg);
    structure_checks(r, "heat", heat_dirac_system(build_heat_operators(mesh, make_heat_config(cfg, *mesh))));
  }
  {
    const RunConfig cfg = load("mindlin.ini", 10, 5, 0.01, 1e-6);
    const MeshPtr mesh = build_mesh(cfg);
    structure_checks(r, "mindlin",
                     build_mindlin_system(mesh, make_mindlin_config(cfg, *mesh)).system);
  }
}

// 2. Single-element golden values against closed-form / quadrature oracles.
void element_oracles(Report & r)
{
  const MeshPtr mesh = test::reference_mesh();
  const std::array<Point, 3> p = test::cell_points(*mesh, 0);
  const std::array<Index, 3> ids = mesh->cell(0);
  const auto lambda = [&](int k, const Point & x) { return test::barycentric(p, k, x); };
  const auto integrate = [&](const std::function<double(const Point &)> & f) {
    return test::oracle_triangle(p[0], p[1], p[2], f);
  };
  const FESpace cg1(mesh, Family::CG1Scalar);
  const FESpace rt0(mesh, Family::RT0);

  const auto record = [&r](const char * what, double worst) {
    r.check(worst <= 1e-12, "%s: max deviation %.3e <= 1e-12", what, worst);
  };

  // P1 mass.
  {
    const Eigen::MatrixXd m = test::dense(assemble_mass(cg1));
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
      {
        const double golden = i == j ? 1.0 / 12.0 : 1.0 / 24.0;
        const double oracle = integrate([&](const Point & x) { return lambda(i, x) * lambda(j, x); });
        worst = std::max({worst, std::abs(oracle - golden), std::abs(m(i, j) - golden)});
      }
    record("P1 mass 1/12, 1/24", worst);
  }
  // Divergence coupling.
  {
    const Eigen::MatrixXd d = test::dense(assemble_d_div(cg1, rt0));
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
    {
      const double div = test::rt0_divergence_oracle(p, ids, k);
      const double golden = (div > 0.0 ? 1.0 : -1.0) * (k == 0 ? std::sqrt(2.0) / 3.0 : 1.0 / 3.0);
      for (int i = 0; i < 3; ++i)
      {
        const double oracle = integrate([&](const Point & x) { return lambda(i, x) * div; });
        const Index e = mesh->cell_edges(0)[k];
        worst = std::max({worst, std::abs(oracle - golden), std::abs(d(i, e) - golden)});
      }
    }
    record("D_div +-sqrt(2)/3, +-1/3", worst);
  }
  // Rotation-shear coupling.
  {
    const Eigen::MatrixXd d =
        test::dense(assemble_d0(FESpace(mesh, Family::DG0Vector2), FESpace(mesh, Family::CG1Vector2)));
    double worst = 0.0;
    for (int v = 0; v < 3; ++v)
      for (int c = 0; c < 2; ++c)
        for (int g = 0; g < 2; ++g)
        {
          const double golden = g == c ? -1.0 / 6.0 : 0.0;
          const double oracle = g == c ? -integrate([&](const Point & x) { return lambda(v, x); }) : 0.0;
          worst = std::max({worst, std::abs(oracle - golden), std::abs(d(g, 2 * v + c) - golden)});
        }
    record("D_0 -1/6", worst);
  }
  // Dirichlet trace block on one boundary edge.
  {
    double worst = 0.0;
    for (double len : {1.0, 2.0, 0.3})
    {
      const MeshPtr rect = test::rectangle(1, 1, len, 1.0);
      const FESpace c(rect, Family::CG1Scalar);
      const FESpace bnd(rect, Family::BoundaryCG1Scalar, TagSet{BoundaryTag::G2});
      const Eigen::MatrixXd b =
          test::dense(assemble_boundary_coupling(c, bnd, CouplingKind::DirichletTrace));
      for (const BoundaryEdge & be : rect->boundary_edges())
      {
        if (be.tag != BoundaryTag::G2)
          continue;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
          {
            const double golden = i == j ? len / 3.0 : len / 6.0;
            const double oracle = len * test::oracle_segment([&](double s) {
                                    return (i == 0 ? 1.0 - s : s) * (j == 0 ? 1.0 - s : s);
                                  });
            const double value = b(be.vertices[i], bnd.boundary_dof(be.vertices[j]));
            worst = std::max({worst, std::abs(oracle - golden), std::abs(value - golden)});
          }
      }
    }
    record("boundary block L/3, L/6", worst);
  }
  // RT0 normal trace on the legs of the reference triangle.
  {
    const FESpace bnd(mesh, Family::BoundaryCG1Scalar, all_rectangle_tags());
    const Eigen::MatrixXd b = test::dense(assemble_boundary_coupling(rt0, bnd, CouplingKind::NormalTrace));
    const CellGeometry g = mesh->cell_geometry(0);
    double worst = 0.0;
    for (int k = 1; k < 3; ++k)
    {
      const Point a = p[(k + 1) % 3], c = p[(k + 2) % 3];
      const double len = (c - a).norm();
      for (int vloc : {(k + 1) % 3, (k + 2) % 3})
      {
        const double oracle = len * test::oracle_segment([&](double s) {
                                const Point x = a + s * (c - a);
                                return test::rt0_oracle(p, ids, k, x).dot(g.outward_normals[k]) *
                                       lambda(vloc, x);
                              });
        const double golden = (oracle > 0.0 ? 1.0 : -1.0) * 0.5;
        const double value = b(mesh->cell_edges(0)[k], bnd.boundary_dof(ids[vloc]));
        worst = std::max({worst, std::abs(oracle - golden), std::abs(value - golden)});
      }
    }
    record("RT0 normal trace 1/2", worst);
  }
}

WaveConfig lossless_wave(const RunConfig & cfg, const Mesh & mesh)
{
  WaveConfig c = make_wave_config(cfg, mesh);
  c.Z.reset();
  c.eps.reset();
  c.control = {};
  const double xL = cfg.mesh.xL;
  c.ap_0 = [xL](const Point & x) { return std::sin(pi * x.x() / xL) * x.y() + 1.0; };
  c.aq_0_1 = [](const Point & x) { return x.y() * (1.0 - x.y()); };
  c.aq_0_2 = [](const Point & x) { return 0.5 * x.x(); };
  return c;
}

// 3. Closed lossless wave conserves H under the implicit midpoint rule.
void wave_conservation(Report & r)
{
  const RunConfig cfg = load("wave.ini", 10, 5, 1.0, 1e-3);
  const MeshPtr mesh = build_mesh(cfg);
  for (WaveFormulation f : {WaveFormulation::Div, WaveFormulation::Grad})
  {
    WaveConfig c = lossless_wave(cfg, *mesh);
    c.formulation = f;
    const WaveModel m = build_wave_system(mesh, c);
    const WaveRun run = run_wave(m, c);
    const HamiltonianTrace & t = run.trajectory.trace;
    double drift = 0.0;
    for (double h : t.H)
      drift = std::max(drift, std::abs(h - t.H.front()) / t.H.front());
    r.check(t.size() == 1001 && drift <= 1e-10, "%s: %zu steps, max |H_n - H_0| / H_0 = %.3e <= 1e-10",
            f == WaveFormulation::Div ? "div" : "grad", t.size() - 1, drift);
  }
}

// 4. Discrete power balance of the damped controlled wave; damping alone
// makes H nonincreasing.
void wave_power_balance(Report & r)
{
  const RunConfig cfg = load("wave.ini", 10, 5, 5.0, 1e-3);
  const MeshPtr mesh = build_mesh(cfg);
  for (WaveFormulation f : {WaveFormulation::Div, WaveFormulation::Grad})
  {
    const char * name = f == WaveFormulation::Div ? "div" : "grad";
    WaveConfig c = make_wave_config(cfg, *mesh);
    c.formulation = f;
    const WaveModel m = build_wave_system(mesh, c);
    const HamiltonianTrace t = run_wave(m, c).trajectory.trace;
    r.check(t.size() == 5001 && max_ratio(t.residual, t.scale) <= 1e-10,
            "%s controlled: %zu rows, max residual / scale = %.3e <= 1e-10", name, t.size(),
            max_ratio(t.residual, t.scale));

    WaveConfig d = c;
    d.control = {};
    const WaveConfig init = lossless_wave(cfg, *mesh);
    d.ap_0 = init.ap_0;
    d.aq_0_1 = init.aq_0_1;
    d.aq_0_2 = init.aq_0_2;
    const HamiltonianTrace td = run_wave(build_wave_system(mesh, d), d).trajectory.trace;
    std::size_t increases = 0;
    for (std::size_t n = 1; n < td.size(); ++n)
      increases += td.H[n] > td.H[n - 1];
    r.check(increases == 0 && td.H.back() < td.H.front(),
            "%s damped, u = 0: %zu increases of H over %zu steps, H %.6e -> %.6e", name, increases,
            td.size() - 1, td.H.front(), td.H.back());
  }
}

struct HeatDrift
{
  double drift = 0.0;
  double residual = 0.0;
};

HeatDrift heat_drift(const HeatOperators & ops, HeatConfig c, double dt)
{
  c.dt = dt;
  const HeatRun run = run_heat(ops, c);
  const HamiltonianTrace & t = run.trace;
  const std::size_t start = static_cast<std::size_t>(std::llround(2.0 / dt)) + 1;
  const double h2 = t.H.at(start);
  return {std::abs(t.H.back() - h2) / h2, max_ratio(t.residual, t.scale)};
}

// 5. First law of the explicit heat scheme and H drift after t = 2.
void heat_first_law(Report & r)
{
  const RunConfig cfg = load("heat.ini", 8, 4, 5.0, 1e-4);
  const MeshPtr mesh = build_mesh(cfg);
  const HeatConfig c = make_heat_config(cfg, *mesh);
  const HeatOperators ops = build_heat_operators(mesh, c);

  const HeatDrift fine = heat_drift(ops, c, 1e-4);
  const HeatDrift coarse = heat_drift(ops, c, 2e-4);
  r.check(fine.residual <= 1e-11 && coarse.residual <= 1e-11,
          "per-step residual / scale = %.3e (dt = 1e-4), %.3e (dt = 2e-4) <= 1e-11", fine.residual,
          coarse.residual);
  r.check(fine.drift <= 1e-3, "|H(5) - H(2 + dt)| / H(2 + dt) = %.3e <= 1e-3 at dt = 1e-4",
          fine.drift);
  const double ratio = coarse.drift / fine.drift;
  r.check(std::abs(ratio - 2.0) <= 0.2, "drift ratio under dt halving %.3f = 2 +- 0.2", ratio);

  // Same run with the boundary temperature fully off after t = 2.
  HeatConfig off = c;
  off.control.sp1 = nullptr;
  off.control.tm1 = nullptr;
  const HeatOperators ops_off = build_heat_operators(mesh, off);
  const HeatDrift a = heat_drift(ops_off, off, 1e-4);
  const HeatDrift b = heat_drift(ops_off, off, 2e-4);
  r.note("boundary temperature off after t = 2: drift " + fmt("%.3e", a.drift) + " (dt = 1e-4), " +
         fmt("%.3e", b.drift) + " (dt = 2e-4), ratio " + fmt("%.3f", b.drift / a.drift));
}

// 6. Constraint drift and power balance of the plate; the Dirichlet forcing
// feeds energy into the plate.
void mindlin_constraints(Report & r)
{
  {
    const RunConfig cfg = load("mindlin.ini", 6, 3, 1e-3, 1e-6);
    const MeshPtr mesh = build_mesh(cfg);
    const MindlinConfig c = make_mindlin_config(cfg, *mesh);
    const Trajectory tr = run_mindlin(build_mindlin_system(mesh, c), c).trajectory;
    r.check(tr.constraint_defect.size() == 1001 &&
                max_ratio(tr.constraint_defect, tr.constraint_scale) <= 1e-8,
            "6 x 3, tf = 1e-3: %zu rows, max constraint defect / scale = %.3e <= 1e-8",
            tr.constraint_defect.size(), max_ratio(tr.constraint_defect, tr.constraint_scale));
    r.check(max_ratio(tr.trace.residual, tr.trace.scale) <= 1e-10,
            "6 x 3, tf = 1e-3: max stage residual / scale = %.3e <= 1e-10",
            max_ratio(tr.trace.residual, tr.trace.scale));
  }
  {
    const RunConfig cfg = load("mindlin.ini", 4, 2, 0.01, 1e-6);
    const MeshPtr mesh = build_mesh(cfg);
    const MindlinConfig c = make_mindlin_config(cfg, *mesh);
    const HamiltonianTrace t = run_mindlin(build_mindlin_system(mesh, c), c).trajectory.trace;
    r.check(t.H.back() > t.H.front(), "4 x 2, tf = 0.01: H(0) = %.6e < H(tf) = %.6e", t.H.front(),
            t.H.back());
  }
}

// Errors at dt, dt/2 against a reference at dt/64; returns e(dt) / e(dt/2).
double order_ratio(const std::function<Vector(double)> & final_state, const SparseMatrix & m,
                   double dt, double & e1, double & e2)
{
  const Vector ref = final_state(dt / 64.0);
  e1 = m_norm(m, final_state(dt) - ref);
  e2 = m_norm(m, final_state(dt / 2.0) - ref);
  return e1 / e2;
}

// 7. Convergence orders of the implicit midpoint and RK4 integrators.
void integrator_orders(Report & r)
{
  {
    const RunConfig cfg = load("wave.ini", 4, 2, 1.0, 1e-2);
    const MeshPtr mesh = build_mesh(cfg);
    const WaveConfig c = make_wave_config(cfg, *mesh);
    const WaveModel m = build_wave_system(mesh, c);
    const auto final_state = [&](double dt) {
      WaveConfig run = c;
      run.dt = dt;
      run.stride = 1000000;
      return run_wave(m, run).trajectory.final_state();
    };
    double e1 = 0.0, e2 = 0.0;
    const double ratio = order_ratio(final_state, m.system.M, 1e-2, e1, e2);
    r.check(std::abs(ratio - 4.0) <= 0.5,
            "midpoint, wave: errors %.3e, %.3e, ratio %.3f = 4 +- 0.5", e1, e2, ratio);
  }
  {
    const RunConfig cfg = load("mindlin.ini", 4, 2, 1e-3, 4e-6);
    const MeshPtr mesh = build_mesh(cfg);
    const MindlinConfig c = make_mindlin_config(cfg, *mesh);
    const MindlinModel m = build_mindlin_system(mesh, c);
    const auto final_state = [&](double dt) {
      MindlinConfig run = c;
      run.dt = dt;
      run.tf = 2e-4;
      run.stride = 1000000;
      return run_mindlin(m, run).trajectory.final_state();
    };
    double e1 = 0.0, e2 = 0.0;
    const double ratio = order_ratio(final_state, m.system.M, 4e-6, e1, e2);
    r.check(std::abs(ratio - 16.0) <= 3.0,
            "RK4, index-reduced plate: errors %.3e, %.3e, ratio %.3f = 16 +- 3", e1, e2, ratio);
  }
}

std::string csv_outputs(const HamiltonianTrace & trace, const std::vector<Vector> & snapshots,
                        const Mesh & mesh)
{
  std::ostringstream out;
  write_trace_csv(trace, out);
  for (const Vector & s : snapshots)
    write_snapshot(s, mesh, out, SnapshotFormat::CSV);
  return out.str();
}

// 8. Repeated runs of each shipped configuration give byte-identical CSV.
void determinism(Report & r)
{
  const auto compare = [&r](const char * name, const std::function<std::string()> & run) {
    const std::string a = run();
    const std::string b = run();
    r.check(!a.empty() && a == b, "%s: %zu bytes, identical: %s", name, a.size(),
            a == b ? "yes" : "no");
  };
  compare("wave", [] {
    RunConfig cfg = load("wave.ini", 10, 5, 0.5, 1e-3);
    cfg.output.stride = 50;
    const MeshPtr mesh = build_mesh(cfg);
    const WaveConfig c = make_wave_config(cfg, *mesh);
    const WaveRun run = run_wave(build_wave_system(mesh, c), c);
    return csv_outputs(run.trajectory.trace, run.deflection, *mesh);
  });
  compare("heat", [] {
    RunConfig cfg = load("heat.ini", 10, 5, 0.5, 1e-3);
    cfg.output.stride = 50;
    const MeshPtr mesh = build_mesh(cfg);
    const HeatConfig c = make_heat_config(cfg, *mesh);
    const HeatRun run = run_heat(build_heat_operators(mesh, c), c);
    return csv_outputs(run.trace, run.temperature, *mesh);
  });
  compare("mindlin", [] {
    RunConfig cfg = load("mindlin.ini", 10, 5, 2e-4, 1e-6);
    cfg.output.stride = 50;
    const MeshPtr mesh = build_mesh(cfg);
    const MindlinConfig c = make_mindlin_config(cfg, *mesh);
    const MindlinRun run = run_mindlin(build_mindlin_system(mesh, c), c);
    return csv_outputs(run.trajectory.trace, run.deflection, *mesh);
  });
}

struct Criterion
{
  const char * name;
  void (*run)(Report &);
};

const std::vector<Criterion> criteria = {
    {"structure validation", structure},
    {"element oracles", element_oracles},
    {"wave conservation", wave_conservation},
    {"wave power balance", wave_power_balance},
    {"heat first law", heat_first_law},
    {"plate constraints and balance", mindlin_constraints},
    {"integrator orders", integrator_orders},
    {"determinism", determinism},
};

} // namespace

int main(int argc, char ** argv)
{
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i)
  {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size()))
    {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(k));
  }
  if (selected.empty())
    for (std::size_t k = 1; k <= criteria.size(); ++k)
      selected.push_back(k);

  int failures = 0;
  for (std::size_t k : selected)
  {
    const Criterion & c = criteria[k - 1];
    Report r;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      c.run(r);
    }
    catch (const std::exception & e)
    {
      r.check(false, "exception: %s", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu (%s): %s [%.1f s]\n", k, c.name, r.passed() ? "PASS" : "FAIL", secs);
    for (const std::string & line : r.lines())
      std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    failures += !r.passed();
  }
  return failures == 0 ? 0 : 1;
}
