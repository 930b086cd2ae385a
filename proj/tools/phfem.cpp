#include "phfem/config.hpp"
#include "phfem/error.hpp"
#include "phfem/heat.hpp"
#include "phfem/mindlin.hpp"
#include "phfem/output.hpp"
#include "phfem/wave.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{

using namespace phfem;

struct Options
{
  std::string config;
  std::string out;
  bool check = false;
};

double max_relative(const HamiltonianTrace & trace)
{
  double m = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i)
    m = std::max(m, trace.scale[i] > 0.0 ? trace.residual[i] / trace.scale[i]
                                         : trace.residual[i]);
  return m;
}

class Writer
{
public:
  Writer(const RunConfig & cfg, const Mesh & mesh, std::string dir)
      : cfg_(cfg), mesh_(mesh), dir_(std::move(dir))
  {
    std::filesystem::create_directories(dir_);
  }

  void trace(const HamiltonianTrace & t) const { write_trace_csv(t, path("trace.csv")); }

  void snapshots(const std::vector<double> & times, const std::vector<Vector> & fields,
                 const std::string & name) const
  {
    std::ofstream index(path("snapshots.csv"), std::ios::binary);
    index << "index,t\n";
    for (std::size_t k = 0; k < fields.size(); ++k)
    {
      char stem[32];
      std::snprintf(stem, sizeof stem, "%s_%05zu", name.c_str(), k);
      if (cfg_.output.csv)
        write_snapshot(fields[k], mesh_, path(std::string(stem) + ".csv"), SnapshotFormat::CSV,
                       name);
      if (cfg_.output.vtk)
        write_snapshot(fields[k], mesh_, path(std::string(stem) + ".vtk"), SnapshotFormat::VTK,
                       name);
      index << k << ',' << format_double(times[k]) << '\n';
    }
    if (!index)
      throw Error("failed writing snapshot index");
  }

private:
  std::string path(const std::string & file) const
  {
    return (std::filesystem::path(dir_) / file).string();
  }

  const RunConfig & cfg_;
  const Mesh & mesh_;
  std::string dir_;
};

void print_summary(const HamiltonianTrace & t)
{
  std::printf("steps: %zu\n", t.size() > 0 ? t.size() - 1 : 0);
  if (t.size() == 0)
    return;
  std::printf("H(%.6g) = %.10g\nH(%.6g) = %.10g\n", t.t.front(), t.H.front(), t.t.back(),
              t.H.back());
  std::printf("max relative power residual: %.3e\n", max_relative(t));
}

bool print_structure(const StructureReport & r)
{
  std::printf("skew defect %.3e (|J|max %.3e)\n", r.skew_defect, r.J_max);
  std::printf("R symmetry defect %.3e, min Rayleigh(R) %.3e\n", r.symmetry_defect,
              r.min_rayleigh_R);
  std::printf("M symmetry defect %.3e, min Rayleigh(M) %.3e\n", r.M_symmetry_defect,
              r.min_rayleigh_M);
  std::printf("Dirac pairing defect %.3e (relative %.3e)\n", r.dirac_defect, r.dirac_relative);
  const bool ok = r.passes();
  std::printf("structure: %s\n", ok ? "PASS" : "FAIL");
  return ok;
}

bool check_step(const PHLinearSystem & sys, const Vector & e0, double t0)
{
  const PowerBalance p = power_residual(sys, e0, sys.inputs(t0));
  const double rel = p.scale > 0.0 ? p.residual / p.scale : p.residual;
  std::printf("initial power residual %.3e (relative %.3e)\n", p.residual, rel);
  return rel <= 1e-10;
}

int run_wave_cli(const RunConfig & cfg, const Options & opt)
{
  const MeshPtr mesh = build_mesh(cfg);
  const WaveConfig wc = make_wave_config(cfg, *mesh);
  const WaveModel model = build_wave_system(mesh, wc);
  if (opt.check)
  {
    const bool a = print_structure(validate_structure(model.system));
    const bool b = check_step(model.system, wave_initial_state(model, wc), wc.ti);
    return a && b ? 0 : 3;
  }
  const WaveRun run = run_wave(model, wc);
  const Writer w(cfg, *mesh, opt.out);
  w.trace(run.trajectory.trace);
  w.snapshots(run.trajectory.times, run.deflection, "deflection");
  print_summary(run.trajectory.trace);
  return 0;
}

int run_heat_cli(const RunConfig & cfg, const Options & opt)
{
  const MeshPtr mesh = build_mesh(cfg);
  const HeatConfig hc = make_heat_config(cfg, *mesh);
  const HeatOperators ops = build_heat_operators(mesh, hc);
  if (opt.check)
  {
    const bool a = print_structure(validate_structure(heat_dirac_system(ops)));
    const HeatState s = heat_stage(ops, hc.ti, heat_initial_alpha(ops, hc), ops.input(hc.ti));
    const HeatBalance b = heat_power_balance(s, ops);
    const double rel = b.scale > 0.0 ? b.residual / b.scale : b.residual;
    std::printf("initial first-law residual %.3e (relative %.3e)\n", b.residual, rel);
    return a && rel <= 1e-11 ? 0 : 3;
  }
  const HeatRun run = run_heat(ops, hc);
  const Writer w(cfg, *mesh, opt.out);
  w.trace(run.trace);
  w.snapshots(run.times, run.temperature, "temperature");
  print_summary(run.trace);
  return 0;
}

int run_mindlin_cli(const RunConfig & cfg, const Options & opt)
{
  const MeshPtr mesh = build_mesh(cfg);
  const MindlinConfig mc = make_mindlin_config(cfg, *mesh);
  const MindlinModel model = build_mindlin_system(mesh, mc);
  if (opt.check)
  {
    const bool a = print_structure(validate_structure(model.system));
    bool b = true;
    if (!model.system.constraint)
      b = check_step(model.system, mindlin_initial_state(model, mc), mc.ti);
    return a && b ? 0 : 3;
  }
  const MindlinRun run = run_mindlin(model, mc);
  const Writer w(cfg, *mesh, opt.out);
  w.trace(run.trajectory.trace);
  w.snapshots(run.trajectory.times, run.deflection, "deflection");
  print_summary(run.trajectory.trace);
  if (!run.trajectory.constraint_defect.empty())
  {
    double m = 0.0;
    for (double d : run.trajectory.constraint_defect)
      m = std::max(m, d);
    std::printf("max constraint defect: %.3e\n", m);
  }
  return 0;
}

int dispatch(ModelKind kind, Options opt)
{
  const RunConfig cfg = parse_config_file(opt.config, kind);
  if (opt.out.empty())
    opt.out = cfg.output.dir;
  switch (kind)
  {
  case ModelKind::Wave:
    return run_wave_cli(cfg, opt);
  case ModelKind::Heat:
    return run_heat_cli(cfg, opt);
  case ModelKind::Mindlin:
    return run_mindlin_cli(cfg, opt);
  }
  return 1;
}

} // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Port-Hamiltonian finite element simulations"};
  app.require_subcommand(1);
  Options opt;
  std::optional<ModelKind> kind;
  for (ModelKind k : {ModelKind::Wave, ModelKind::Heat, ModelKind::Mindlin})
  {
    const std::string name(to_string(k));
    CLI::App * sub = app.add_subcommand(name, "Run the " + name + " model");
    sub->add_option("--config", opt.config, "Configuration file")->required();
    sub->add_option("--out", opt.out, "Output directory (default: [output] dir)");
    sub->add_flag("--check", opt.check, "Validate the structure and the initial power balance only");
    sub->callback([&kind, k] { kind = k; });
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError & e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try
  {
    return dispatch(*kind, opt);
  }
  catch (const ConfigError & e)
  {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  catch (const ParseError & e)
  {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  catch (const MeshError & e)
  {
    std::fprintf(stderr, "mesh error: %s\n", e.what());
    return 2;
  }
  catch (const AssemblyError & e)
  {
    std::fprintf(stderr, "invalid coefficient: %s\n", e.what());
    return 2;
  }
  catch (const InvalidArgument & e)
  {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return 2;
  }
  catch (const NumericalFailure & e)
  {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  catch (const SolverError & e)
  {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  }
  catch (const std::exception & e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
