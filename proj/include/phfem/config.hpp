#pragma once

#include "phfem/expression.hpp"
#include "phfem/heat.hpp"
#include "phfem/mesh.hpp"
#include "phfem/mindlin.hpp"
#include "phfem/wave.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace phfem
{

enum class ModelKind
{
  Wave,
  Heat,
  Mindlin,
};

std::string_view to_string(ModelKind kind);
/// Throws ConfigError for unknown names.
ModelKind model_from_string(std::string_view name);

struct ConfigEntry
{
  std::string value;
  std::size_t line = 0;
};

struct MeshSpec
{
  std::optional<std::string> file; // Gmsh file; otherwise a structured rectangle
  double x0 = 0.0, xL = 1.0, y0 = 0.0, yL = 1.0;
  int nx = 0, ny = 0;
  int refine = 0;
};

struct TimeSpec
{
  double ti = 0.0;
  double tf = 0.0;
  double dt = 0.0;
  std::string scheme = "midpoint"; // wave only: midpoint or rk4
};

struct OutputSpec
{
  int stride = 50;
  bool csv = true;
  bool vtk = false;
  std::string dir = "out";
};

/// Validated contents of a configuration file.
///
/// Line-oriented `key = value` text in sections [model], [mesh], [time] and
/// [output]; `#` starts a comment; values may be quoted.
struct RunConfig
{
  ModelKind model = ModelKind::Wave;
  std::map<std::string, ConfigEntry, std::less<>> model_keys;
  MeshSpec mesh;
  TimeSpec time;
  OutputSpec output;
  std::string base_dir; // directory relative mesh paths are resolved against

  bool has(std::string_view key) const { return model_keys.count(key) > 0; }
};

/// Throws ParseError (with line) for malformed lines, unknown or duplicate
/// keys, and ConfigError listing missing required keys. `model` fills in or
/// must agree with the [model] type key.
RunConfig parse_config(std::string_view text, std::optional<ModelKind> model = std::nullopt);
RunConfig parse_config_file(const std::string & path,
                            std::optional<ModelKind> model = std::nullopt);

MeshPtr build_mesh(const RunConfig & config);

/// Named constants available in expressions: xL, yL, x0, y0 (mesh bounding
/// box), ti, tf, dt.
Expression::Constants expression_constants(const RunConfig & config, const Mesh & mesh);

WaveConfig make_wave_config(const RunConfig & config, const Mesh & mesh);
HeatConfig make_heat_config(const RunConfig & config, const Mesh & mesh);
MindlinConfig make_mindlin_config(const RunConfig & config, const Mesh & mesh);

} // namespace phfem
