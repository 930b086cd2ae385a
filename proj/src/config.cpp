#include "phfem/config.hpp"

#include "phfem/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace phfem
{

std::string_view to_string(ModelKind kind)
{
  switch (kind)
  {
  case ModelKind::Wave:
    return "wave";
  case ModelKind::Heat:
    return "heat";
  case ModelKind::Mindlin:
    return "mindlin";
  }
  return "unknown";
}

ModelKind model_from_string(std::string_view name)
{
  if (name == "wave")
    return ModelKind::Wave;
  if (name == "heat")
    return ModelKind::Heat;
  if (name == "mindlin")
    return ModelKind::Mindlin;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected wave, heat or mindlin)");
}

namespace
{

struct KeySpec
{
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const KeySpec & model_keys(ModelKind kind)
{
  static const KeySpec wave{{"rho", "T11", "T12", "T22"},
                            {"Z", "eps", "formulation", "ub_tm0", "ub_sp0", "ub_tm1", "ub_sp1",
                             "ap_0", "aq_0_1", "aq_0_2", "w_0"}};
  static const KeySpec heat{{"rho", "cv", "lambda11", "lambda12", "lambda22"},
                            {"au_0", "eu_0", "ub_tm0", "ub_sp0", "ub_tm1", "ub_sp1"}};
  static const KeySpec mindlin{
      {"E", "rho", "nu", "k_sh", "thickness"},
      {"dir_tags", "nor_tags", "ub_nor_tm0", "ub_nor_sp0", "ub_nor_tm1", "ub_nor_sp1",
       "ub_dir_tm0", "ub_dir_sp0", "ub_dir_tm0_dir", "ew_0", "eth1_0", "eth2_0", "ekap11_0",
       "ekap12_0", "ekap22_0", "egam1_0", "egam2_0"}};
  switch (kind)
  {
  case ModelKind::Wave:
    return wave;
  case ModelKind::Heat:
    return heat;
  case ModelKind::Mindlin:
    return mindlin;
  }
  return wave;
}

const std::map<std::string, std::set<std::string>, std::less<>> & section_keys()
{
  static const std::map<std::string, std::set<std::string>, std::less<>> keys = {
      {"mesh", {"file", "x0", "xL", "y0", "yL", "nx", "ny", "refine"}},
      {"time", {"ti", "tf", "dt", "scheme"}},
      {"output", {"stride", "formats", "dir"}},
  };
  return keys;
}

std::string trim(std::string_view s)
{
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  return std::string(s.substr(a, b - a));
}

// Removes a trailing comment outside quotes.
std::string strip_comment(std::string_view line)
{
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i)
  {
    const char c = line[i];
    if (quote)
    {
      if (c == quote)
        quote = 0;
    }
    else if (c == '\'' || c == '"')
      quote = c;
    else if (c == '#')
      return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::string unquote(const std::string & v, std::size_t line)
{
  if (!v.empty() && (v.front() == '\'' || v.front() == '"'))
  {
    if (v.size() < 2 || v.back() != v.front())
      throw ParseError(line, "unterminated quoted value");
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double constant_value(const ConfigEntry & e, const std::string & key)
{
  const Expression ex = Expression::parse(e.value, {}, e.line);
  if (!ex.is_constant())
    throw ParseError(e.line, "'" + key + "' must be a constant");
  const double v = ex(0.0, 0.0, 0.0);
  if (!std::isfinite(v))
    throw ParseError(e.line, "'" + key + "' is not finite");
  return v;
}

int integer_value(const ConfigEntry & e, const std::string & key)
{
  const double v = constant_value(e, key);
  if (v != std::round(v) || std::abs(v) > 1e9)
    throw ParseError(e.line, "'" + key + "' must be an integer");
  return static_cast<int>(v);
}

using Table = std::map<std::string, ConfigEntry, std::less<>>;

void apply_mesh(MeshSpec & m, const Table & t)
{
  for (const auto & [k, e] : t)
  {
    if (k == "file")
      m.file = e.value;
    else if (k == "x0")
      m.x0 = constant_value(e, k);
    else if (k == "xL")
      m.xL = constant_value(e, k);
    else if (k == "y0")
      m.y0 = constant_value(e, k);
    else if (k == "yL")
      m.yL = constant_value(e, k);
    else if (k == "nx")
      m.nx = integer_value(e, k);
    else if (k == "ny")
      m.ny = integer_value(e, k);
    else if (k == "refine")
      m.refine = integer_value(e, k);
  }
  if (m.refine < 0)
    throw ParseError(t.at("refine").line, "'refine' must be non-negative");
  if (!m.file)
  {
    if (t.count("nx") && m.nx < 1)
      throw ParseError(t.at("nx").line, "'nx' must be positive");
    if (t.count("ny") && m.ny < 1)
      throw ParseError(t.at("ny").line, "'ny' must be positive");
  }
}

void apply_time(TimeSpec & s, const Table & t)
{
  for (const auto & [k, e] : t)
  {
    if (k == "ti")
      s.ti = constant_value(e, k);
    else if (k == "tf")
      s.tf = constant_value(e, k);
    else if (k == "dt")
      s.dt = constant_value(e, k);
    else if (k == "scheme")
    {
      if (e.value != "midpoint" && e.value != "rk4")
        throw ParseError(e.line, "scheme must be midpoint or rk4");
      s.scheme = e.value;
    }
  }
  if (t.count("dt") && !(s.dt > 0.0))
    throw ParseError(t.at("dt").line, "'dt' must be positive");
  if (t.count("tf") && !(s.tf > s.ti))
    throw ParseError(t.at("tf").line, "'tf' must be greater than 'ti'");
}

void apply_output(OutputSpec & o, const Table & t)
{
  for (const auto & [k, e] : t)
  {
    if (k == "stride")
    {
      o.stride = integer_value(e, k);
      if (o.stride < 1)
        throw ParseError(e.line, "'stride' must be positive");
    }
    else if (k == "dir")
      o.dir = e.value;
    else if (k == "formats")
    {
      o.csv = o.vtk = false;
      std::string item;
      std::istringstream ss(e.value);
      while (std::getline(ss, item, ','))
      {
        const std::string f = trim(item);
        if (f == "csv")
          o.csv = true;
        else if (f == "vtk")
          o.vtk = true;
        else
          throw ParseError(e.line, "unknown output format '" + f + "' (expected csv, vtk)");
      }
      if (!o.csv && !o.vtk)
        throw ParseError(e.line, "no output format given");
    }
  }
}

} // namespace

RunConfig parse_config(std::string_view text, std::optional<ModelKind> model)
{
  std::map<std::string, Table, std::less<>> sections;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw))
  {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r')
      raw.pop_back();
    const std::string line = trim(strip_comment(raw));
    if (line.empty())
      continue;
    if (line.front() == '[')
    {
      if (line.back() != ']')
        throw ParseError(line_no, "malformed section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "model" && !section_keys().count(section))
        throw ParseError(line_no, "unknown section [" + section + "]");
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(line).substr(eq + 1)), line_no);
    if (key.empty())
      throw ParseError(line_no, "empty key");
    if (section.empty())
      throw ParseError(line_no, "key '" + key + "' outside of any section");
    if (section != "model" && !section_keys().at(section).count(key))
      throw ParseError(line_no, "unknown key '" + key + "' in [" + section + "]");
    Table & table = sections[section];
    if (const auto it = table.find(key); it != table.end())
      throw ParseError(line_no, "duplicate key '" + key + "' in [" + section + "] (lines " +
                                    std::to_string(it->second.line) + " and " +
                                    std::to_string(line_no) + ")");
    table.emplace(key, ConfigEntry{value, line_no});
  }

  RunConfig cfg;
  Table model_table = sections["model"];
  if (const auto it = model_table.find("type"); it != model_table.end())
  {
    ModelKind declared;
    try
    {
      declared = model_from_string(it->second.value);
    }
    catch (const ConfigError & err)
    {
      throw ParseError(it->second.line, err.what());
    }
    if (model && *model != declared)
      throw ParseError(it->second.line, "config declares model '" + it->second.value +
                                            "' but '" + std::string(to_string(*model)) +
                                            "' was requested");
    model = declared;
    model_table.erase(it);
  }
  if (!model)
    throw ConfigError("missing required key: [model] type");
  cfg.model = *model;

  const KeySpec & allowed = model_keys(cfg.model);
  for (const auto & [k, e] : model_table)
    if (std::find(allowed.required.begin(), allowed.required.end(), k) == allowed.required.end() &&
        std::find(allowed.optional.begin(), allowed.optional.end(), k) == allowed.optional.end())
      throw ParseError(e.line, "unknown key '" + k + "' for model " +
                                   std::string(to_string(cfg.model)));
  cfg.model_keys = model_table;

  std::vector<std::string> missing;
  for (const auto & k : allowed.required)
    if (!model_table.count(k))
      missing.push_back("[model] " + k);
  if (cfg.model == ModelKind::Heat && !model_table.count("au_0") && !model_table.count("eu_0"))
    missing.push_back("[model] eu_0 or au_0");
  const Table & mesh = sections["mesh"];
  if (!mesh.count("file"))
    for (const char * k : {"nx", "ny"})
      if (!mesh.count(k))
        missing.push_back(std::string("[mesh] ") + k);
  for (const char * k : {"tf", "dt"})
    if (!sections["time"].count(k))
      missing.push_back(std::string("[time] ") + k);
  if (!missing.empty())
  {
    std::string msg = missing.size() == 1 ? "missing required key: " : "missing required keys: ";
    for (std::size_t i = 0; i < missing.size(); ++i)
      msg += (i ? ", " : "") + missing[i];
    throw ConfigError(msg);
  }

  apply_mesh(cfg.mesh, mesh);
  apply_time(cfg.time, sections["time"]);
  apply_output(cfg.output, sections["output"]);
  if (cfg.time.scheme != "midpoint" && cfg.model != ModelKind::Wave)
    throw ParseError(sections["time"].at("scheme").line, "'scheme' applies to the wave model only");
  return cfg;
}

RunConfig parse_config_file(const std::string & path, std::optional<ModelKind> model)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config(ss.str(), model);
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

MeshPtr build_mesh(const RunConfig & config)
{
  const MeshSpec & m = config.mesh;
  Mesh base = [&] {
    if (m.file)
    {
      std::filesystem::path p(*m.file);
      if (p.is_relative() && !config.base_dir.empty())
        p = std::filesystem::path(config.base_dir) / p;
      return read_msh_file(p.string());
    }
    if (!(m.xL > m.x0) || !(m.yL > m.y0))
      throw ConfigError("mesh rectangle must have xL > x0 and yL > y0");
    return generate_rectangle(m.nx, m.ny, m.x0, m.xL, m.y0, m.yL);
  }();
  if (m.refine > 0)
    base = refine_uniform(base, m.refine);
  return std::make_shared<const Mesh>(std::move(base));
}

Expression::Constants expression_constants(const RunConfig & config, const Mesh & mesh)
{
  Eigen::Vector2d lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const Point & p : mesh.vertices())
  {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return {{"x0", lo.x()},
          {"xL", hi.x()},
          {"y0", lo.y()},
          {"yL", hi.y()},
          {"ti", config.time.ti},
          {"tf", config.time.tf},
          {"dt", config.time.dt}};
}

namespace
{

class Builder
{
public:
  Builder(const RunConfig & cfg, const Mesh & mesh)
      : cfg_(cfg), constants_(expression_constants(cfg, mesh))
  {
  }

  const ConfigEntry * find(std::string_view key) const
  {
    const auto it = cfg_.model_keys.find(key);
    return it == cfg_.model_keys.end() ? nullptr : &it->second;
  }

  Expression expression(std::string_view key) const
  {
    const ConfigEntry & e = *find(key);
    return Expression::parse(e.value, constants_, e.line);
  }

  ScalarFunction spatial(std::string_view key) const
  {
    if (!find(key))
      return {};
    const Expression ex = expression(key);
    if (ex.uses_t())
      throw ParseError(find(key)->line, "'" + std::string(key) + "' must not depend on t");
    return [ex](const Point & p) { return ex(p.x(), p.y(), 0.0); };
  }

  TimeFunction temporal(std::string_view key) const
  {
    if (!find(key))
      return {};
    const Expression ex = expression(key);
    if (ex.uses_x() || ex.uses_y())
      throw ParseError(find(key)->line, "'" + std::string(key) + "' must depend on t only");
    return [ex](double t) { return ex(0.0, 0.0, t); };
  }

  double number(std::string_view key) const
  {
    const Expression ex = expression(key);
    if (!ex.is_constant())
      throw ParseError(find(key)->line, "'" + std::string(key) + "' must be a constant");
    return ex(0.0, 0.0, 0.0);
  }

  CoefficientField coefficient(std::string_view key) const
  {
    const Expression ex = expression(key);
    if (ex.uses_t())
      throw ParseError(find(key)->line, "'" + std::string(key) + "' must not depend on t");
    if (ex.is_constant())
      return ex(0.0, 0.0, 0.0);
    return CoefficientField::scalar([ex](const Point & p) { return ex(p.x(), p.y(), 0.0); },
                                    std::string(key));
  }

  CoefficientField tensor(std::string_view k11, std::string_view k12, std::string_view k22,
                          const std::string & name) const
  {
    const Expression a = expression(k11), b = expression(k12), c = expression(k22);
    for (auto [ex, key] : {std::pair{&a, k11}, {&b, k12}, {&c, k22}})
      if (ex->uses_t())
        throw ParseError(find(key)->line, "'" + std::string(key) + "' must not depend on t");
    if (a.is_constant() && b.is_constant() && c.is_constant() && b(0, 0, 0) == 0.0 &&
        a(0, 0, 0) == c(0, 0, 0))
      return a(0, 0, 0);
    auto f = [](const Expression & ex) {
      return [ex](const Point & p) { return ex(p.x(), p.y(), 0.0); };
    };
    return CoefficientField::tensor(f(a), f(b), f(c), name);
  }

  BoundaryControl control(const std::string & prefix) const
  {
    BoundaryControl c;
    c.tm0 = temporal(prefix + "tm0");
    c.sp0 = spatial(prefix + "sp0");
    c.tm1 = temporal(prefix + "tm1");
    c.sp1 = spatial(prefix + "sp1");
    if (static_cast<bool>(c.tm0) != static_cast<bool>(c.sp0))
    {
      const ConfigEntry * e = find(prefix + (c.tm0 ? "tm0" : "sp0"));
      throw ParseError(e->line, "'" + prefix + "tm0' and '" + prefix + "sp0' must be given together");
    }
    return c;
  }

  // gaussian(ampl = ..., sX = ..., sY = ..., X0 = ..., Y0 = ..., offset = ...)
  ScalarFunction gaussian_or_spatial(std::string_view key) const
  {
    const ConfigEntry * e = find(key);
    if (!e)
      return {};
    const std::string v = trim(e->value);
    if (v.rfind("gaussian", 0) != 0)
      return spatial(key);
    const std::string body = trim(std::string_view(v).substr(8));
    if (body.size() < 2 || body.front() != '(' || body.back() != ')')
      throw ParseError(e->line, "expected gaussian(ampl = ..., sX = ..., sY = ..., X0 = ..., "
                                "Y0 = ..., offset = ...)");
    std::map<std::string, double> args;
    int depth = 0;
    std::string item;
    auto flush = [&] {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ParseError(e->line, "gaussian argument '" + trim(item) + "' needs name = value");
      const std::string name = trim(std::string_view(item).substr(0, eq));
      const Expression ex = Expression::parse(trim(std::string_view(item).substr(eq + 1)),
                                              constants_, e->line);
      if (!ex.is_constant())
        throw ParseError(e->line, "gaussian argument '" + name + "' must be a constant");
      if (!args.emplace(name, ex(0, 0, 0)).second)
        throw ParseError(e->line, "duplicate gaussian argument '" + name + "'");
      item.clear();
    };
    for (char c : std::string_view(body).substr(1, body.size() - 2))
    {
      if (c == '(')
        ++depth;
      else if (c == ')')
        --depth;
      if (c == ',' && depth == 0)
        flush();
      else
        item += c;
    }
    flush();
    for (const auto & [name, value] : args)
      if (name != "ampl" && name != "sX" && name != "sY" && name != "X0" && name != "Y0" &&
          name != "offset")
        throw ParseError(e->line, "unknown gaussian argument '" + name + "'");
    for (const char * name : {"ampl", "sX", "sY", "X0", "Y0"})
      if (!args.count(name))
        throw ParseError(e->line, std::string("gaussian needs '") + name + "'");
    const double ampl = args["ampl"], sx = args["sX"], sy = args["sY"], x0 = args["X0"],
                 y0 = args["Y0"], offset = args.count("offset") ? args["offset"] : 0.0;
    if (sx == 0.0 || sy == 0.0)
      throw ParseError(e->line, "gaussian widths must be nonzero");
    return [=](const Point & p) {
      const double dx = (p.x() - x0) / sx, dy = (p.y() - y0) / sy;
      return ampl * std::exp(-dx * dx - dy * dy) + offset;
    };
  }

  TagSet tags(std::string_view key, TagSet fallback) const
  {
    const ConfigEntry * e = find(key);
    if (!e)
      return fallback;
    TagSet out;
    std::string v = e->value;
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream ss(v);
    std::string name;
    while (ss >> name)
    {
      if (name == "none")
        continue;
      try
      {
        out.insert(tag_from_string(name));
      }
      catch (const InvalidArgument & err)
      {
        throw ParseError(e->line, err.what());
      }
    }
    return out;
  }

private:
  const RunConfig & cfg_;
  Expression::Constants constants_;
};

void require_model(const RunConfig & c, ModelKind kind)
{
  if (c.model != kind)
    throw ConfigError("config is for model " + std::string(to_string(c.model)) + ", not " +
                      std::string(to_string(kind)));
}

} // namespace

WaveConfig make_wave_config(const RunConfig & config, const Mesh & mesh)
{
  require_model(config, ModelKind::Wave);
  const Builder b(config, mesh);
  WaveConfig w;
  w.rho = b.coefficient("rho");
  w.T = b.tensor("T11", "T12", "T22", "T");
  if (b.find("Z"))
    w.Z = b.coefficient("Z");
  if (b.find("eps"))
    w.eps = b.coefficient("eps");
  if (const ConfigEntry * e = b.find("formulation"))
  {
    std::string f = e->value;
    std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return std::tolower(c); });
    if (f == "grad")
      w.formulation = WaveFormulation::Grad;
    else if (f == "div")
      w.formulation = WaveFormulation::Div;
    else
      throw ParseError(e->line, "formulation must be grad or div");
  }
  w.control = b.control("ub_");
  w.ap_0 = b.spatial("ap_0");
  w.aq_0_1 = b.spatial("aq_0_1");
  w.aq_0_2 = b.spatial("aq_0_2");
  w.w_0 = b.spatial("w_0");
  w.ti = config.time.ti;
  w.tf = config.time.tf;
  w.dt = config.time.dt;
  w.scheme = config.time.scheme == "rk4" ? TimeScheme::RK4 : TimeScheme::Midpoint;
  w.stride = config.output.stride;
  return w;
}

HeatConfig make_heat_config(const RunConfig & config, const Mesh & mesh)
{
  require_model(config, ModelKind::Heat);
  const Builder b(config, mesh);
  HeatConfig h;
  h.rho = b.coefficient("rho");
  h.cv = b.coefficient("cv");
  h.lambda = b.tensor("lambda11", "lambda12", "lambda22", "lambda");
  h.control = b.control("ub_");
  h.au_0 = b.spatial("au_0");
  h.eu_0 = b.gaussian_or_spatial("eu_0");
  h.ti = config.time.ti;
  h.tf = config.time.tf;
  h.dt = config.time.dt;
  h.stride = config.output.stride;
  return h;
}

MindlinConfig make_mindlin_config(const RunConfig & config, const Mesh & mesh)
{
  require_model(config, ModelKind::Mindlin);
  const Builder b(config, mesh);
  MindlinConfig m;
  m.E = b.number("E");
  m.rho = b.number("rho");
  m.nu = b.number("nu");
  m.k_sh = b.number("k_sh");
  m.b = b.number("thickness");
  m.dir_tags = b.tags("dir_tags", m.dir_tags);
  m.nor_tags = b.tags("nor_tags", m.nor_tags);
  m.shear = b.control("ub_nor_");
  m.dir_tm0 = b.temporal("ub_dir_tm0");
  m.dir_tm0_dot = b.temporal("ub_dir_tm0_dir");
  m.dir_sp0 = b.spatial("ub_dir_sp0");
  if (static_cast<bool>(m.dir_tm0) != static_cast<bool>(m.dir_sp0))
    throw ConfigError("ub_dir_tm0 and ub_dir_sp0 must be given together");
  if (m.dir_tm0 && !m.dir_tm0_dot)
    throw ConfigError("ub_dir_tm0 needs its time derivative ub_dir_tm0_dir");
  m.ew_0 = b.spatial("ew_0");
  m.eth1_0 = b.spatial("eth1_0");
  m.eth2_0 = b.spatial("eth2_0");
  m.ekap11_0 = b.spatial("ekap11_0");
  m.ekap12_0 = b.spatial("ekap12_0");
  m.ekap22_0 = b.spatial("ekap22_0");
  m.egam1_0 = b.spatial("egam1_0");
  m.egam2_0 = b.spatial("egam2_0");
  m.ti = config.time.ti;
  m.tf = config.time.tf;
  m.dt = config.time.dt;
  m.stride = config.output.stride;
  validate(m);
  return m;
}

} // namespace phfem
