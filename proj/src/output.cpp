#include "phfem/output.hpp"

#include "phfem/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace phfem
{

namespace
{

const char * const trace_header = "t,H,P_supplied,P_dissipated,residual";

std::ofstream open_output(const std::string & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream & out, const std::string & path)
{
  out.flush();
  if (!out)
    throw Error("failed writing '" + path + "'");
}

} // namespace

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const HamiltonianTrace & trace, std::ostream & out)
{
  out << trace_header << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << format_double(trace.t[i]) << ',' << format_double(trace.H[i]) << ','
        << format_double(trace.supplied[i]) << ',' << format_double(trace.dissipated[i]) << ','
        << format_double(trace.residual[i]) << '\n';
}

void write_trace_csv(const HamiltonianTrace & trace, const std::string & path)
{
  std::ofstream out = open_output(path);
  write_trace_csv(trace, out);
  finish(out, path);
}

HamiltonianTrace read_trace_csv(std::istream & in)
{
  std::string line;
  if (!std::getline(in, line) || line != trace_header)
    throw ParseError(1, "expected trace header '" + std::string(trace_header) + "'");
  HamiltonianTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.empty())
      continue;
    double v[5];
    const char * p = line.c_str();
    for (int k = 0; k < 5; ++k)
    {
      char * end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p || (k < 4 && *end != ',') || (k == 4 && *end != '\0'))
        throw ParseError(line_no, "malformed trace row");
      p = end + 1;
    }
    trace.t.push_back(v[0]);
    trace.H.push_back(v[1]);
    trace.supplied.push_back(v[2]);
    trace.dissipated.push_back(v[3]);
    trace.residual.push_back(v[4]);
  }
  return trace;
}

HamiltonianTrace read_trace_csv(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open '" + path + "'");
  return read_trace_csv(in);
}

void write_snapshot(const Vector & field, const Mesh & mesh, std::ostream & out,
                    SnapshotFormat format, const std::string & name)
{
  if (field.size() != mesh.n_vertices())
    throw InvalidArgument("snapshot field has " + std::to_string(field.size()) +
                          " values, mesh has " + std::to_string(mesh.n_vertices()) +
                          " vertices");
  if (format == SnapshotFormat::CSV)
  {
    out << "x,y," << name << '\n';
    for (Index v = 0; v < mesh.n_vertices(); ++v)
      out << format_double(mesh.vertex(v).x()) << ',' << format_double(mesh.vertex(v).y()) << ','
          << format_double(field(v)) << '\n';
    return;
  }
  out << "# vtk DataFile Version 2.0\n"
      << name << "\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Point & p : mesh.vertices())
    out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  out << "CELLS " << mesh.n_cells() << ' ' << 4 * mesh.n_cells() << '\n';
  for (const auto & c : mesh.cells())
    out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.n_cells() << '\n';
  for (Index c = 0; c < mesh.n_cells(); ++c)
    out << "5\n";
  out << "POINT_DATA " << mesh.n_vertices() << '\n'
      << "SCALARS " << name << " double 1\n"
      << "LOOKUP_TABLE default\n";
  for (Index v = 0; v < mesh.n_vertices(); ++v)
    out << format_double(field(v)) << '\n';
}

void write_snapshot(const Vector & field, const Mesh & mesh, const std::string & path,
                    SnapshotFormat format, const std::string & name)
{
  std::ofstream out = open_output(path);
  write_snapshot(field, mesh, out, format, name);
  finish(out, path);
}

} // namespace phfem
