#pragma once

#include "phfem/integrators.hpp"
#include "phfem/mesh.hpp"

#include <iosfwd>
#include <string>

namespace phfem
{

enum class SnapshotFormat
{
  CSV,
  VTK,
};

/// Header `t,H,P_supplied,P_dissipated,residual`, one row per trace entry,
/// values with 17 significant digits, LF line endings.
void write_trace_csv(const HamiltonianTrace & trace, std::ostream & out);
void write_trace_csv(const HamiltonianTrace & trace, const std::string & path);

/// Reads a file written by write_trace_csv (scale is left empty).
HamiltonianTrace read_trace_csv(std::istream & in);
HamiltonianTrace read_trace_csv(const std::string & path);

/// CG1 field: CSV `x,y,value` per vertex in mesh order, or legacy-VTK ASCII
/// unstructured grid with point data.
void write_snapshot(const Vector & field, const Mesh & mesh, std::ostream & out,
                    SnapshotFormat format, const std::string & name = "value");
void write_snapshot(const Vector & field, const Mesh & mesh, const std::string & path,
                    SnapshotFormat format, const std::string & name = "value");

/// %.17g.
std::string format_double(double v);

} // namespace phfem
