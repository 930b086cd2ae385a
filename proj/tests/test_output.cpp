#include "phfem/error.hpp"
#include "phfem/output.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

using namespace phfem;
using phfem::test::Random;

namespace
{

std::vector<std::string> lines_of(const std::string & text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    out.push_back(line);
  return out;
}

HamiltonianTrace random_trace(Random & rng, int rows)
{
  HamiltonianTrace t;
  for (int i = 0; i < rows; ++i)
    t.append(i * 0.1, rng.uniform(-1e6, 1e6), rng.uniform() * 1e-300, rng.uniform(),
             rng.uniform() * 1e-17, 1.0);
  return t;
}

} // namespace

TEST(TraceCsv, EmptyTraceIsHeaderOnly)
{
  std::ostringstream out;
  write_trace_csv(HamiltonianTrace{}, out);
  EXPECT_EQ(out.str(), "t,H,P_supplied,P_dissipated,residual\n");
}

TEST(TraceCsv, RowsAndLineEndings)
{
  HamiltonianTrace t;
  t.append(0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
  t.append(0.5, 0.1, -2.5, 3.0, 1e-17, 1.0);
  t.append(1.0, 1.0 / 3.0, 0.0, 0.0, 0.0, 1.0);
  std::ostringstream out;
  write_trace_csv(t, out);
  const std::string s = out.str();
  EXPECT_EQ(s.find('\r'), std::string::npos);
  const std::vector<std::string> lines = lines_of(s);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1], "0,1,0,0,0");
  EXPECT_EQ(lines[2], "0.5,0.10000000000000001,-2.5,3,1.0000000000000001e-17");
  EXPECT_EQ(lines[3], "1,0.33333333333333331,0,0,0");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(TraceCsv, RoundTripIsBitExact)
{
  Random rng(9001);
  const HamiltonianTrace t = random_trace(rng, 25);
  std::stringstream io;
  write_trace_csv(t, io);
  const HamiltonianTrace back = read_trace_csv(io);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
  {
    EXPECT_EQ(std::memcmp(&back.t[i], &t.t[i], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&back.H[i], &t.H[i], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&back.supplied[i], &t.supplied[i], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&back.dissipated[i], &t.dissipated[i], sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(&back.residual[i], &t.residual[i], sizeof(double)), 0);
  }
}

TEST(TraceCsv, MalformedInputThrows)
{
  std::istringstream bad_header("time,H\n");
  EXPECT_THROW(read_trace_csv(bad_header), ParseError);
  std::istringstream bad_row("t,H,P_supplied,P_dissipated,residual\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(bad_row), ParseError);
  EXPECT_THROW(write_trace_csv(HamiltonianTrace{}, "/nonexistent-dir/trace.csv"), Error);
}

TEST(Snapshot, CsvHasOneRowPerVertex)
{
  const MeshPtr mesh = test::rectangle(1, 1);
  std::ostringstream out;
  write_snapshot(Vector::Ones(4), *mesh, out, SnapshotFormat::CSV);
  const std::vector<std::string> lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "x,y,value");
  for (Index v = 0; v < 4; ++v)
    EXPECT_EQ(lines[v + 1], format_double(mesh->vertex(v).x()) + "," +
                                format_double(mesh->vertex(v).y()) + ",1");
}

TEST(Snapshot, VtkDeclaresTriangles)
{
  const MeshPtr mesh = test::rectangle(2, 1);
  Vector f(mesh->n_vertices());
  for (Index v = 0; v < f.size(); ++v)
    f(v) = v;
  std::ostringstream out;
  write_snapshot(f, *mesh, out, SnapshotFormat::VTK, "deflection");
  const std::string s = out.str();
  const std::vector<std::string> lines = lines_of(s);
  EXPECT_EQ(lines[0], "# vtk DataFile Version 2.0");
  EXPECT_EQ(lines[2], "ASCII");
  EXPECT_EQ(lines[3], "DATASET UNSTRUCTURED_GRID");
  EXPECT_NE(s.find("POINTS 6 double\n"), std::string::npos);
  EXPECT_NE(s.find("CELLS 4 16\n"), std::string::npos);
  EXPECT_NE(s.find("CELL_TYPES 4\n5\n5\n5\n5\n"), std::string::npos);
  EXPECT_NE(s.find("POINT_DATA 6\nSCALARS deflection double 1\nLOOKUP_TABLE default\n0\n1\n2\n3\n4\n5\n"),
            std::string::npos);
  const std::size_t cells = s.find("CELLS 4 16\n") + std::strlen("CELLS 4 16\n");
  const Mesh::Triangle & c0 = mesh->cell(0);
  EXPECT_EQ(s.substr(cells, s.find('\n', cells) - cells),
            "3 " + std::to_string(c0[0]) + " " + std::to_string(c0[1]) + " " + std::to_string(c0[2]));
}

TEST(Snapshot, WrongSizeThrows)
{
  const MeshPtr mesh = test::rectangle(1, 1);
  std::ostringstream out;
  EXPECT_THROW(write_snapshot(Vector::Ones(3), *mesh, out, SnapshotFormat::CSV), InvalidArgument);
}

TEST(Output, RepeatedWritesAreIdentical)
{
  Random rng(9002);
  const HamiltonianTrace t = random_trace(rng, 40);
  std::ostringstream a, b;
  write_trace_csv(t, a);
  write_trace_csv(t, b);
  EXPECT_EQ(a.str(), b.str());
}
