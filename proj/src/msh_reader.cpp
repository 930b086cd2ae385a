#include "phfem/error.hpp"
#include "phfem/mesh.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace phfem
{

namespace
{

class LineReader
{
public:
  explicit LineReader(std::istream & in) : in_(in) {}

  bool next(std::string & line)
  {
    while (std::getline(in_, line))
    {
      ++line_no_;
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos)
        return true;
    }
    return false;
  }

  std::string expect_line(const char * what)
  {
    std::string line;
    if (!next(line))
      throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
    return line;
  }

  std::size_t line_no() const { return line_no_; }

private:
  std::istream & in_;
  std::size_t line_no_ = 0;
};

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

long parse_count(const std::string & line, std::size_t line_no)
{
  std::istringstream ss(line);
  long n = -1;
  if (!(ss >> n) || n < 0)
    throw ParseError(line_no, "expected a non-negative count, got '" + line + "'");
  return n;
}

} // namespace

Mesh read_msh(std::istream & in)
{
  LineReader reader(in);
  bool have_format = false;
  bool have_nodes = false;
  bool have_elements = false;

  std::vector<Point> vertices;
  std::unordered_map<long, Index> node_index;
  std::vector<Mesh::Triangle> cells;
  struct TaggedLine
  {
    Index a, b;
    long physical;
    std::size_t line;
  };
  std::vector<TaggedLine> lines;

  std::string line;
  while (reader.next(line))
  {
    const std::string section = trim(line);
    if (section == "$MeshFormat")
    {
      const std::string fmt = reader.expect_line("format line");
      std::istringstream ss(fmt);
      std::string version;
      int file_type = -1;
      ss >> version >> file_type;
      if (version.rfind("2.", 0) != 0)
        throw ParseError(reader.line_no(), "unsupported MSH version '" + version + "'");
      if (file_type != 0)
        throw ParseError(reader.line_no(), "only ASCII MSH files are supported");
      if (trim(reader.expect_line("$EndMeshFormat")) != "$EndMeshFormat")
        throw ParseError(reader.line_no(), "expected $EndMeshFormat");
      have_format = true;
    }
    else if (section == "$Nodes")
    {
      const long n = parse_count(reader.expect_line("node count"), reader.line_no());
      vertices.reserve(static_cast<std::size_t>(n));
      for (long i = 0; i < n; ++i)
      {
        const std::string row = reader.expect_line("node");
        std::istringstream ss(row);
        long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(ss >> id >> x >> y >> z))
          throw ParseError(reader.line_no(), "malformed node '" + row + "'");
        if (!node_index.emplace(id, static_cast<Index>(vertices.size())).second)
          throw ParseError(reader.line_no(), "duplicate node id " + std::to_string(id));
        vertices.emplace_back(x, y);
      }
      if (trim(reader.expect_line("$EndNodes")) != "$EndNodes")
        throw ParseError(reader.line_no(), "expected $EndNodes");
      have_nodes = true;
    }
    else if (section == "$Elements")
    {
      if (!have_nodes)
        throw ParseError(reader.line_no(), "$Elements before $Nodes");
      const long n = parse_count(reader.expect_line("element count"), reader.line_no());
      for (long i = 0; i < n; ++i)
      {
        const std::string row = reader.expect_line("element");
        std::istringstream ss(row);
        long id = 0, type = 0, ntags = 0;
        if (!(ss >> id >> type >> ntags) || ntags < 0)
          throw ParseError(reader.line_no(), "malformed element '" + row + "'");
        std::vector<long> tags(static_cast<std::size_t>(ntags));
        for (auto & t : tags)
          if (!(ss >> t))
            throw ParseError(reader.line_no(), "malformed element tags '" + row + "'");
        int nnodes = 0;
        if (type == 1)
          nnodes = 2;
        else if (type == 2)
          nnodes = 3;
        else
          throw ParseError(reader.line_no(),
                           "unsupported element type " + std::to_string(type));
        std::array<Index, 3> nodes{};
        for (int k = 0; k < nnodes; ++k)
        {
          long node = 0;
          if (!(ss >> node))
            throw ParseError(reader.line_no(), "malformed element nodes '" + row + "'");
          auto it = node_index.find(node);
          if (it == node_index.end())
            throw ParseError(reader.line_no(), "element references unknown node " +
                                                   std::to_string(node));
          nodes[k] = it->second;
        }
        if (type == 2)
          cells.push_back(nodes);
        else
          lines.push_back({nodes[0], nodes[1], tags.empty() ? 0 : tags[0], reader.line_no()});
      }
      if (trim(reader.expect_line("$EndElements")) != "$EndElements")
        throw ParseError(reader.line_no(), "expected $EndElements");
      have_elements = true;
    }
    else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0)
    {
      // Skip sections we do not interpret ($PhysicalNames, ...).
      const std::string end = "$End" + section.substr(1);
      std::string skip;
      bool closed = false;
      while (reader.next(skip))
        if (trim(skip) == end)
        {
          closed = true;
          break;
        }
      if (!closed)
        throw ParseError(reader.line_no(), "unterminated section " + section);
    }
    else
    {
      throw ParseError(reader.line_no(), "unexpected content '" + section + "'");
    }
  }

  const std::size_t eof_line = reader.line_no() + 1;
  if (!have_format)
    throw ParseError(eof_line, "missing $MeshFormat section");
  if (!have_nodes)
    throw ParseError(eof_line, "missing $Nodes section");
  if (!have_elements)
    throw ParseError(eof_line, "missing $Elements section");

  std::map<Mesh::EdgeKey, BoundaryTag> edge_tags;
  for (const auto & l : lines)
  {
    BoundaryTag tag = BoundaryTag::Other;
    if (l.physical >= 1 && l.physical <= 4)
      tag = static_cast<BoundaryTag>(l.physical);
    if (tag == BoundaryTag::Other)
      continue;
    edge_tags[l.a < l.b ? Mesh::EdgeKey{l.a, l.b} : Mesh::EdgeKey{l.b, l.a}] = tag;
  }
  return Mesh(std::move(vertices), std::move(cells), edge_tags);
}

Mesh read_msh_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open mesh file '" + path + "'");
  return read_msh(in);
}

} // namespace phfem
