// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <fmt/format.h>
#include "mllg/errors.hpp"
#include "mllg/mesh.hpp"

namespace mllg
{

namespace
{

// Token stream over a '#'-commented, whitespace-delimited file that remembers line numbers.
class Tokenizer
{
public:
  explicit Tokenizer(std::istream &in) : in_(in) {}

  bool Next(std::string &tok)
  {
    while (!(line_stream_ >> tok))
    {
      std::string line;
      if (!std::getline(in_, line))
      {
        return false;
      }
      ++line_no_;
      if (auto pos = line.find('#'); pos != std::string::npos)
      {
        line.erase(pos);
      }
      line_stream_.clear();
      line_stream_.str(line);
    }
    return true;
  }

  std::string Expect(const char *what)
  {
    std::string tok;
    if (!Next(tok))
    {
      Fail(std::string("unexpected end of file, expected ") + what);
    }
    return tok;
  }

  template <typename T>
  T Number(const char *what)
  {
    const std::string tok = Expect(what);
    std::istringstream ss(tok);
    ss.imbue(std::locale::classic());
    T value{};
    ss >> value;
    if (ss.fail() || !ss.eof())
    {
      Fail(fmt::format("expected {} but found '{}'", what, tok));
    }
    return value;
  }

  [[noreturn]] void Fail(const std::string &msg) const
  {
    throw MeshError(fmt::format("mesh file line {}: {}", line_no_, msg));
  }

private:
  std::istream &in_;
  std::istringstream line_stream_;
  int line_no_ = 0;
};

}  // namespace

Mesh ReadMesh(std::istream &in)
{
  Tokenizer tok(in);
  if (tok.Expect("header") != "tetmesh" || tok.Number<int>("format version") != 1)
  {
    tok.Fail("header must be 'tetmesh 1'");
  }
  if (tok.Expect("'nodes'") != "nodes")
  {
    tok.Fail("expected 'nodes'");
  }
  const long nn = tok.Number<long>("node count");
  if (nn <= 0)
  {
    tok.Fail("node count must be positive");
  }
  std::vector<Vec3> nodes(nn);
  for (auto &p : nodes)
  {
    p.x = tok.Number<double>("x coordinate");
    p.y = tok.Number<double>("y coordinate");
    p.z = tok.Number<double>("z coordinate");
  }
  if (tok.Expect("'tets'") != "tets")
  {
    tok.Fail("expected 'tets'");
  }
  const long nt = tok.Number<long>("tet count");
  if (nt <= 0)
  {
    tok.Fail("tet count must be positive");
  }
  std::vector<std::array<int, 4>> tets(nt);
  for (auto &t : tets)
  {
    for (int &v : t)
    {
      v = tok.Number<int>("node index");
    }
  }
  std::vector<int> omega;
  bool has_omega = false;
  std::string word;
  if (tok.Next(word))
  {
    if (word != "omega")
    {
      tok.Fail("expected 'omega' or end of file, found '" + word + "'");
    }
    has_omega = true;
    const long k = tok.Number<long>("omega cell count");
    omega.resize(k);
    for (int &c : omega)
    {
      c = tok.Number<int>("omega cell index");
    }
    if (tok.Next(word))
    {
      tok.Fail("trailing content '" + word + "'");
    }
  }
  Mesh mesh(std::move(nodes), std::move(tets));
  if (has_omega)
  {
    mesh.SetOmegaCells(std::move(omega));
  }
  return mesh;
}

Mesh ReadMeshFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw MeshError("cannot open mesh file '" + path + "'");
  }
  return ReadMesh(in);
}

void WriteMesh(const Mesh &mesh, std::ostream &out)
{
  out << "tetmesh 1\n";
  out << "nodes " << mesh.NumNodes() << "\n";
  for (const auto &p : mesh.Nodes())
  {
    out << fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x, p.y, p.z);
  }
  out << "tets " << mesh.NumTets() << "\n";
  for (const auto &t : mesh.Tets())
  {
    out << fmt::format("{} {} {} {}\n", t[0], t[1], t[2], t[3]);
  }
  if (!mesh.OmegaCells().empty())
  {
    out << "omega " << mesh.OmegaCells().size() << "\n";
    for (int c : mesh.OmegaCells())
    {
      out << c << "\n";
    }
  }
}

}  // namespace mllg
