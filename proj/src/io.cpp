// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <fmt/format.h>
#include "mllg/errors.hpp"

namespace mllg
{

namespace
{

constexpr char kMagic[8] = {'M', 'L', 'L', 'G', 'S', 'T', 'A', 'T'};

template <typename T>
void PutLE(std::ostream &out, T value)
{
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U u = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> b;
  for (std::size_t i = 0; i < sizeof(T); ++i)
  {
    b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  }
  out.write(b.data(), b.size());
}

template <typename T>
T GetLE(std::istream &in, const char *what)
{
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> b;
  if (!in.read(reinterpret_cast<char *>(b.data()), b.size()))
  {
    throw StateFormatError(fmt::format("state file truncated while reading {}", what));
  }
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
  {
    u |= static_cast<U>(b[i]) << (8 * i);
  }
  return std::bit_cast<T>(u);
}

void PutArray(std::ostream &out, const std::vector<double> &a)
{
  PutLE<std::uint64_t>(out, a.size());
  for (double x : a)
  {
    PutLE(out, x);
  }
}

std::vector<double> GetArray(std::istream &in, const char *what)
{
  const auto n = GetLE<std::uint64_t>(in, what);
  // Refuse lengths that cannot be backed by the remaining stream.
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto end = in.tellg();
  in.seekg(here);
  if (here < 0 || end < here || n > static_cast<std::uint64_t>(end - here) / 8)
  {
    throw StateFormatError(fmt::format("state file truncated: {} claims {} values", what, n));
  }
  std::vector<double> a(n);
  for (auto &x : a)
  {
    x = GetLE<double>(in, what);
  }
  return a;
}

std::vector<double> FlattenCells(const std::vector<Vec3> &v)
{
  return Flatten(v);
}

std::vector<Vec3> Triples(const std::vector<double> &a, const char *what)
{
  if (a.size() % 3 != 0)
  {
    throw StateFormatError(fmt::format("state file: {} length {} is not a multiple of 3", what, a.size()));
  }
  return Unflatten(a);
}

std::string Num(double x)
{
  return fmt::format("{}", x);
}

}  // namespace

void SaveState(const State &state, std::ostream &out)
{
  out.write(kMagic, sizeof(kMagic));
  PutLE<std::uint32_t>(out, kStateVersion);
  PutLE<std::int64_t>(out, state.j);
  PutLE(out, state.t);
  PutArray(out, FlattenCells(state.m.Values()));
  PutArray(out, state.E.values);
  PutArray(out, FlattenCells(state.H.values));
  PutArray(out, FlattenCells(state.v_prev.values));
  if (!out)
  {
    throw std::runtime_error("failed to write state");
  }
}

void SaveStateFile(const State &state, const std::string &path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  SaveState(state, out);
}

State LoadState(std::istream &in)
{
  char magic[8];
  if (!in.read(magic, sizeof(magic)))
  {
    throw StateFormatError("state file too short for its magic");
  }
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
  {
    throw StateFormatError("not a state file (bad magic)");
  }
  const auto version = GetLE<std::uint32_t>(in, "version");
  if (version != kStateVersion)
  {
    throw StateFormatError(fmt::format("state file version {} (expected {})", version, kStateVersion));
  }
  State s;
  s.j = GetLE<std::int64_t>(in, "step index");
  s.t = GetLE<double>(in, "time");
  try
  {
    s.m = MagnetizationField(Triples(GetArray(in, "m"), "m"));
  }
  catch (const InvariantError &e)
  {
    throw StateFormatError(std::string("state file: ") + e.what());
  }
  s.E.values = GetArray(in, "E");
  s.H.values = Triples(GetArray(in, "H"), "H");
  s.v_prev.values = Triples(GetArray(in, "v_prev"), "v_prev");
  if (in.peek() != std::char_traits<char>::eof())
  {
    throw StateFormatError("state file has trailing bytes");
  }
  return s;
}

State LoadStateFile(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw StateFormatError("cannot open state file '" + path + "'");
  }
  return LoadState(in);
}

void WriteOmegaVtk(const Mesh &mesh, const MagnetizationField &m, std::ostream &out,
                   const std::string &title)
{
  if (mesh.OmegaCells().empty())
  {
    throw MeshError("cannot write an omega snapshot: omega is empty");
  }
  if (static_cast<int>(m.size()) != mesh.NumOmegaNodes())
  {
    throw std::invalid_argument("magnetization size does not match the omega nodes");
  }
  const auto &nodes = mesh.OmegaNodes();
  const auto &cells = mesh.OmegaCells();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nodes.size() << " double\n";
  for (int n : nodes)
  {
    const Vec3 &x = mesh.Node(n);
    out << Num(x.x) << ' ' << Num(x.y) << ' ' << Num(x.z) << '\n';
  }
  out << "CELLS " << cells.size() << ' ' << 5 * cells.size() << '\n';
  for (int c : cells)
  {
    const auto &t = mesh.Tet(c);
    out << 4 << ' ' << mesh.OmegaLocal(t[0]) << ' ' << mesh.OmegaLocal(t[1]) << ' '
        << mesh.OmegaLocal(t[2]) << ' ' << mesh.OmegaLocal(t[3]) << '\n';
  }
  out << "CELL_TYPES " << cells.size() << '\n';
  for (std::size_t c = 0; c < cells.size(); ++c)
  {
    out << "10\n";
  }
  out << "POINT_DATA " << nodes.size() << "\nVECTORS m double\n";
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    out << Num(m[z].x) << ' ' << Num(m[z].y) << ' ' << Num(m[z].z) << '\n';
  }
}

void WriteDomainVtk(const Mesh &mesh, const CellField &H, std::ostream &out, const std::string &title)
{
  if (static_cast<int>(H.size()) != mesh.NumTets())
  {
    throw std::invalid_argument("field size does not match the mesh cells");
  }
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.NumNodes() << " double\n";
  for (int n = 0; n < mesh.NumNodes(); ++n)
  {
    const Vec3 &x = mesh.Node(n);
    out << Num(x.x) << ' ' << Num(x.y) << ' ' << Num(x.z) << '\n';
  }
  out << "CELLS " << mesh.NumTets() << ' ' << 5 * mesh.NumTets() << '\n';
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &t = mesh.Tet(c);
    out << 4 << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << mesh.NumTets() << '\n';
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    out << "10\n";
  }
  out << "CELL_DATA " << mesh.NumTets() << "\nVECTORS H double\n";
  for (const auto &h : H.values)
  {
    out << Num(h.x) << ' ' << Num(h.y) << ' ' << Num(h.z) << '\n';
  }
}

void WriteVtkSnapshot(const Mesh &mesh, const State &state, const std::string &prefix)
{
  const std::string title = fmt::format("mllg t={} step={}", Num(state.t), state.j);
  for (const bool omega : {true, false})
  {
    const std::string path = prefix + (omega ? "_omega.vtk" : "_Omega.vtk");
    std::ofstream out(path);
    if (!out)
    {
      throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    if (omega)
    {
      WriteOmegaVtk(mesh, state.m, out, title);
    }
    else
    {
      WriteDomainVtk(mesh, state.H, out, title);
    }
    if (!out)
    {
      throw std::runtime_error("failed writing '" + path + "'");
    }
  }
}

}  // namespace mllg
