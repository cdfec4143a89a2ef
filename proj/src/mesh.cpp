// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include "mllg/errors.hpp"

namespace mllg
{

TetGeometry ComputeTetGeometry(const std::array<Vec3, 4> &x)
{
  const Vec3 e1 = x[1] - x[0], e2 = x[2] - x[0], e3 = x[3] - x[0];
  const double det = dot(e1, cross(e2, e3));
  double h = 0.0;
  for (const auto &p : kTetEdgeVertices)
  {
    h = std::max(h, norm(x[p[1]] - x[p[0]]));
  }
  if (!(std::fabs(det) / 6.0 > 1e-14 * h * h * h))
  {
    throw DegenerateElementError("degenerate tetrahedron (volume " +
                                 std::to_string(det / 6.0) + ")");
  }
  TetGeometry g;
  g.volume = det / 6.0;
  g.grads[1] = cross(e2, e3) / det;
  g.grads[2] = cross(e3, e1) / det;
  g.grads[3] = cross(e1, e2) / det;
  g.grads[0] = -(g.grads[1] + g.grads[2] + g.grads[3]);
  return g;
}

Mesh::Mesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets)
  : nodes_(std::move(nodes)), tets_(std::move(tets))
{
  const int nn = NumNodes();
  if (tets_.empty())
  {
    throw MeshError("mesh has no tetrahedra");
  }
  geometry_.resize(tets_.size());
  for (std::size_t t = 0; t < tets_.size(); ++t)
  {
    auto &tet = tets_[t];
    for (int v : tet)
    {
      if (v < 0 || v >= nn)
      {
        throw MeshError("tet " + std::to_string(t) + " references node " +
                        std::to_string(v) + " outside [0, " + std::to_string(nn) + ")");
      }
    }
    auto corners = [&] {
      return std::array<Vec3, 4>{nodes_[tet[0]], nodes_[tet[1]], nodes_[tet[2]],
                                 nodes_[tet[3]]};
    };
    TetGeometry g;
    try
    {
      g = ComputeTetGeometry(corners());
    }
    catch (const DegenerateElementError &)
    {
      throw DegenerateElementError("tet " + std::to_string(t) + " is degenerate");
    }
    if (g.volume < 0.0)
    {
      std::swap(tet[2], tet[3]);
      g = ComputeTetGeometry(corners());
    }
    geometry_[t] = g;
  }

  // Edges: sorted unique (lo, hi) pairs.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(6 * tets_.size());
  for (const auto &tet : tets_)
  {
    for (const auto &p : kTetEdgeVertices)
    {
      const int a = tet[p[0]], b = tet[p[1]];
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  edges_.reserve(pairs.size());
  for (const auto &[lo, hi] : pairs)
  {
    edges_.push_back({lo, hi});
  }
  auto edge_index = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
    return static_cast<int>(it - pairs.begin());
  };
  tet_edges_.resize(tets_.size());
  for (std::size_t t = 0; t < tets_.size(); ++t)
  {
    for (std::size_t l = 0; l < 6; ++l)
    {
      const auto &p = kTetEdgeVertices[l];
      tet_edges_[t][l] = edge_index(tets_[t][p[0]], tets_[t][p[1]]);
    }
  }

  // Faces: each must be shared by one (boundary) or two (interior) tets.
  std::map<std::array<int, 3>, std::pair<int, int>> faces;  // sorted face -> (count, tet)
  for (std::size_t t = 0; t < tets_.size(); ++t)
  {
    for (int skip = 0; skip < 4; ++skip)
    {
      std::array<int, 3> f;
      int k = 0;
      for (int l = 0; l < 4; ++l)
      {
        if (l != skip)
        {
          f[k++] = tets_[t][l];
        }
      }
      std::sort(f.begin(), f.end());
      auto &entry = faces[f];
      entry.first++;
      entry.second = static_cast<int>(t);
    }
  }
  boundary_edge_.assign(edges_.size(), 0);
  boundary_node_.assign(nodes_.size(), 0);
  for (const auto &[f, entry] : faces)
  {
    if (entry.first > 2)
    {
      throw MeshError("non-conforming mesh: face (" + std::to_string(f[0]) + "," +
                      std::to_string(f[1]) + "," + std::to_string(f[2]) + ") shared by " +
                      std::to_string(entry.first) + " tets");
    }
    if (entry.first == 1)
    {
      boundary_faces_.push_back({f, entry.second});
      for (int l = 0; l < 3; ++l)
      {
        boundary_node_[f[l]] = 1;
        boundary_edge_[edge_index(f[l], f[(l + 1) % 3])] = 1;
      }
    }
  }

  omega_cell_flag_.assign(tets_.size(), 0);
  omega_local_.assign(nodes_.size(), -1);
}

TetGeometry Mesh::Geometry(int t) const
{
  if (t < 0 || t >= NumTets())
  {
    throw std::out_of_range("tet index " + std::to_string(t) + " out of range");
  }
  return geometry_[t];
}

Vec3 Mesh::Centroid(int t) const
{
  const auto &tet = tets_[t];
  return 0.25 * (nodes_[tet[0]] + nodes_[tet[1]] + nodes_[tet[2]] + nodes_[tet[3]]);
}

double Mesh::TotalVolume() const
{
  double v = 0.0;
  for (const auto &g : geometry_)
  {
    v += g.volume;
  }
  return v;
}

double Mesh::MaxEdgeLength() const
{
  double h = 0.0;
  for (const auto &e : edges_)
  {
    h = std::max(h, norm(nodes_[e.hi] - nodes_[e.lo]));
  }
  return h;
}

Box Mesh::BoundingBox() const
{
  Box b{nodes_.front(), nodes_.front()};
  for (const auto &p : nodes_)
  {
    for (std::size_t d = 0; d < 3; ++d)
    {
      b.lo[d] = std::min(b.lo[d], p[d]);
      b.hi[d] = std::max(b.hi[d], p[d]);
    }
  }
  return b;
}

void Mesh::SetOmegaCells(std::vector<int> cells)
{
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  omega_cell_flag_.assign(tets_.size(), 0);
  std::vector<char> node_flag(nodes_.size(), 0);
  for (int t : cells)
  {
    if (t < 0 || t >= NumTets())
    {
      throw MeshError("omega cell index " + std::to_string(t) + " out of range");
    }
    omega_cell_flag_[t] = 1;
    for (int v : tets_[t])
    {
      node_flag[v] = 1;
    }
  }
  omega_cells_ = std::move(cells);
  omega_nodes_.clear();
  omega_local_.assign(nodes_.size(), -1);
  for (int n = 0; n < NumNodes(); ++n)
  {
    if (node_flag[n])
    {
      omega_local_[n] = static_cast<int>(omega_nodes_.size());
      omega_nodes_.push_back(n);
    }
  }
}

double Mesh::OmegaVolume() const
{
  double v = 0.0;
  for (int t : omega_cells_)
  {
    v += geometry_[t].volume;
  }
  return v;
}

Mesh BuildBoxMesh(const Vec3 &extent, const std::array<int, 3> &cells, const Vec3 &origin)
{
  for (int d = 0; d < 3; ++d)
  {
    if (cells[d] < 1)
    {
      throw std::invalid_argument("box mesh cell counts must be >= 1");
    }
    if (!(extent[d] > 0.0))
    {
      throw std::invalid_argument("box mesh extents must be > 0");
    }
  }
  const int nx = cells[0], ny = cells[1], nz = cells[2];
  auto id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
  {
    for (int j = 0; j <= ny; ++j)
    {
      for (int i = 0; i <= nx; ++i)
      {
        nodes.push_back({origin.x + extent.x * i / nx, origin.y + extent.y * j / ny,
                         origin.z + extent.z * k / nz});
      }
    }
  }
  // Each permutation of the axes gives one path from corner (0,0,0) to (1,1,1).
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k)
  {
    for (int j = 0; j < ny; ++j)
    {
      for (int i = 0; i < nx; ++i)
      {
        for (const auto &perm : kPerms)
        {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s)
          {
            c[perm[s]] += 1;
            tet[s + 1] = id(c[0], c[1], c[2]);
          }
          tets.push_back(tet);
        }
      }
    }
  }
  return Mesh(std::move(nodes), std::move(tets));
}

Mesh EmbedSubdomain(Mesh mesh, const Box &omega_box)
{
  const Box bb = mesh.BoundingBox();
  double scale = 0.0;
  for (std::size_t d = 0; d < 3; ++d)
  {
    scale = std::max(scale, bb.hi[d] - bb.lo[d]);
  }
  const double tol = 1e-10 * scale;
  auto inside_closed = [&](const Vec3 &p) {
    for (std::size_t d = 0; d < 3; ++d)
    {
      if (p[d] < omega_box.lo[d] - tol || p[d] > omega_box.hi[d] + tol)
      {
        return false;
      }
    }
    return true;
  };
  auto inside_open = [&](const Vec3 &p) {
    for (std::size_t d = 0; d < 3; ++d)
    {
      if (p[d] <= omega_box.lo[d] + tol || p[d] >= omega_box.hi[d] - tol)
      {
        return false;
      }
    }
    return true;
  };
  std::vector<int> cells;
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    int n_closed = 0;
    bool any_open = false;
    for (int v : mesh.Tet(t))
    {
      n_closed += inside_closed(mesh.Node(v)) ? 1 : 0;
      any_open = any_open || inside_open(mesh.Node(v));
    }
    const bool centroid_in = inside_closed(mesh.Centroid(t));
    if (n_closed == 4 && centroid_in)
    {
      cells.push_back(t);
    }
    else if (centroid_in || any_open)
    {
      throw ResolutionError("cell " + std::to_string(t) +
                            " straddles the subdomain boundary; omega is not resolved");
    }
  }
  if (cells.empty())
  {
    throw ResolutionError("subdomain box contains no mesh cells");
  }
  mesh.SetOmegaCells(std::move(cells));
  return mesh;
}

AngleConditionReport CheckAngleCondition(const Mesh &mesh)
{
  std::vector<int> cells = mesh.OmegaCells();
  if (cells.empty())
  {
    cells.resize(mesh.NumTets());
    for (int t = 0; t < mesh.NumTets(); ++t)
    {
      cells[t] = t;
    }
  }
  std::map<std::pair<int, int>, double> offdiag;
  std::map<int, double> diag;
  for (int t : cells)
  {
    const auto &g = mesh.CachedGeometry(t);
    const auto &tet = mesh.Tet(t);
    for (int a = 0; a < 4; ++a)
    {
      diag[tet[a]] += g.volume * dot(g.grads[a], g.grads[a]);
      for (int b = a + 1; b < 4; ++b)
      {
        const int i = std::min(tet[a], tet[b]), j = std::max(tet[a], tet[b]);
        offdiag[{i, j}] += g.volume * dot(g.grads[a], g.grads[b]);
      }
    }
  }
  double dmax = 0.0;
  for (const auto &[n, v] : diag)
  {
    dmax = std::max(dmax, v);
  }
  const double tol = 1e-12 * dmax;
  AngleConditionReport report;
  bool first = true;
  for (const auto &[ij, v] : offdiag)
  {
    if (first || v > report.worst_pair.value)
    {
      report.worst_pair = {ij.first, ij.second, v};
      first = false;
    }
    if (v > tol)
    {
      report.count_violations++;
    }
  }
  report.passed = report.count_violations == 0;
  return report;
}

}  // namespace mllg
