// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/assembly.hpp"

#include <stdexcept>

namespace mllg
{

SparseMatrix AssembleP1Stiffness(const Mesh &mesh, std::span<const int> cells,
                                 std::span<const int> node_index, int num_rows)
{
  std::vector<Triplet> t;
  t.reserve(16 * cells.size());
  for (int c : cells)
  {
    const auto &g = mesh.CachedGeometry(c);
    const auto &tet = mesh.Tet(c);
    for (int a = 0; a < 4; ++a)
    {
      const int i = node_index[tet[a]];
      for (int b = 0; b < 4; ++b)
      {
        const int j = node_index[tet[b]];
        if (i >= 0 && j >= 0)
        {
          t.push_back({i, j, g.volume * dot(g.grads[a], g.grads[b])});
        }
      }
    }
  }
  return SparseMatrix(num_rows, num_rows, std::move(t));
}

SparseMatrix AssembleStiffness(const Mesh &mesh)
{
  std::vector<int> local(mesh.NumNodes());
  for (int n = 0; n < mesh.NumNodes(); ++n)
  {
    local[n] = mesh.OmegaLocal(n);
  }
  return AssembleP1Stiffness(mesh, mesh.OmegaCells(), local, mesh.NumOmegaNodes());
}

std::vector<double> LumpedMassWeights(const Mesh &mesh)
{
  std::vector<double> w(mesh.NumOmegaNodes(), 0.0);
  for (int c : mesh.OmegaCells())
  {
    const double q = 0.25 * mesh.CachedGeometry(c).volume;
    for (int v : mesh.Tet(c))
    {
      w[mesh.OmegaLocal(v)] += q;
    }
  }
  return w;
}

SparseMatrix AssembleLumpedMass(const Mesh &mesh)
{
  const auto w = LumpedMassWeights(mesh);
  return SparseMatrix::Diagonal(w);
}

SparseMatrix AssembleCrossOperator(std::span<const double> weights, const MagnetizationField &m)
{
  if (weights.size() != m.size())
  {
    throw std::invalid_argument("cross operator: weights/magnetization size mismatch");
  }
  std::vector<Triplet> t;
  t.reserve(6 * m.size());
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    const int b = 3 * static_cast<int>(z);
    const double w = weights[z];
    const Vec3 &u = m[z];
    // [u]_x = [[0, -u3, u2], [u3, 0, -u1], [-u2, u1, 0]]
    t.push_back({b, b + 1, -w * u.z});
    t.push_back({b, b + 2, w * u.y});
    t.push_back({b + 1, b, w * u.z});
    t.push_back({b + 1, b + 2, -w * u.x});
    t.push_back({b + 2, b, -w * u.y});
    t.push_back({b + 2, b + 1, w * u.x});
  }
  const int n = 3 * static_cast<int>(m.size());
  return SparseMatrix(n, n, std::move(t));
}

SparseMatrix AssembleEdgeMass(const EdgeSpace &space, std::span<const double> cell_weights)
{
  const Mesh &mesh = space.GetMesh();
  const int nl = space.LocalCount();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nl) * nl * mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const double weight = cell_weights.empty() ? 1.0 : cell_weights[c];
    if (weight == 0.0)
    {
      continue;
    }
    const auto &g = mesh.CachedGeometry(c);
    const auto basis = space.LocalBasis(c);
    for (int i = 0; i < nl; ++i)
    {
      for (int j = 0; j < nl; ++j)
      {
        // int (l_a grad l_b).(l_c grad l_d) = (grad l_b . grad l_d) |T| (1 + delta_ac) / 20
        double v = 0.0;
        for (int p = 0; p < basis[i].num_terms; ++p)
        {
          const auto &ti = basis[i].terms[p];
          for (int q = 0; q < basis[j].num_terms; ++q)
          {
            const auto &tj = basis[j].terms[q];
            const double mass = g.volume * (ti.a == tj.a ? 2.0 : 1.0) / 20.0;
            v += ti.coef * tj.coef * mass * dot(g.grads[ti.b], g.grads[tj.b]);
          }
        }
        t.push_back({basis[i].dof, basis[j].dof, weight * v});
      }
    }
  }
  return SparseMatrix(space.NumDofs(), space.NumDofs(), std::move(t));
}

std::vector<double> OmegaIndicator(const Mesh &mesh)
{
  std::vector<double> w(mesh.NumTets(), 0.0);
  for (int c : mesh.OmegaCells())
  {
    w[c] = 1.0;
  }
  return w;
}

SparseMatrix AssembleCurl(const EdgeSpace &space)
{
  const Mesh &mesh = space.GetMesh();
  std::vector<Triplet> t;
  t.reserve(3 * static_cast<std::size_t>(space.LocalCount()) * mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &g = mesh.CachedGeometry(c);
    const auto basis = space.LocalBasis(c);
    for (int i = 0; i < space.LocalCount(); ++i)
    {
      const Vec3 curl = g.volume * CurlLocal(basis[i], g);
      for (int d = 0; d < 3; ++d)
      {
        t.push_back({3 * c + d, basis[i].dof, curl[d]});
      }
    }
  }
  return SparseMatrix(3 * mesh.NumTets(), space.NumDofs(), std::move(t));
}

SparseMatrix AssembleCurlCurl(const EdgeSpace &space)
{
  const Mesh &mesh = space.GetMesh();
  const int nl = space.LocalCount();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nl) * nl * mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &g = mesh.CachedGeometry(c);
    const auto basis = space.LocalBasis(c);
    std::array<Vec3, 12> curls;
    for (int i = 0; i < nl; ++i)
    {
      curls[i] = CurlLocal(basis[i], g);
    }
    for (int i = 0; i < nl; ++i)
    {
      for (int j = 0; j < nl; ++j)
      {
        t.push_back({basis[i].dof, basis[j].dof, g.volume * dot(curls[i], curls[j])});
      }
    }
  }
  return SparseMatrix(space.NumDofs(), space.NumDofs(), std::move(t));
}

SparseMatrix AssembleCouplingR(const Mesh &mesh)
{
  std::vector<Triplet> t;
  t.reserve(12 * mesh.OmegaCells().size());
  for (int c : mesh.OmegaCells())
  {
    const double q = 0.25 * mesh.CachedGeometry(c).volume;
    for (int v : mesh.Tet(c))
    {
      const int z = mesh.OmegaLocal(v);
      for (int d = 0; d < 3; ++d)
      {
        t.push_back({3 * c + d, 3 * z + d, q});
      }
    }
  }
  return SparseMatrix(3 * mesh.NumTets(), 3 * mesh.NumOmegaNodes(), std::move(t));
}

std::vector<double> CellVolumes(const Mesh &mesh)
{
  std::vector<double> v(mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    v[c] = mesh.CachedGeometry(c).volume;
  }
  return v;
}

std::vector<double> EdgeLoad(const EdgeSpace &space, const VectorFunction &f)
{
  const Mesh &mesh = space.GetMesh();
  const auto &rule = DegreeTwoRule();
  std::vector<double> load(space.NumDofs(), 0.0);
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &g = mesh.CachedGeometry(c);
    const auto basis = space.LocalBasis(c);
    for (int q = 0; q < 4; ++q)
    {
      const Vec3 fq = f(PhysicalPoint(mesh, c, rule.points[q]));
      for (int i = 0; i < space.LocalCount(); ++i)
      {
        load[basis[i].dof] +=
            g.volume * rule.weights[q] * dot(fq, EvaluateLocal(basis[i], g, rule.points[q]));
      }
    }
  }
  return load;
}

std::vector<double> LumpedLoad(std::span<const double> weights, const NodalField &f)
{
  if (weights.size() != f.size())
  {
    throw std::invalid_argument("lumped load: size mismatch");
  }
  std::vector<double> load(3 * f.size());
  for (std::size_t z = 0; z < f.size(); ++z)
  {
    for (std::size_t d = 0; d < 3; ++d)
    {
      load[3 * z + d] = weights[z] * f.values[z][d];
    }
  }
  return load;
}

std::vector<double> CellLoad(const SparseMatrix &R, const CellField &H)
{
  const auto h = Flatten(H.values);
  std::vector<double> load(R.Cols());
  R.MultiplyTranspose(h, load);
  return load;
}

SparseMatrix KroneckerI3(const SparseMatrix &A)
{
  std::vector<Triplet> t;
  t.reserve(3 * static_cast<std::size_t>(A.NonZeros()));
  for (const auto &e : A.ToTriplets())
  {
    for (int d = 0; d < 3; ++d)
    {
      t.push_back({3 * e.row + d, 3 * e.col + d, e.value});
    }
  }
  return SparseMatrix(3 * A.Rows(), 3 * A.Cols(), std::move(t));
}

AssembledForms AssembleForms(const EdgeSpace &space)
{
  const Mesh &mesh = space.GetMesh();
  AssembledForms f;
  f.lumped_weights = LumpedMassWeights(mesh);
  f.stiffness = AssembleStiffness(mesh);
  f.vector_stiffness = KroneckerI3(f.stiffness);
  f.edge_mass = AssembleEdgeMass(space);
  const auto chi = OmegaIndicator(mesh);
  f.edge_mass_omega = AssembleEdgeMass(space, chi);
  f.cell_volumes = CellVolumes(mesh);
  f.curl = AssembleCurl(space);
  f.curl_curl = AssembleCurlCurl(space);
  f.coupling = AssembleCouplingR(mesh);
  return f;
}

}  // namespace mllg
