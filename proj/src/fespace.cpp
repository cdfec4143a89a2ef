// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/fespace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include "mllg/errors.hpp"

namespace mllg
{

MagnetizationField::MagnetizationField(std::vector<Vec3> values, double tol)
  : values_(std::move(values))
{
  for (std::size_t i = 0; i < values_.size(); ++i)
  {
    const double defect = std::fabs(norm(values_[i]) - 1.0);
    if (!(defect <= tol))
    {
      throw InvariantError("magnetization is not unit length at node " + std::to_string(i) +
                           " (| |m| - 1 | = " + std::to_string(defect) + ")");
    }
  }
}

MagnetizationField MagnetizationField::Normalize(std::vector<Vec3> values)
{
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    const double n = norm(values[i]);
    if (!(n > 1e-12))
    {
      throw InvariantError("cannot normalize a zero vector at node " + std::to_string(i));
    }
    values[i] = values[i] / n;
  }
  MagnetizationField m;
  m.values_ = std::move(values);
  return m;
}

double MagnetizationField::MaxModulusDefect() const
{
  double d = 0.0;
  for (const auto &v : values_)
  {
    d = std::fmax(d, std::fabs(norm(v) - 1.0));
  }
  return d;
}

EdgeSpace::EdgeSpace(const Mesh &mesh, EdgeFamily family) : mesh_(&mesh), family_(family)
{
  for (int dof = 0; dof < NumDofs(); ++dof)
  {
    (IsBoundaryDof(dof) ? boundary_dofs_ : free_dofs_).push_back(dof);
  }
}

std::array<LocalEdgeFunction, 12> EdgeSpace::LocalBasis(int t) const
{
  std::array<LocalEdgeFunction, 12> basis{};
  const auto &tet = mesh_->Tet(t);
  const auto &edges = mesh_->TetEdges(t);
  for (int l = 0; l < 6; ++l)
  {
    int la = kTetEdgeVertices[l][0], lb = kTetEdgeVertices[l][1];
    if (tet[la] > tet[lb])
    {
      std::swap(la, lb);  // la now holds the local index of the lower global node
    }
    if (family_ == EdgeFamily::Whitney)
    {
      basis[l] = {Dof(edges[l]), 2, {{{la, lb, 1.0}, {lb, la, -1.0}}}};
    }
    else
    {
      basis[2 * l] = {Dof(edges[l], 0), 1, {{{la, lb, 1.0}, {}}}};
      basis[2 * l + 1] = {Dof(edges[l], 1), 1, {{{lb, la, 1.0}, {}}}};
    }
  }
  return basis;
}

Vec3 EvaluateLocal(const LocalEdgeFunction &f, const TetGeometry &g,
                   const std::array<double, 4> &lambda)
{
  Vec3 v;
  for (int k = 0; k < f.num_terms; ++k)
  {
    const auto &term = f.terms[k];
    v += (term.coef * lambda[term.a]) * g.grads[term.b];
  }
  return v;
}

Vec3 CurlLocal(const LocalEdgeFunction &f, const TetGeometry &g)
{
  Vec3 c;
  for (int k = 0; k < f.num_terms; ++k)
  {
    const auto &term = f.terms[k];
    c += term.coef * cross(g.grads[term.a], g.grads[term.b]);
  }
  return c;
}

std::array<double, 4> Barycentric(const Mesh &mesh, int t, const Vec3 &p)
{
  const auto &g = mesh.CachedGeometry(t);
  const Vec3 &x0 = mesh.Node(mesh.Tet(t)[0]);
  std::array<double, 4> lambda;
  lambda[1] = dot(g.grads[1], p - x0);
  lambda[2] = dot(g.grads[2], p - x0);
  lambda[3] = dot(g.grads[3], p - x0);
  lambda[0] = 1.0 - lambda[1] - lambda[2] - lambda[3];
  return lambda;
}

const TetQuadrature &DegreeTwoRule()
{
  static const TetQuadrature rule = [] {
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    TetQuadrature q;
    q.points = {{{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}}};
    q.weights = {0.25, 0.25, 0.25, 0.25};
    return q;
  }();
  return rule;
}

Vec3 PhysicalPoint(const Mesh &mesh, int t, const std::array<double, 4> &lambda)
{
  Vec3 x;
  for (int a = 0; a < 4; ++a)
  {
    x += lambda[a] * mesh.Node(mesh.Tet(t)[a]);
  }
  return x;
}

NodalField InterpolateNodal(const Mesh &mesh, const VectorFunction &f)
{
  NodalField out;
  out.values.reserve(mesh.NumOmegaNodes());
  for (int n : mesh.OmegaNodes())
  {
    out.values.push_back(f(mesh.Node(n)));
  }
  return out;
}

EdgeInterpolation InterpolateEdge(const EdgeSpace &space, const VectorFunction &f,
                                  BoundaryTreatment treatment)
{
  const Mesh &mesh = space.GetMesh();
  EdgeInterpolation out;
  out.field = space.Zero();
  auto &dofs = out.field.values;
  const double gp = 0.5 / std::sqrt(3.0);
  for (int e = 0; e < mesh.NumEdges(); ++e)
  {
    const Vec3 &a = mesh.Node(mesh.Edges()[e].lo);
    const Vec3 &b = mesh.Node(mesh.Edges()[e].hi);
    const Vec3 t = b - a;
    if (space.Family() == EdgeFamily::Whitney)
    {
      dofs[space.Dof(e)] =
          0.5 * (dot(f(a + (0.5 - gp) * t), t) + dot(f(a + (0.5 + gp) * t), t));
    }
    else
    {
      dofs[space.Dof(e, 0)] = dot(f(a), t);
      dofs[space.Dof(e, 1)] = -dot(f(b), t);
    }
  }
  if (treatment == BoundaryTreatment::ZeroConstrained)
  {
    for (int dof : space.BoundaryDofs())
    {
      const double v = std::fabs(dofs[dof]);
      if (v > 0.0)
      {
        out.flagged_boundary_dofs++;
        out.max_dropped_magnitude = std::fmax(out.max_dropped_magnitude, v);
      }
      dofs[dof] = 0.0;
    }
  }
  return out;
}

CellField ProjectP0(const Mesh &mesh, const VectorFunction &f)
{
  const auto &rule = DegreeTwoRule();
  CellField out;
  out.values.resize(mesh.NumTets());
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    Vec3 mean;
    for (int q = 0; q < 4; ++q)
    {
      mean += rule.weights[q] * f(PhysicalPoint(mesh, t, rule.points[q]));
    }
    out.values[t] = mean;
  }
  return out;
}

Vec3 EvaluateEdgeField(const EdgeSpace &space, const EdgeField &E, const Vec3 &point, int t)
{
  const Mesh &mesh = space.GetMesh();
  if (t < 0 || t >= mesh.NumTets())
  {
    throw std::out_of_range("tet index out of range");
  }
  const auto lambda = Barycentric(mesh, t, point);
  for (double l : lambda)
  {
    if (l < -1e-12)
    {
      throw std::invalid_argument("point lies outside tet " + std::to_string(t));
    }
  }
  const auto &g = mesh.CachedGeometry(t);
  const auto basis = space.LocalBasis(t);
  Vec3 v;
  for (int i = 0; i < space.LocalCount(); ++i)
  {
    v += E.values[basis[i].dof] * EvaluateLocal(basis[i], g, lambda);
  }
  return v;
}

Vec3 CurlEdgeField(const EdgeSpace &space, const EdgeField &E, int t)
{
  const auto &g = space.GetMesh().CachedGeometry(t);
  const auto basis = space.LocalBasis(t);
  Vec3 c;
  for (int i = 0; i < space.LocalCount(); ++i)
  {
    c += E.values[basis[i].dof] * CurlLocal(basis[i], g);
  }
  return c;
}

std::vector<double> Flatten(std::span<const Vec3> v)
{
  std::vector<double> out(3 * v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    out[3 * i] = v[i].x;
    out[3 * i + 1] = v[i].y;
    out[3 * i + 2] = v[i].z;
  }
  return out;
}

std::vector<Vec3> Unflatten(std::span<const double> v)
{
  std::vector<Vec3> out(v.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] = {v[3 * i], v[3 * i + 1], v[3 * i + 2]};
  }
  return out;
}

}  // namespace mllg
