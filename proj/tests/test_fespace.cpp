// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <random>
#include "doctest.h"
#include "mllg/errors.hpp"
#include "mllg/fespace.hpp"
#include "oracles.hpp"

using namespace mllg;

namespace
{

std::array<Vec3, 4> TetNodes(const Mesh &mesh, int t)
{
  const auto &v = mesh.Tet(t);
  return {mesh.Node(v[0]), mesh.Node(v[1]), mesh.Node(v[2]), mesh.Node(v[3])};
}

Vec3 RandomPointIn(const Mesh &mesh, int t, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::array<double, 4> l;
  double s = 0.0;
  for (auto &x : l)
  {
    x = u(rng);
    s += x;
  }
  for (auto &x : l)
  {
    x /= s;
  }
  return PhysicalPoint(mesh, t, l);
}

}  // namespace

TEST_CASE("magnetization field invariant")
{
  CHECK_NOTHROW(MagnetizationField({{0, 0, 1}, {1, 0, 0}}));
  CHECK_THROWS_AS(MagnetizationField({{0, 0, 1.001}}), InvariantError);
  auto m = MagnetizationField::Normalize({{3, 0, 4}});
  CHECK(m[0].x == doctest::Approx(0.6));
  CHECK(m.MaxModulusDefect() < 1e-15);
  CHECK_THROWS_AS(MagnetizationField::Normalize({{0, 0, 0}}), InvariantError);
}

TEST_CASE("nodal interpolation")
{
  auto mesh = EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {2, 2, 2}), {{0, 0, 0}, {1, 1, 0.5}});
  const auto c = InterpolateNodal(mesh, [](const Vec3 &) { return Vec3{1, 2, 3}; });
  CHECK(c.size() == static_cast<std::size_t>(mesh.NumOmegaNodes()));
  for (const auto &v : c.values)
  {
    CHECK(max_abs(v - Vec3{1, 2, 3}) == 0.0);
  }
  const auto lin = InterpolateNodal(mesh, [](const Vec3 &x) { return Vec3{x.x, 0, 0}; });
  for (int z = 0; z < mesh.NumOmegaNodes(); ++z)
  {
    CHECK(lin.values[z].x == mesh.Node(mesh.OmegaNodes()[z]).x);
  }
  // cross product of a P1 field with a smooth field
  auto phi = [](const Vec3 &x) { return Vec3{std::sin(x.y), std::cos(x.z), x.x * x.x}; };
  const auto mh = InterpolateNodal(mesh, [](const Vec3 &x) { return Vec3{x.x, 1 - x.y, x.z}; });
  const auto prod = InterpolateNodal(mesh, [&](const Vec3 &x) {
    // m_h is P1 and reproduced; evaluating its formula at nodes is the oracle
    return cross(Vec3{x.x, 1 - x.y, x.z}, phi(x));
  });
  for (int z = 0; z < mesh.NumOmegaNodes(); ++z)
  {
    const Vec3 &x = mesh.Node(mesh.OmegaNodes()[z]);
    CHECK(max_abs(prod.values[z] - cross(mh.values[z], phi(x))) < 1e-15);
  }
}

TEST_CASE("local basis against the barycentric oracle")
{
  Mesh ref({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
  EdgeSpace space(ref);
  // single unit dof on edge (0,1), evaluated at the centroid
  EdgeField E = space.Zero();
  E.values[space.Dof(ref.TetEdges(0)[0])] = 1.0;
  const Vec3 v = EvaluateEdgeField(space, E, {0.25, 0.25, 0.25}, 0);
  CHECK(max_abs(v - Vec3{0.5, 0.25, 0.25}) < 1e-15);
  CHECK(max_abs(EvaluateEdgeField(space, space.Zero(), {0.25, 0.25, 0.25}, 0)) == 0.0);
  CHECK_THROWS_AS(EvaluateEdgeField(space, E, {1, 1, 1}, 0), std::invalid_argument);

  auto mesh = BuildBoxMesh({1.0, 0.8, 1.3}, {2, 1, 2});
  EdgeSpace s2(mesh);
  std::mt19937_64 rng(3);
  for (int t = 0; t < mesh.NumTets(); t += 3)
  {
    const auto x = TetNodes(mesh, t);
    const auto basis = s2.LocalBasis(t);
    const Vec3 p = RandomPointIn(mesh, t, rng);
    for (int l = 0; l < 6; ++l)
    {
      const int a = kTetEdgeVertices[l][0], b = kTetEdgeVertices[l][1];
      // orientation from the global node order
      const bool fwd = mesh.Tet(t)[a] < mesh.Tet(t)[b];
      const Vec3 expect = fwd ? oracle::Whitney(x, a, b, p) : oracle::Whitney(x, b, a, p);
      E = s2.Zero();
      E.values[basis[l].dof] = 1.0;
      CHECK(max_abs(EvaluateEdgeField(s2, E, p, t) - expect) < 1e-8);
      // curl = 2 grad l_a x grad l_b
      const auto g = oracle::BarycentricGradients(x);
      const Vec3 curl = fwd ? 2.0 * cross(g[a], g[b]) : 2.0 * cross(g[b], g[a]);
      CHECK(max_abs(CurlEdgeField(s2, E, t) - curl) < 1e-8);
    }
  }
}

TEST_CASE("edge interpolation")
{
  auto mesh = BuildBoxMesh({1, 1, 1}, {2, 2, 2});
  std::mt19937_64 rng(5);
  for (auto family : {EdgeFamily::Whitney, EdgeFamily::FullP1})
  {
    CAPTURE(static_cast<int>(family));
    EdgeSpace space(mesh, family);
    SUBCASE("constants are reproduced")
    {
      const auto I = InterpolateEdge(space, [](const Vec3 &) { return Vec3{1, 0, 0}; },
                                     BoundaryTreatment::Keep);
      for (int t = 0; t < mesh.NumTets(); ++t)
      {
        const Vec3 p = RandomPointIn(mesh, t, rng);
        CHECK(max_abs(EvaluateEdgeField(space, I.field, p, t) - Vec3{1, 0, 0}) < 1e-13);
      }
      CHECK(I.flagged_boundary_dofs == 0);
    }
    SUBCASE("zero field")
    {
      const auto I = InterpolateEdge(space, [](const Vec3 &) { return Vec3{}; });
      for (double d : I.field.values)
      {
        CHECK(d == 0.0);
      }
    }
    SUBCASE("curl of a linear field is exact")
    {
      const auto I = InterpolateEdge(space, [](const Vec3 &x) { return Vec3{0, 0, x.x}; },
                                     BoundaryTreatment::Keep);
      for (int t = 0; t < mesh.NumTets(); ++t)
      {
        CHECK(max_abs(CurlEdgeField(space, I.field, t) - Vec3{0, -1, 0}) < 1e-13);
      }
      const auto numerical = oracle::NumericalCurl([](const Vec3 &x) { return Vec3{0, 0, x.x}; },
                                                   {0.3, 0.3, 0.3});
      CHECK(max_abs(numerical - Vec3{0, -1, 0}) < 1e-9);
    }
    SUBCASE("constrained dofs are zeroed and flagged")
    {
      const auto I = InterpolateEdge(space, [](const Vec3 &) { return Vec3{1, 1, 1}; });
      CHECK(I.flagged_boundary_dofs > 0);
      CHECK(I.max_dropped_magnitude > 0.0);
      for (int dof : space.BoundaryDofs())
      {
        CHECK(I.field.values[dof] == 0.0);
      }
      for (int dof : space.FreeDofs())
      {
        CHECK_FALSE(space.IsBoundaryDof(dof));
      }
    }
  }
}

TEST_CASE("full P1 family reproduces linear fields")
{
  auto mesh = BuildBoxMesh({1, 1, 1}, {1, 2, 1});
  EdgeSpace space(mesh, EdgeFamily::FullP1);
  auto f = [](const Vec3 &x) { return Vec3{x.y + 2 * x.z, 1 - x.x, 3 * x.x - x.y}; };
  const auto I = InterpolateEdge(space, f, BoundaryTreatment::Keep);
  std::mt19937_64 rng(8);
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    const Vec3 p = RandomPointIn(mesh, t, rng);
    CHECK(max_abs(EvaluateEdgeField(space, I.field, p, t) - f(p)) < 1e-13);
  }
}

TEST_CASE("edge fields are tangentially continuous")
{
  auto mesh = BuildBoxMesh({1, 1, 1}, {2, 2, 1});
  std::mt19937_64 rng(13);
  for (auto family : {EdgeFamily::Whitney, EdgeFamily::FullP1})
  {
    EdgeSpace space(mesh, family);
    EdgeField E{oracle::RandomVector(rng, space.NumDofs())};
    std::map<std::array<int, 3>, std::vector<int>> faces;
    for (int t = 0; t < mesh.NumTets(); ++t)
    {
      for (int skip = 0; skip < 4; ++skip)
      {
        std::array<int, 3> f;
        int k = 0;
        for (int a = 0; a < 4; ++a)
        {
          if (a != skip)
          {
            f[k++] = mesh.Tet(t)[a];
          }
        }
        std::sort(f.begin(), f.end());
        faces[f].push_back(t);
      }
    }
    for (const auto &[f, tets] : faces)
    {
      if (tets.size() != 2)
      {
        continue;
      }
      const Vec3 p = (0.2 * mesh.Node(f[0]) + 0.3 * mesh.Node(f[1]) + 0.5 * mesh.Node(f[2]));
      const Vec3 n = cross(mesh.Node(f[1]) - mesh.Node(f[0]), mesh.Node(f[2]) - mesh.Node(f[0]));
      const Vec3 a = cross(n, EvaluateEdgeField(space, E, p, tets[0]));
      const Vec3 b = cross(n, EvaluateEdgeField(space, E, p, tets[1]));
      CHECK(max_abs(a - b) < 1e-12);
    }
  }
}

TEST_CASE("P0 projection")
{
  Mesh one({{0.1, 0, 0}, {1, 0.2, 0}, {0, 1, 0.3}, {0.2, 0.1, 1}}, {{0, 1, 2, 3}});
  const auto c = ProjectP0(one, [](const Vec3 &) { return Vec3{4, 5, 6}; });
  CHECK(max_abs(c.values[0] - Vec3{4, 5, 6}) < 1e-14);
  const auto lin = ProjectP0(one, [](const Vec3 &x) { return x; });
  CHECK(max_abs(lin.values[0] - one.Centroid(0)) < 1e-14);

  auto mesh = BuildBoxMesh({1, 1, 1}, {2, 2, 2});
  std::mt19937_64 rng(21);
  // idempotence: project the piecewise constant function defined by a cell field
  CellField y;
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    y.values.push_back(oracle::RandomUnit(rng));
  }
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    const auto p = ProjectP0(mesh, [&](const Vec3 &) { return y.values[t]; });
    CHECK(max_abs(p.values[t] - y.values[t]) < 1e-15);
  }
  // orthogonality against random cellwise constants for a random affine f
  const auto A = oracle::RandomVector(rng, 12);
  auto f = [&](const Vec3 &x) {
    return Vec3{A[0] + A[1] * x.x + A[2] * x.y + A[3] * x.z, A[4] + A[5] * x.x + A[6] * x.y + A[7] * x.z,
                A[8] + A[9] * x.x + A[10] * x.y + A[11] * x.z};
  };
  const auto Pf = ProjectP0(mesh, f);
  double inner = 0.0, nf = 0.0, ny = 0.0;
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    const auto x = TetNodes(mesh, t);
    for (int d = 0; d < 3; ++d)
    {
      inner += oracle::IntegrateTet(x, [&](const Vec3 &p) { return (f(p)[d] - Pf.values[t][d]) * y.values[t][d]; }, 3);
      nf += oracle::IntegrateTet(x, [&](const Vec3 &p) { return f(p)[d] * f(p)[d]; }, 3);
    }
    ny += mesh.CachedGeometry(t).volume * dot(y.values[t], y.values[t]);
  }
  CHECK(std::fabs(inner) <= 1e-12 * std::sqrt(nf * ny));
}

TEST_CASE("flatten round trip")
{
  const std::vector<Vec3> v = {{1, 2, 3}, {4, 5, 6}};
  const auto flat = Flatten(v);
  CHECK(flat == std::vector<double>{1, 2, 3, 4, 5, 6});
  const auto back = Unflatten(flat);
  CHECK(max_abs(back[1] - v[1]) == 0.0);
}
