// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <sstream>
#include "doctest.h"
#include "mllg/assembly.hpp"
#include "mllg/errors.hpp"
#include "mllg/mesh.hpp"
#include "oracles.hpp"

using namespace mllg;

namespace
{

Mesh ReferenceTet()
{
  return Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
}

// Conformity: every face is shared by one (boundary) or two (interior) tets.
void CheckConformity(const Mesh &mesh)
{
  std::map<std::array<int, 3>, int> faces;
  for (const auto &t : mesh.Tets())
  {
    for (int skip = 0; skip < 4; ++skip)
    {
      std::array<int, 3> f;
      int k = 0;
      for (int a = 0; a < 4; ++a)
      {
        if (a != skip)
        {
          f[k++] = t[a];
        }
      }
      std::sort(f.begin(), f.end());
      faces[f]++;
    }
  }
  int boundary = 0;
  for (const auto &[f, count] : faces)
  {
    CHECK((count == 1 || count == 2));
    boundary += count == 1;
  }
  CHECK(boundary == static_cast<int>(mesh.BoundaryFaces().size()));
}

}  // namespace

TEST_CASE("box mesh counts")
{
  auto m1 = BuildBoxMesh({1, 1, 1}, {1, 1, 1});
  CHECK(m1.NumNodes() == 8);
  CHECK(m1.NumTets() == 6);
  auto m2 = BuildBoxMesh({2, 1, 1}, {2, 1, 1});
  CHECK(m2.NumNodes() == 12);
  CHECK(m2.NumTets() == 12);
  CHECK_THROWS_AS(BuildBoxMesh({1, 1, 1}, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(BuildBoxMesh({-1, 1, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("box mesh is conforming with positive volumes summing to the box")
{
  for (auto cells : {std::array<int, 3>{1, 1, 1}, {2, 3, 1}, {3, 3, 3}})
  {
    auto mesh = BuildBoxMesh({1.5, 0.7, 2.0}, cells);
    CheckConformity(mesh);
    double vol = 0.0;
    for (int t = 0; t < mesh.NumTets(); ++t)
    {
      CHECK(mesh.CachedGeometry(t).volume > 0.0);
      vol += mesh.CachedGeometry(t).volume;
    }
    CHECK(vol == doctest::Approx(1.5 * 0.7 * 2.0).epsilon(1e-12));
    // Euler characteristic of a ball: V - E + F - T = 1
    std::set<std::array<int, 3>> faces;
    for (const auto &t : mesh.Tets())
    {
      for (int skip = 0; skip < 4; ++skip)
      {
        std::array<int, 3> f;
        int k = 0;
        for (int a = 0; a < 4; ++a)
        {
          if (a != skip)
          {
            f[k++] = t[a];
          }
        }
        std::sort(f.begin(), f.end());
        faces.insert(f);
      }
    }
    CHECK(mesh.NumNodes() - mesh.NumEdges() + static_cast<int>(faces.size()) - mesh.NumTets() ==
          1);
  }
}

TEST_CASE("edges are oriented low to high and unique")
{
  auto mesh = BuildBoxMesh({1, 1, 1}, {2, 2, 2});
  std::set<std::pair<int, int>> seen;
  for (const auto &e : mesh.Edges())
  {
    CHECK(e.lo < e.hi);
    CHECK(seen.insert({e.lo, e.hi}).second);
  }
  for (int t = 0; t < mesh.NumTets(); ++t)
  {
    for (int l = 0; l < 6; ++l)
    {
      const auto &e = mesh.Edges()[mesh.TetEdges(t)[l]];
      const int a = mesh.Tet(t)[kTetEdgeVertices[l][0]], b = mesh.Tet(t)[kTetEdgeVertices[l][1]];
      CHECK(e.lo == std::min(a, b));
      CHECK(e.hi == std::max(a, b));
    }
  }
}

TEST_CASE("negatively oriented input is reordered")
{
  Mesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 2, 1, 3}});
  CHECK(mesh.CachedGeometry(0).volume == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("invalid meshes are rejected")
{
  CHECK_THROWS_AS(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 4}}), MeshError);
  CHECK_THROWS_AS(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {{0, 1, 2, 3}}),
                  DegenerateElementError);
  // Three tets sharing one face is non-conforming.
  CHECK_THROWS_AS(Mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 1, 1}},
                       {{0, 1, 2, 3}, {0, 1, 2, 4}, {0, 1, 2, 5}}),
                  MeshError);
}

TEST_CASE("geometry of the reference tet")
{
  const auto mesh = ReferenceTet();
  const auto g = mesh.Geometry(0);
  CHECK(g.volume == doctest::Approx(1.0 / 6.0));
  const std::array<Vec3, 4> expect = {{{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const auto oracle_grads = oracle::BarycentricGradients(
      {mesh.Node(0), mesh.Node(1), mesh.Node(2), mesh.Node(3)});
  Vec3 sum;
  for (int a = 0; a < 4; ++a)
  {
    CHECK(max_abs(g.grads[a] - expect[a]) < 1e-14);
    CHECK(max_abs(g.grads[a] - oracle_grads[a]) < 1e-9);
    sum += g.grads[a];
  }
  CHECK(max_abs(sum) < 1e-15);
  CHECK_THROWS_AS(mesh.Geometry(1), std::out_of_range);
}

TEST_CASE("geometry is translation invariant and scales correctly")
{
  const std::array<Vec3, 4> x = {{{0.1, 0.2, 0.0}, {1.3, 0.1, 0.2}, {0.2, 0.9, 0.4}, {0.3, 0.4, 1.1}}};
  const auto g = ComputeTetGeometry(x);
  std::array<Vec3, 4> shifted, scaled;
  for (int a = 0; a < 4; ++a)
  {
    shifted[a] = x[a] + Vec3{5.0, -3.0, 2.0};
    scaled[a] = 2.0 * x[a];
  }
  const auto gs = ComputeTetGeometry(shifted), gk = ComputeTetGeometry(scaled);
  CHECK(gs.volume == doctest::Approx(g.volume).epsilon(1e-12));
  CHECK(gk.volume == doctest::Approx(8.0 * g.volume).epsilon(1e-12));
  for (int a = 0; a < 4; ++a)
  {
    CHECK(max_abs(gs.grads[a] - g.grads[a]) < 1e-12);
    CHECK(max_abs(gk.grads[a] - 0.5 * g.grads[a]) < 1e-12);
  }
}

TEST_CASE("embed subdomain")
{
  SUBCASE("omega equals Omega")
  {
    auto mesh = EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {2, 2, 2}), {{0, 0, 0}, {1, 1, 1}});
    CHECK(mesh.OmegaCells().size() == 48);
    CHECK(mesh.NumOmegaNodes() == 27);
  }
  SUBCASE("lower half of a 4x4x4 cube")
  {
    auto mesh = EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {4, 4, 4}), {{0, 0, 0}, {1, 1, 0.5}});
    CHECK(mesh.NumTets() == 384);
    CHECK(mesh.OmegaCells().size() == 192);
    int by_centroid = 0;
    for (int t = 0; t < mesh.NumTets(); ++t)
    {
      const bool inside = mesh.Centroid(t).z < 0.5;
      by_centroid += inside;
      CHECK(inside == mesh.IsOmegaCell(t));
    }
    CHECK(by_centroid == 192);
    CHECK(mesh.OmegaVolume() == doctest::Approx(0.5).epsilon(1e-12));
    // closure: every node of an omega cell is an omega node
    for (int c : mesh.OmegaCells())
    {
      for (int v : mesh.Tet(c))
      {
        CHECK(mesh.OmegaLocal(v) >= 0);
      }
    }
    CHECK(mesh.NumOmegaNodes() == 5 * 5 * 3);
  }
  SUBCASE("misaligned box")
  {
    CHECK_THROWS_AS(EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {4, 4, 4}), {{0, 0, 0}, {1, 1, 0.375}}),
                    ResolutionError);
    try
    {
      EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {4, 4, 4}), {{0, 0, 0}, {1, 1, 0.375}});
    }
    catch (const ResolutionError &e)
    {
      CHECK(std::string(e.what()).find("cell") != std::string::npos);
    }
  }
}

TEST_CASE("angle condition")
{
  SUBCASE("reference tet passes")
  {
    auto mesh = ReferenceTet();
    const auto r = CheckAngleCondition(mesh);
    CHECK(r.passed);
    CHECK(r.count_violations == 0);
    CHECK(r.worst_pair.value <= 1e-15);
    // brute-force off-diagonal entries: -1/6 between vertex 0 and the others, 0 otherwise
    const std::array<Vec3, 4> x = {mesh.Node(0), mesh.Node(1), mesh.Node(2), mesh.Node(3)};
    const auto g = oracle::BarycentricGradients(x);
    CHECK(oracle::IntegrateTet(x, [&](const Vec3 &) { return dot(g[0], g[1]); }) ==
          doctest::Approx(-1.0 / 6.0));
    CHECK(oracle::IntegrateTet(x, [&](const Vec3 &) { return dot(g[1], g[2]); }) ==
          doctest::Approx(0.0));
  }
  SUBCASE("Kuhn cube and stretched Kuhn boxes pass")
  {
    CHECK(CheckAngleCondition(BuildBoxMesh({1, 1, 1}, {1, 1, 1})).passed);
    CHECK(CheckAngleCondition(BuildBoxMesh({1, 1, 1}, {3, 3, 3})).passed);
    CHECK(CheckAngleCondition(BuildBoxMesh({0.5, 0.125, 0.003}, {16, 4, 1})).passed);
  }
  SUBCASE("sliver fails")
  {
    Mesh mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0.9, 0.9, 0.05}}, {{0, 1, 2, 3}});
    const auto r = CheckAngleCondition(mesh);
    CHECK_FALSE(r.passed);
    CHECK(r.count_violations > 0);
    CHECK(r.worst_pair.value > 0.0);
    // brute-force the reported entry
    const auto &t = mesh.Tet(0);
    const std::array<Vec3, 4> x = {mesh.Node(t[0]), mesh.Node(t[1]), mesh.Node(t[2]), mesh.Node(t[3])};
    const auto g = oracle::BarycentricGradients(x);
    int li = -1, lj = -1;
    for (int a = 0; a < 4; ++a)
    {
      li = t[a] == r.worst_pair.i ? a : li;
      lj = t[a] == r.worst_pair.j ? a : lj;
    }
    REQUIRE(li >= 0);
    REQUIRE(lj >= 0);
    const double brute = oracle::IntegrateTet(x, [&](const Vec3 &) { return dot(g[li], g[lj]); });
    CHECK(brute > 0.0);
    CHECK(r.worst_pair.value == doctest::Approx(brute).epsilon(1e-6));
  }
}

TEST_CASE("stiffness is symmetric on box meshes")
{
  auto mesh = EmbedSubdomain(BuildBoxMesh({1, 2, 1}, {2, 3, 2}), {{0, 0, 0}, {1, 2, 1}});
  const auto K = AssembleStiffness(mesh);
  CHECK(K.IsSymmetric());
}

TEST_CASE("mesh file round trip and parse errors")
{
  auto mesh = EmbedSubdomain(BuildBoxMesh({1, 1, 1}, {2, 1, 1}), {{0, 0, 0}, {0.5, 1, 1}});
  std::stringstream ss;
  WriteMesh(mesh, ss);
  auto back = ReadMesh(ss);
  CHECK(back.NumNodes() == mesh.NumNodes());
  CHECK(back.NumTets() == mesh.NumTets());
  CHECK(back.OmegaCells() == mesh.OmegaCells());
  for (int n = 0; n < mesh.NumNodes(); ++n)
  {
    CHECK(max_abs(back.Node(n) - mesh.Node(n)) == 0.0);
  }

  std::istringstream comments("# a comment\ntetmesh 1\nnodes 4 # trailing\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                              "tets 1\n0 1 2 3\n");
  auto tet = ReadMesh(comments);
  CHECK(tet.NumTets() == 1);
  CHECK(tet.OmegaCells().empty());

  std::istringstream bad_header("tetmash 1\n");
  CHECK_THROWS_AS(ReadMesh(bad_header), MeshError);
  std::istringstream truncated("tetmesh 1\nnodes 4\n0 0 0\n1 0 0\n");
  CHECK_THROWS_AS(ReadMesh(truncated), MeshError);
  std::istringstream bad_number("tetmesh 1\nnodes 1\n0 x 0\n");
  try
  {
    ReadMesh(bad_number);
    FAIL("expected a parse error");
  }
  catch (const MeshError &e)
  {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
