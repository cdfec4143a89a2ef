// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_FESPACE_HPP
#define MLLG_FESPACE_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>
#include "mllg/mesh.hpp"
#include "mllg/vec3.hpp"

namespace mllg
{

using VectorFunction = std::function<Vec3(const Vec3 &)>;

// P1 field on the omega nodes (one 3-vector per node, in Mesh::OmegaNodes order).
struct NodalField
{
  std::vector<Vec3> values;

  std::size_t size() const { return values.size(); }
};

// Nodal field with unit modulus at every node.
class MagnetizationField
{
public:
  MagnetizationField() = default;
  // Throws InvariantError if some | |m(z)| - 1 | > tol.
  explicit MagnetizationField(std::vector<Vec3> values, double tol = 1e-12);
  // Normalizes each value; throws InvariantError on a (near) zero vector.
  static MagnetizationField Normalize(std::vector<Vec3> values);

  const std::vector<Vec3> &Values() const { return values_; }
  const Vec3 &operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  NodalField AsNodal() const { return {values_}; }
  double MaxModulusDefect() const;

private:
  std::vector<Vec3> values_;
};

// Piecewise constant 3-vector field, one value per Omega cell.
struct CellField
{
  std::vector<Vec3> values;

  std::size_t size() const { return values.size(); }
};

// Edge element coefficient vector (see EdgeSpace for the dof layout).
struct EdgeField
{
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

enum class EdgeFamily
{
  // Lowest-order Nedelec (first kind): psi_ab = l_a grad l_b - l_b grad l_a, one dof per
  // edge, dof = tangential line integral.
  Whitney,
  // Tangentially continuous full P1 (Nedelec second kind): basis l_a grad l_b for both
  // orientations, two dofs per edge, dof = endpoint tangential value f(x_a).(x_b - x_a).
  FullP1
};

// coef * lambda_a * grad(lambda_b), with a, b local vertex indices.
struct WhitneyTerm
{
  int a = 0, b = 0;
  double coef = 0.0;
};

struct LocalEdgeFunction
{
  int dof = 0;
  int num_terms = 0;
  std::array<WhitneyTerm, 2> terms{};
};

//
// Edge element space on the full mesh. Dofs on edges of the outer boundary are
// constrained to zero (perfect conductor).
//
class EdgeSpace
{
public:
  explicit EdgeSpace(const Mesh &mesh, EdgeFamily family = EdgeFamily::Whitney);

  const Mesh &GetMesh() const { return *mesh_; }
  EdgeFamily Family() const { return family_; }
  int DofsPerEdge() const { return family_ == EdgeFamily::Whitney ? 1 : 2; }
  int NumDofs() const { return mesh_->NumEdges() * DofsPerEdge(); }
  int LocalCount() const { return 6 * DofsPerEdge(); }
  int Dof(int edge, int k = 0) const { return edge * DofsPerEdge() + k; }

  bool IsBoundaryDof(int dof) const { return mesh_->IsBoundaryEdge(dof / DofsPerEdge()); }
  const std::vector<int> &FreeDofs() const { return free_dofs_; }
  const std::vector<int> &BoundaryDofs() const { return boundary_dofs_; }

  // Local basis of tet t; the first LocalCount() entries are valid.
  std::array<LocalEdgeFunction, 12> LocalBasis(int t) const;

  EdgeField Zero() const { return {std::vector<double>(NumDofs(), 0.0)}; }

private:
  const Mesh *mesh_;
  EdgeFamily family_;
  std::vector<int> free_dofs_, boundary_dofs_;
};

Vec3 EvaluateLocal(const LocalEdgeFunction &f, const TetGeometry &g,
                   const std::array<double, 4> &lambda);
Vec3 CurlLocal(const LocalEdgeFunction &f, const TetGeometry &g);

// Barycentric coordinates of a point with respect to tet t.
std::array<double, 4> Barycentric(const Mesh &mesh, int t, const Vec3 &p);

// Degree-2 four-point rule on a tetrahedron (barycentric points, weights sum to one).
struct TetQuadrature
{
  std::array<std::array<double, 4>, 4> points;
  std::array<double, 4> weights;
};
const TetQuadrature &DegreeTwoRule();
Vec3 PhysicalPoint(const Mesh &mesh, int t, const std::array<double, 4> &lambda);

// I_h: nodal interpolation onto P1 on omega.
NodalField InterpolateNodal(const Mesh &mesh, const VectorFunction &f);

enum class BoundaryTreatment
{
  ZeroConstrained,  // enforce the perfect-conductor constraint, report dropped values
  Keep              // raw interpolant, boundary dofs keep their values
};

struct EdgeInterpolation
{
  EdgeField field;
  int flagged_boundary_dofs = 0;      // constrained dofs whose value was nonzero
  double max_dropped_magnitude = 0.0;
};

// I_{X_h}: canonical edge interpolant (line integrals with 2-point Gauss for Whitney,
// endpoint tangential values for FullP1).
EdgeInterpolation InterpolateEdge(const EdgeSpace &space, const VectorFunction &f,
                                  BoundaryTreatment treatment = BoundaryTreatment::ZeroConstrained);

// I_{Y_h}: L2 projection onto cellwise constants (degree-2 quadrature).
CellField ProjectP0(const Mesh &mesh, const VectorFunction &f);

// Value of the edge field at a point of tet t. Throws std::invalid_argument if the
// point lies outside the tet.
Vec3 EvaluateEdgeField(const EdgeSpace &space, const EdgeField &E, const Vec3 &point, int t);
// Cellwise constant curl of the edge field on tet t.
Vec3 CurlEdgeField(const EdgeSpace &space, const EdgeField &E, int t);

std::vector<double> Flatten(std::span<const Vec3> v);
std::vector<Vec3> Unflatten(std::span<const double> v);

}  // namespace mllg

#endif  // MLLG_FESPACE_HPP
