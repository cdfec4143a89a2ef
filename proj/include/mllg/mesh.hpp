// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_MESH_HPP
#define MLLG_MESH_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>
#include "mllg/vec3.hpp"

namespace mllg
{

struct Box
{
  Vec3 lo, hi;

  Vec3 extent() const { return hi - lo; }
  double volume() const
  {
    const Vec3 e = extent();
    return e.x * e.y * e.z;
  }
};

// Mesh edge, oriented from the lower to the higher global node index.
struct Edge
{
  int lo = 0, hi = 0;
};

struct BoundaryFace
{
  std::array<int, 3> nodes;
  int tet = 0;
};

// Volume and the four (constant) barycentric gradients of a tetrahedron.
struct TetGeometry
{
  double volume = 0.0;
  std::array<Vec3, 4> grads;
};

// Local vertex pairs of the six tetrahedron edges, in the order used by Mesh::TetEdges.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdgeVertices = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

//
// Conforming tetrahedral mesh of the computational box Omega with an optional resolved
// ferromagnetic subdomain omega (a union of cells). Immutable apart from the subdomain
// marking, which is set once through EmbedSubdomain or SetOmegaCells.
//
class Mesh
{
public:
  // Validates indices and conformity, reorders each tet to positive orientation and
  // builds edges and boundary faces. Throws MeshError / DegenerateElementError.
  Mesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets);

  int NumNodes() const { return static_cast<int>(nodes_.size()); }
  int NumTets() const { return static_cast<int>(tets_.size()); }
  int NumEdges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec3> &Nodes() const { return nodes_; }
  const Vec3 &Node(int i) const { return nodes_[i]; }
  const std::vector<std::array<int, 4>> &Tets() const { return tets_; }
  const std::array<int, 4> &Tet(int t) const { return tets_[t]; }
  const std::vector<Edge> &Edges() const { return edges_; }
  const std::vector<BoundaryFace> &BoundaryFaces() const { return boundary_faces_; }

  // Global edge indices of tet t, ordered as kTetEdgeVertices.
  const std::array<int, 6> &TetEdges(int t) const { return tet_edges_[t]; }
  bool IsBoundaryEdge(int e) const { return boundary_edge_[e] != 0; }
  bool IsBoundaryNode(int n) const { return boundary_node_[n] != 0; }

  // Throws std::out_of_range for a bad index.
  TetGeometry Geometry(int t) const;
  const TetGeometry &CachedGeometry(int t) const { return geometry_[t]; }
  Vec3 Centroid(int t) const;
  double TotalVolume() const;
  double MaxEdgeLength() const;
  Box BoundingBox() const;

  // Subdomain omega. Cells are sorted; nodes are the sorted closure of the cells.
  void SetOmegaCells(std::vector<int> cells);
  const std::vector<int> &OmegaCells() const { return omega_cells_; }
  const std::vector<int> &OmegaNodes() const { return omega_nodes_; }
  bool IsOmegaCell(int t) const { return omega_cell_flag_[t] != 0; }
  // Local omega index of a global node, -1 if the node is not in the closure of omega.
  int OmegaLocal(int global_node) const { return omega_local_[global_node]; }
  int NumOmegaNodes() const { return static_cast<int>(omega_nodes_.size()); }
  double OmegaVolume() const;

private:
  std::vector<Vec3> nodes_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 6>> tet_edges_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<char> boundary_edge_, boundary_node_;
  std::vector<TetGeometry> geometry_;

  std::vector<int> omega_cells_, omega_nodes_, omega_local_;
  std::vector<char> omega_cell_flag_;
};

// Computes the geometry of an arbitrary tetrahedron; throws DegenerateElementError when
// |volume| <= 1e-14 h^3 with h the longest edge. The signed volume is returned.
TetGeometry ComputeTetGeometry(const std::array<Vec3, 4> &x);

// Structured mesh of nx*ny*nz boxes, each split into six tetrahedra (Kuhn subdivision
// along the main diagonal). Throws std::invalid_argument for non-positive input.
Mesh BuildBoxMesh(const Vec3 &extent, const std::array<int, 3> &cells,
                  const Vec3 &origin = {0.0, 0.0, 0.0});

// Marks every cell inside omega_box. Throws ResolutionError naming the first cell that
// straddles the box boundary, or if no cell is inside.
Mesh EmbedSubdomain(Mesh mesh, const Box &omega_box);

struct AnglePair
{
  int i = -1, j = -1;
  double value = 0.0;
};

struct AngleConditionReport
{
  bool passed = true;
  AnglePair worst_pair;  // largest off-diagonal entry found
  int count_violations = 0;
};

// Checks that all off-diagonal P1 stiffness entries over omega are non-positive (up to
// 1e-12 relative to the largest diagonal entry). Uses all cells when omega is empty.
AngleConditionReport CheckAngleCondition(const Mesh &mesh);

// ASCII "tetmesh 1" format. Parse errors throw MeshError with a line number.
Mesh ReadMesh(std::istream &in);
Mesh ReadMeshFile(const std::string &path);
void WriteMesh(const Mesh &mesh, std::ostream &out);

}  // namespace mllg

#endif  // MLLG_MESH_HPP
