// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_ASSEMBLY_HPP
#define MLLG_ASSEMBLY_HPP

#include <span>
#include <vector>
#include "mllg/fespace.hpp"
#include "mllg/linalg.hpp"
#include "mllg/mesh.hpp"

namespace mllg
{

// Scalar P1 stiffness (exact integration) over the given cells; node_index maps a global
// node to its row (or -1), num_rows is the matrix size.
SparseMatrix AssembleP1Stiffness(const Mesh &mesh, std::span<const int> cells,
                                 std::span<const int> node_index, int num_rows);

// Scalar P1 stiffness on omega, rows in omega-local node order.
SparseMatrix AssembleStiffness(const Mesh &mesh);

// Vertex-rule lumped mass weights on omega: w(z) = sum over omega tets containing z of |T|/4.
std::vector<double> LumpedMassWeights(const Mesh &mesh);
SparseMatrix AssembleLumpedMass(const Mesh &mesh);

// Block diagonal operator v -> w(z) m(z) x v(z) on 3 n_omega unknowns (x, y, z per node).
SparseMatrix AssembleCrossOperator(std::span<const double> weights, const MagnetizationField &m);

// Edge mass with an optional per-cell weight (empty span = weight 1 on every cell). Cells
// with zero weight contribute nothing.
SparseMatrix AssembleEdgeMass(const EdgeSpace &space, std::span<const double> cell_weights = {});

// Indicator weights of omega on all cells (1 on omega cells, 0 elsewhere).
std::vector<double> OmegaIndicator(const Mesh &mesh);

// Curl coupling C (3 n_cells x n_dofs): row 3c+d, column i holds int_c (curl psi_i)_d.
SparseMatrix AssembleCurl(const EdgeSpace &space);

// int curl psi_i . curl psi_j; equals C^T My^{-1} C for the cell mass My = diag |c|.
SparseMatrix AssembleCurlCurl(const EdgeSpace &space);

// Coupling R (3 n_cells x 3 n_omega): (R v)_{3c+d} = int_c v_d for omega cells, zero rows
// outside omega. R^T maps a cell field to the load (H, phi) on omega nodes.
SparseMatrix AssembleCouplingR(const Mesh &mesh);

// Cell mass diagonal |c| (one entry per cell; My acts as |c| I3 per cell).
std::vector<double> CellVolumes(const Mesh &mesh);

// Loads.
// (f, psi_i) for all edge dofs, degree-2 quadrature.
std::vector<double> EdgeLoad(const EdgeSpace &space, const VectorFunction &f);
// Lumped (f, phi) on omega nodes: w(z) f(z), flattened 3 n_omega.
std::vector<double> LumpedLoad(std::span<const double> weights, const NodalField &f);
// (H, phi) on omega nodes for a cellwise constant H: R^T H, flattened 3 n_omega.
std::vector<double> CellLoad(const SparseMatrix &R, const CellField &H);

// A (x) I3: scalar operator applied per vector component.
SparseMatrix KroneckerI3(const SparseMatrix &A);

//
// All bilinear forms needed by the two time integrators.
//
struct AssembledForms
{
  std::vector<double> lumped_weights;  // w(z), omega nodes
  SparseMatrix stiffness;              // scalar K on omega
  SparseMatrix vector_stiffness;       // K (x) I3
  SparseMatrix edge_mass;              // Mx
  SparseMatrix edge_mass_omega;        // Mx weighted by chi_omega
  std::vector<double> cell_volumes;    // My = diag(|c|) I3
  SparseMatrix curl;                   // C
  SparseMatrix curl_curl;              // C^T My^{-1} C
  SparseMatrix coupling;               // R
};

AssembledForms AssembleForms(const EdgeSpace &space);

}  // namespace mllg

#endif  // MLLG_ASSEMBLY_HPP
