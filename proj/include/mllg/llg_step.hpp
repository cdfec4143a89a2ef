// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_LLG_STEP_HPP
#define MLLG_LLG_STEP_HPP

#include <span>
#include <vector>
#include "mllg/assembly.hpp"
#include "mllg/fespace.hpp"
#include "mllg/linalg.hpp"

namespace mllg
{

struct LlgParams
{
  double alpha = 1.0;
  double Ce = 1.0;
  double theta = 1.0;
  double k = 0.05;

  void Validate() const;
};

enum class TangentMethod
{
  Reduced,  // two tangent vectors per node, eliminates the constraint
  Lagrange  // saddle point system with one multiplier row per node
};

// Deterministic orthonormal tangent pair at m: seed with the coordinate axis of the
// smallest |m_d| (lowest index on ties), Gram-Schmidt, then t2 = m x t1.
std::array<Vec3, 2> TangentBasis(const Vec3 &m);

struct TangentSolution
{
  NodalField v;
  std::vector<double> lambda;  // nodal multipliers m(z) . (rhs - A v)_z
  SolveReport report;
};

//
// Tangent-space system for one magnetization: A = alpha M_L + W(m) + theta Ce k K on
// 3 n_omega unknowns, factorized once and reused for any right-hand side.
//
class TangentSystem
{
public:
  TangentSystem(const AssembledForms &forms, const MagnetizationField &m, const LlgParams &params,
                TangentMethod method = TangentMethod::Reduced);

  const SparseMatrix &A() const { return A_; }
  // Constraint rows B (n x 3n), row z = weight(z) m(z)^T.
  SparseMatrix ConstraintRows(std::span<const double> weights = {}) const;
  // -Ce K m + R^T H + M_L pi; H may be empty (zero).
  std::vector<double> Rhs(const CellField &H, const NodalField &pi) const;
  // R^T H alone (the field part of Rhs).
  std::vector<double> FieldLoad(const CellField &H) const;
  TangentSolution Solve(std::span<const double> rhs) const;

  const MagnetizationField &M() const { return m_; }
  TangentMethod Method() const { return method_; }

  // The multiplier rows may be scaled per node; the constrained solution does not
  // depend on the scaling. Refactorizes the saddle system.
  void SetConstraintWeights(std::vector<double> weights);

private:
  void Factorize();

  const AssembledForms *forms_;
  MagnetizationField m_;
  LlgParams params_;
  TangentMethod method_;
  SparseMatrix A_;
  std::vector<std::array<Vec3, 2>> basis_;
  std::vector<double> weights_;
  SparseDirectSolver solver_;
};

// One tangent update v in K_m for the given field term H (cellwise) and pi (nodal).
TangentSolution SolveTangentUpdate(const AssembledForms &forms, const MagnetizationField &m,
                                   const CellField &H, const NodalField &pi,
                                   const LlgParams &params,
                                   TangentMethod method = TangentMethod::Reduced);

// max_z |v(z) . m(z)|
double MaxTangencyDefect(const MagnetizationField &m, const NodalField &v);

struct ProjectionResult
{
  MagnetizationField m;
  double max_tangency_defect = 0.0;
  bool tangency_warning = false;  // defect above 1e-6
  double min_denominator = 1.0;   // min_z |m(z) + k v(z)|
};

// m+(z) = (m(z) + k v(z)) / |m(z) + k v(z)|. Throws NumericalError if some denominator
// drops below 1e-8.
ProjectionResult ProjectUpdate(const MagnetizationField &m, const NodalField &v, double k);

// ||grad u||^2 for a nodal field on omega (sum over components of u_d^T K u_d).
double GradientNormSquared(const SparseMatrix &K, const NodalField &u);
double GradientNormSquared(const SparseMatrix &K, std::span<const double> flat);
// v^T M_L v for the lumped nodal inner product.
double LumpedNormSquared(std::span<const double> weights, const NodalField &v);
double LumpedInner(std::span<const double> weights, const NodalField &a, const NodalField &b);

struct DecayCheck
{
  bool passed = true;
  double slack = 0.0;  // ||grad(m + k v)||^2 - ||grad m_next||^2
};

// ||grad m_next||^2 <= ||grad(m + k v)||^2 + 1e-10.
DecayCheck ExchangeEnergyDecayCheck(const SparseMatrix &K, const MagnetizationField &m,
                                    const NodalField &v, const MagnetizationField &m_next,
                                    double k);

}  // namespace mllg

#endif  // MLLG_LLG_STEP_HPP
