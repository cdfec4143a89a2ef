// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_MAXWELL_STEP_HPP
#define MLLG_MAXWELL_STEP_HPP

#include <span>
#include <vector>
#include "mllg/assembly.hpp"
#include "mllg/errors.hpp"
#include "mllg/fespace.hpp"
#include "mllg/linalg.hpp"
#include "mllg/llg_step.hpp"

namespace mllg
{

struct MaxwellParams
{
  double eps0 = 1.0;
  double mu0 = 1.0;
  double sigma = 0.0;
  double k = 0.05;

  void Validate() const;
};

enum class MaxwellSolverKind
{
  Direct,  // sparse LDL^T, factorized once
  Cg       // Jacobi preconditioned CG warm-started from the previous field
};

struct MaxwellSolverOptions
{
  MaxwellSolverKind kind = MaxwellSolverKind::Direct;
  SolverConfig cg;
};

struct MaxwellSolution
{
  EdgeField E;
  CellField H;
  SolveReport report;
};

//
// One linear Maxwell solve with H eliminated through the diagonal cell mass:
//   S = c eps/k Mx + sigma Mx_omega + k/(c mu) C^T My^-1 C   on the free edge dofs,
// with c = 1 for the implicit Euler step and c = 2 for the midpoint half step.
//
class MaxwellSystem
{
public:
  static MaxwellSystem ImplicitEuler(const EdgeSpace &space, const AssembledForms &forms,
                                     const MaxwellParams &params,
                                     const MaxwellSolverOptions &options = {});
  static MaxwellSystem MidpointHalf(const EdgeSpace &space, const AssembledForms &forms,
                                    const MaxwellParams &params,
                                    const MaxwellSolverOptions &options = {});

  // Schur operator restricted to the free dofs.
  const SparseMatrix &Schur() const { return S_; }
  const std::vector<int> &FreeDofs() const { return space_->FreeDofs(); }
  double Factor() const { return c_; }
  const MaxwellParams &Params() const { return params_; }

  // Solves for (E_new, H_new); v is the nodal magnetization rate on omega (empty = 0), J
  // the edge load (J, psi) (empty = 0).
  MaxwellSolution Solve(const EdgeField &E, const CellField &H, const NodalField &v,
                        std::span<const double> J_load = {}) const;

private:
  MaxwellSystem(const EdgeSpace &space, const AssembledForms &forms, const MaxwellParams &params,
                const MaxwellSolverOptions &options, double c);

  const EdgeSpace *space_;
  const AssembledForms *forms_;
  MaxwellParams params_;
  MaxwellSolverOptions options_;
  double c_;
  SparseMatrix S_;
  SparseDirectSolver direct_;
  std::vector<double> jacobi_;
};

// Implicit Euler step: eps Mx (E+ - E)/k + sigma Mx_omega E+ - C^T H+ = -J,
// mu My (H+ - H)/k + C E+ = -mu R v.
MaxwellSolution StepImplicitEuler(const MaxwellSystem &system, const EdgeField &E,
                                  const CellField &H, const NodalField &v,
                                  std::span<const double> J_load = {});
// Midpoint half solve for F ~ E^{j+1/2}, G ~ H^{j+1/2} with rate w.
MaxwellSolution MidpointHalfSolve(const MaxwellSystem &system, const EdgeField &E,
                                  const CellField &H, const NodalField &w,
                                  std::span<const double> J_load = {});
// E+ = 2F - E, H+ = 2G - H.
std::pair<EdgeField, CellField> RecoverFullStep(const EdgeField &E, const CellField &H,
                                                const EdgeField &F, const CellField &G);

// eps ||E||^2 and mu ||H||^2 with the exact (edge/cell) masses; weighted by the
// parameters given.
double ElectricEnergy(const AssembledForms &forms, const EdgeField &E, double eps0);
double ElectricEnergyOmega(const AssembledForms &forms, const EdgeField &E, double eps0);
double MagneticEnergy(const AssembledForms &forms, const CellField &H, double mu0);

struct GaussSeidelConfig
{
  double tol = 1e-8;
  int max_sweeps = 200;

  void Validate() const;
};

class GaussSeidelError : public NumericalError
{
public:
  GaussSeidelError(const std::string &what, double increment)
    : NumericalError(what), last_increment(increment)
  {
  }
  double last_increment;
};

struct CoupledStepResult
{
  NodalField v;  // w at the last sweep
  EdgeField E, F;
  CellField H, G;
  std::vector<double> lambda;
  int sweeps = 0;
  bool converged = false;
  double last_increment = 0.0;
  std::vector<double> increments;  // per sweep
};

// Block Gauss-Seidel for the coupled midpoint step: LLG with G^{l-1} (plus the fixed
// part of the right-hand side), then the midpoint half solve with w^l, until
// ||dw||_inf + ||dG||_inf + ||dF||_inf < tol. Starts from G = H, F = E, w = v_prev.
// Throws GaussSeidelError when max_sweeps is exhausted.
CoupledStepResult CoupledStepGaussSeidel(const TangentSystem &llg, std::span<const double> llg_base_rhs,
                                         const MaxwellSystem &midpoint, const EdgeField &E,
                                         const CellField &H, const NodalField &v_prev,
                                         const GaussSeidelConfig &config,
                                         std::span<const double> J_load = {});

}  // namespace mllg

#endif  // MLLG_MAXWELL_STEP_HPP
