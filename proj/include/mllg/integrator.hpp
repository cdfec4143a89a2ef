// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_INTEGRATOR_HPP
#define MLLG_INTEGRATOR_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include "mllg/assembly.hpp"
#include "mllg/fespace.hpp"
#include "mllg/llg_step.hpp"
#include "mllg/maxwell_step.hpp"
#include "mllg/physics.hpp"

namespace mllg
{

// Discrete unknowns at time level j.
struct State
{
  MagnetizationField m;
  EdgeField E;
  CellField H;
  NodalField v_prev;  // rate of the previous step (empty before the first)
  double t = 0.0;
  long j = 0;
};

enum class Algorithm
{
  Coupled,   // midpoint Maxwell coupled to LLG, block Gauss-Seidel
  Decoupled  // LLG, then implicit Euler Maxwell
};

Algorithm ParseAlgorithm(const std::string &name);
std::string ToString(Algorithm a);

// Current density J(x, t); the edge load is sampled at t_{j+1} (decoupled) or
// t_{j+1/2} (coupled).
using CurrentDensity = std::function<Vec3(const Vec3 &, double)>;

struct SchemeOptions
{
  Algorithm algorithm = Algorithm::Decoupled;
  TangentMethod tangent = TangentMethod::Reduced;
  MaxwellSolverOptions maxwell;
  GaussSeidelConfig gauss_seidel;
  bool maxwell_enabled = true;  // false freezes E and H
  CurrentDensity current;       // empty = no current
};

// Everything a step produces besides the new state.
struct StepRecord
{
  MagnetizationField m_old;
  NodalField v;
  CellField H_used;  // field term of the LLG solve (H^j or G)
  NodalField pi_used;
  std::vector<double> lambda;
  int sweeps = 0;
  double tangency_defect = 0.0;
  ProjectionResult projection;
  EdgeField E_old;
  CellField H_old;
};

class Integrator
{
public:
  Integrator(const EdgeSpace &space, const AssembledForms &forms, const MaterialParams &params,
             std::shared_ptr<const FieldContribution> pi, SchemeOptions options);

  // Advances state by one step and returns the step data.
  StepRecord Step(State &state) const;

  const MaterialParams &Params() const { return params_; }
  const SchemeOptions &Options() const { return options_; }
  const FieldContribution &Pi() const { return *pi_; }

private:
  std::vector<double> CurrentLoad(double t) const;

  const EdgeSpace *space_;
  const AssembledForms *forms_;
  MaterialParams params_;
  std::shared_ptr<const FieldContribution> pi_;
  SchemeOptions options_;
  std::optional<MaxwellSystem> implicit_euler_, midpoint_;
};

}  // namespace mllg

#endif  // MLLG_INTEGRATOR_HPP
