// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/integrator.hpp"

#include <fmt/format.h>
#include "mllg/errors.hpp"

namespace mllg
{

Algorithm ParseAlgorithm(const std::string &name)
{
  if (name == "coupled")
  {
    return Algorithm::Coupled;
  }
  if (name == "decoupled")
  {
    return Algorithm::Decoupled;
  }
  throw ConfigError(fmt::format("unknown algorithm '{}' (expected coupled or decoupled)", name));
}

std::string ToString(Algorithm a)
{
  return a == Algorithm::Coupled ? "coupled" : "decoupled";
}

Integrator::Integrator(const EdgeSpace &space, const AssembledForms &forms,
                       const MaterialParams &params, std::shared_ptr<const FieldContribution> pi,
                       SchemeOptions options)
  : space_(&space), forms_(&forms), params_(params), pi_(std::move(pi)), options_(std::move(options))
{
  params_.Validate();
  if (!pi_)
  {
    pi_ = std::make_shared<CombinedField>();
  }
  if (options_.maxwell_enabled)
  {
    const MaxwellParams mp{params_.eps0, params_.mu0, params_.sigma, params_.k};
    if (options_.algorithm == Algorithm::Decoupled)
    {
      implicit_euler_.emplace(MaxwellSystem::ImplicitEuler(space, forms, mp, options_.maxwell));
    }
    else
    {
      midpoint_.emplace(MaxwellSystem::MidpointHalf(space, forms, mp, options_.maxwell));
    }
  }
}

std::vector<double> Integrator::CurrentLoad(double t) const
{
  if (!options_.current)
  {
    return {};
  }
  const auto &J = options_.current;
  return EdgeLoad(*space_, [&](const Vec3 &x) { return J(x, t); });
}

StepRecord Integrator::Step(State &state) const
{
  const double k = params_.k;
  const LlgParams lp{params_.alpha, params_.Ce, params_.theta, k};
  StepRecord rec;
  rec.m_old = state.m;
  rec.E_old = state.E;
  rec.H_old = state.H;
  rec.pi_used = pi_->Evaluate(state.m);

  TangentSystem llg(*forms_, state.m, lp, options_.tangent);
  if (options_.algorithm == Algorithm::Decoupled || !options_.maxwell_enabled)
  {
    rec.H_used = state.H;
    auto sol = llg.Solve(llg.Rhs(state.H, rec.pi_used));
    rec.v = std::move(sol.v);
    rec.lambda = std::move(sol.lambda);
    if (options_.maxwell_enabled)
    {
      const auto J = CurrentLoad(state.t + k);
      auto mw = StepImplicitEuler(*implicit_euler_, state.E, state.H, rec.v, J);
      state.E = std::move(mw.E);
      state.H = std::move(mw.H);
    }
  }
  else
  {
    const auto base = llg.Rhs({}, rec.pi_used);
    const auto J = CurrentLoad(state.t + 0.5 * k);
    auto res = CoupledStepGaussSeidel(llg, base, *midpoint_, state.E, state.H, state.v_prev,
                                      options_.gauss_seidel, J);
    rec.v = std::move(res.v);
    rec.lambda = std::move(res.lambda);
    rec.sweeps = res.sweeps;
    rec.H_used = std::move(res.G);
    state.E = std::move(res.E);
    state.H = std::move(res.H);
  }
  rec.tangency_defect = MaxTangencyDefect(state.m, rec.v);
  rec.projection = ProjectUpdate(state.m, rec.v, k);
  state.m = rec.projection.m;
  state.v_prev = rec.v;
  state.j += 1;
  state.t = static_cast<double>(state.j) * k;
  return rec;
}

}  // namespace mllg
