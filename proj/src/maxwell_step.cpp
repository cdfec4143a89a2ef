// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/maxwell_step.hpp"

#include <cmath>
#include <stdexcept>
#include <fmt/format.h>

namespace mllg
{

namespace
{

// Extended-precision refinement passes after the direct Schur solve.
constexpr int kRefinementPasses = 3;

}  // namespace

void MaxwellParams::Validate() const
{
  if (!(eps0 > 0.0) || !(mu0 > 0.0) || !(sigma >= 0.0) || !(k > 0.0))
  {
    throw std::invalid_argument(fmt::format(
        "invalid Maxwell parameters (eps0 = {}, mu0 = {}, sigma = {}, k = {})", eps0, mu0, sigma, k));
  }
}

void GaussSeidelConfig::Validate() const
{
  if (!(tol > 0.0) || max_sweeps < 1)
  {
    throw std::invalid_argument("Gauss-Seidel config needs tol > 0 and max_sweeps >= 1");
  }
}

MaxwellSystem::MaxwellSystem(const EdgeSpace &space, const AssembledForms &forms,
                             const MaxwellParams &params, const MaxwellSolverOptions &options,
                             double c)
  : space_(&space), forms_(&forms), params_(params), options_(options), c_(c)
{
  params_.Validate();
  const double a = c * params.eps0 / params.k;
  const double b = params.k / (c * params.mu0);
  SparseMatrix full = Add(a, forms.edge_mass, b, forms.curl_curl);
  if (params.sigma > 0.0)
  {
    full = Add(1.0, full, params.sigma, forms.edge_mass_omega);
  }
  const auto &free = space.FreeDofs();
  S_ = full.Restrict(free, free);
  if (options_.kind == MaxwellSolverKind::Direct)
  {
    direct_.Factorize(S_, SparseDirectSolver::Kind::SymmetricLDLT);
  }
  else
  {
    options_.cg.Validate();
    jacobi_ = S_.DiagonalEntries();
  }
}

MaxwellSystem MaxwellSystem::ImplicitEuler(const EdgeSpace &space, const AssembledForms &forms,
                                           const MaxwellParams &params,
                                           const MaxwellSolverOptions &options)
{
  return MaxwellSystem(space, forms, params, options, 1.0);
}

MaxwellSystem MaxwellSystem::MidpointHalf(const EdgeSpace &space, const AssembledForms &forms,
                                          const MaxwellParams &params,
                                          const MaxwellSolverOptions &options)
{
  return MaxwellSystem(space, forms, params, options, 2.0);
}

MaxwellSolution MaxwellSystem::Solve(const EdgeField &E, const CellField &H, const NodalField &v,
                                     std::span<const double> J_load) const
{
  const int ndof = space_->NumDofs();
  const int ncell = static_cast<int>(forms_->cell_volumes.size());
  if (static_cast<int>(E.size()) != ndof || static_cast<int>(H.size()) != ncell)
  {
    throw std::invalid_argument("Maxwell solve: field sizes do not match the mesh");
  }
  if (!J_load.empty() && static_cast<int>(J_load.size()) != ndof)
  {
    throw std::invalid_argument("Maxwell solve: current load size mismatch");
  }
  const double a = c_ * params_.eps0 / params_.k;
  const double kc = params_.k / c_;
  const double b = kc / params_.mu0;

  // q = H - (k/c) My^-1 R v  (cellwise), so that rhs = a Mx E - J + C^T q. The right-hand
  // side is kept in extended precision: for small eps the Schur operator is nearly singular
  // on discrete gradients, and the direct solve is refined against it (below).
  const auto Hflat = Flatten(H.values);
  std::vector<long double> q(Hflat.begin(), Hflat.end());
  std::vector<double> Rv;
  if (!v.values.empty())
  {
    Rv = forms_->coupling * Flatten(v.values);
    for (int cc = 0; cc < ncell; ++cc)
    {
      const long double inv = 1.0L / forms_->cell_volumes[cc];
      for (int d = 0; d < 3; ++d)
      {
        q[3 * cc + d] -= static_cast<long double>(kc) * inv * Rv[3 * cc + d];
      }
    }
  }
  std::vector<long double> rhs(ndof, 0.0L);
  {
    const auto &M = forms_->edge_mass;
    for (int i = 0; i < ndof; ++i)
    {
      long double acc = 0.0L;
      for (int p = M.RowOffsets()[i]; p < M.RowOffsets()[i + 1]; ++p)
      {
        acc += static_cast<long double>(M.Values()[p]) * E.values[M.ColIndices()[p]];
      }
      rhs[i] = static_cast<long double>(a) * acc - (J_load.empty() ? 0.0L : J_load[i]);
    }
    // C^T q
    const auto &C = forms_->curl;
    for (int r = 0; r < C.Rows(); ++r)
    {
      for (int p = C.RowOffsets()[r]; p < C.RowOffsets()[r + 1]; ++p)
      {
        rhs[C.ColIndices()[p]] += static_cast<long double>(C.Values()[p]) * q[r];
      }
    }
  }

  const auto &free = space_->FreeDofs();
  std::vector<long double> bf(free.size());
  std::vector<double> xf(free.size());
  for (std::size_t i = 0; i < free.size(); ++i)
  {
    bf[i] = rhs[free[i]];
    xf[i] = E.values[free[i]];
  }
  // r = b - S x with extended accumulation
  auto residual = [&](const std::vector<double> &x) {
    std::vector<long double> r(bf);
    for (int i = 0; i < S_.Rows(); ++i)
    {
      long double acc = 0.0L;
      for (int p = S_.RowOffsets()[i]; p < S_.RowOffsets()[i + 1]; ++p)
      {
        acc += static_cast<long double>(S_.Values()[p]) * x[S_.ColIndices()[p]];
      }
      r[i] -= acc;
    }
    return r;
  };
  auto round = [](const std::vector<long double> &x) { return std::vector<double>(x.begin(), x.end()); };
  MaxwellSolution out;
  if (options_.kind == MaxwellSolverKind::Direct)
  {
    xf = direct_.Solve(round(bf));
    out.report.iterations = 1;
    for (int pass = 0; pass < kRefinementPasses; ++pass)
    {
      const auto dx = direct_.Solve(round(residual(xf)));
      double change = 0.0;
      for (std::size_t i = 0; i < xf.size(); ++i)
      {
        xf[i] += dx[i];
        change = std::fmax(change, std::fabs(dx[i]));
      }
      ++out.report.iterations;
      if (change <= 1e-16 * (NormInf(xf) + 1e-300))
      {
        break;
      }
    }
    out.report.residual_norm = Norm2(round(residual(xf)));
    out.report.converged = std::isfinite(out.report.residual_norm);
  }
  else
  {
    JacobiPreconditioner pc(jacobi_);
    out.report = CgSolve(S_, round(bf), xf, options_.cg, &pc);
  }
  if (!out.report.converged)
  {
    throw NumericalError(fmt::format("Maxwell solve did not converge (residual {:.3e} after {} iterations)",
                                     out.report.residual_norm, out.report.iterations));
  }
  out.E = space_->Zero();
  for (std::size_t i = 0; i < free.size(); ++i)
  {
    out.E.values[free[i]] = xf[i];
  }
  // H_new = H - b My^-1 (C E_new + mu R v)
  const auto CE = forms_->curl * out.E.values;
  std::vector<Vec3> Hn(ncell);
  for (int cc = 0; cc < ncell; ++cc)
  {
    const double inv = 1.0 / forms_->cell_volumes[cc];
    for (int d = 0; d < 3; ++d)
    {
      const double src = CE[3 * cc + d] + (Rv.empty() ? 0.0 : params_.mu0 * Rv[3 * cc + d]);
      Hn[cc][d] = Hflat[3 * cc + d] - b * inv * src;
    }
  }
  out.H.values = std::move(Hn);
  return out;
}

MaxwellSolution StepImplicitEuler(const MaxwellSystem &system, const EdgeField &E,
                                  const CellField &H, const NodalField &v,
                                  std::span<const double> J_load)
{
  if (system.Factor() != 1.0)
  {
    throw std::invalid_argument("implicit Euler step needs an implicit Euler system");
  }
  return system.Solve(E, H, v, J_load);
}

MaxwellSolution MidpointHalfSolve(const MaxwellSystem &system, const EdgeField &E,
                                  const CellField &H, const NodalField &w,
                                  std::span<const double> J_load)
{
  if (system.Factor() != 2.0)
  {
    throw std::invalid_argument("midpoint half solve needs a midpoint system");
  }
  return system.Solve(E, H, w, J_load);
}

std::pair<EdgeField, CellField> RecoverFullStep(const EdgeField &E, const CellField &H,
                                                const EdgeField &F, const CellField &G)
{
  if (E.size() != F.size() || H.size() != G.size())
  {
    throw std::invalid_argument("recover full step: size mismatch");
  }
  EdgeField En{std::vector<double>(E.size())};
  CellField Hn{std::vector<Vec3>(H.size())};
  for (std::size_t i = 0; i < E.size(); ++i)
  {
    En.values[i] = 2.0 * F.values[i] - E.values[i];
  }
  for (std::size_t c = 0; c < H.size(); ++c)
  {
    Hn.values[c] = 2.0 * G.values[c] - H.values[c];
  }
  return {std::move(En), std::move(Hn)};
}

double ElectricEnergy(const AssembledForms &forms, const EdgeField &E, double eps0)
{
  return eps0 * forms.edge_mass.Quadratic(E.values);
}

double ElectricEnergyOmega(const AssembledForms &forms, const EdgeField &E, double eps0)
{
  return eps0 * forms.edge_mass_omega.Quadratic(E.values);
}

double MagneticEnergy(const AssembledForms &forms, const CellField &H, double mu0)
{
  double s = 0.0;
  for (std::size_t c = 0; c < H.size(); ++c)
  {
    s += forms.cell_volumes[c] * dot(H.values[c], H.values[c]);
  }
  return mu0 * s;
}

namespace
{

double MaxDiff(const std::vector<double> &a, const std::vector<double> &b)
{
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    d = std::fmax(d, std::fabs(a[i] - b[i]));
  }
  return d;
}

double MaxDiff(const std::vector<Vec3> &a, const std::vector<Vec3> &b)
{
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    d = std::fmax(d, max_abs(a[i] - b[i]));
  }
  return d;
}

}  // namespace

CoupledStepResult CoupledStepGaussSeidel(const TangentSystem &llg,
                                         std::span<const double> llg_base_rhs,
                                         const MaxwellSystem &midpoint, const EdgeField &E,
                                         const CellField &H, const NodalField &v_prev,
                                         const GaussSeidelConfig &config,
                                         std::span<const double> J_load)
{
  config.Validate();
  CoupledStepResult out;
  out.G = H;
  out.F = E;
  out.v = v_prev.values.empty() ? NodalField{std::vector<Vec3>(llg.M().size())} : v_prev;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep)
  {
    // (a) LLG with the current half-step field
    std::vector<double> rhs(llg_base_rhs.begin(), llg_base_rhs.end());
    const auto load = llg.FieldLoad(out.G);
    for (std::size_t i = 0; i < rhs.size(); ++i)
    {
      rhs[i] += load[i];
    }
    auto sol = llg.Solve(rhs);
    // (b, c) midpoint half solve with w
    auto mw = MidpointHalfSolve(midpoint, E, H, sol.v, J_load);
    const double inc = MaxDiff(sol.v.values, out.v.values) + MaxDiff(mw.H.values, out.G.values) +
                       MaxDiff(mw.E.values, out.F.values);
    out.v = std::move(sol.v);
    out.lambda = std::move(sol.lambda);
    out.F = std::move(mw.E);
    out.G = std::move(mw.H);
    out.sweeps = sweep;
    out.last_increment = inc;
    out.increments.push_back(inc);
    if (inc < config.tol)
    {
      out.converged = true;
      break;
    }
  }
  if (!out.converged)
  {
    throw GaussSeidelError(fmt::format("Gauss-Seidel did not reach tol {:.1e} in {} sweeps (last increment {:.3e})",
                                       config.tol, config.max_sweeps, out.last_increment),
                           out.last_increment);
  }
  std::tie(out.E, out.H) = RecoverFullStep(E, H, out.F, out.G);
  return out;
}

}  // namespace mllg
