// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/diagnostics.hpp"

#include <cmath>
#include <istream>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <fmt/format.h>
#include "mllg/llg_step.hpp"
#include "mllg/maxwell_step.hpp"

namespace mllg
{

Vec3 AverageMagnetization(const Mesh &mesh, const NodalField &m)
{
  Vec3 s;
  double vol = 0.0;
  for (int c : mesh.OmegaCells())
  {
    const double q = 0.25 * mesh.CachedGeometry(c).volume;
    for (int v : mesh.Tet(c))
    {
      s += q * m.values[mesh.OmegaLocal(v)];
    }
    vol += mesh.CachedGeometry(c).volume;
  }
  return s / vol;
}

EnergyTracker::EnergyTracker(const AssembledForms &forms, const MaterialParams &params,
                             const FieldContribution &pi)
  : forms_(&forms), params_(params), pi_(&pi)
{
}

EnergyTraceRow EnergyTracker::Row(const State &state) const
{
  EnergyTraceRow r;
  r.t = state.t;
  r.grad_m2 = GradientNormSquared(forms_->stiffness, state.m.AsNodal());
  r.k_sum_v2 = k_sum_v2_;
  r.H2 = MagneticEnergy(*forms_, state.H, 1.0);
  r.E2 = ElectricEnergy(*forms_, state.E, 1.0);
  r.theta_term = (params_.theta - 0.5) * params_.k * params_.k * sum_grad_v2_;
  r.increments = increments_;
  r.E_energy = params_.eps0 * r.E2;
  r.H_energy = params_.mu0 * r.H2;
  const auto pim = pi_->Evaluate(state.m);
  r.remark_energy = params_.mu0 * params_.Ce * r.grad_m2 + r.H_energy +
                    ElectricEnergyOmega(*forms_, state.E, params_.eps0) -
                    params_.mu0 * LumpedInner(forms_->lumped_weights, pim, state.m.AsNodal());
  return r;
}

EnergyTraceRow EnergyTracker::Start(const State &state)
{
  k_sum_v2_ = sum_grad_v2_ = increments_ = 0.0;
  rows_.clear();
  rows_.push_back(Row(state));
  return rows_.back();
}

EnergyTraceRow EnergyTracker::Record(const StepRecord &step, const State &state)
{
  k_sum_v2_ += params_.k * LumpedNormSquared(forms_->lumped_weights, step.v);
  sum_grad_v2_ += GradientNormSquared(forms_->stiffness, step.v);
  CellField dH{std::vector<Vec3>(state.H.size())};
  for (std::size_t c = 0; c < state.H.size(); ++c)
  {
    dH.values[c] = state.H.values[c] - step.H_old.values[c];
  }
  EdgeField dE{std::vector<double>(state.E.size())};
  for (std::size_t i = 0; i < state.E.size(); ++i)
  {
    dE.values[i] = state.E.values[i] - step.E_old.values[i];
  }
  increments_ += MagneticEnergy(*forms_, dH, 1.0) + ElectricEnergy(*forms_, dE, 1.0);
  rows_.push_back(Row(state));
  return rows_.back();
}

InequalityReport PerStepInequality(const AssembledForms &forms, const MagnetizationField &m,
                                   const NodalField &v, const MagnetizationField &m_next,
                                   const CellField &H, const NodalField &pi,
                                   const MaterialParams &params)
{
  const double k = params.k;
  const double lhs = 0.5 * GradientNormSquared(forms.stiffness, m_next.AsNodal());
  const double grad_m = 0.5 * GradientNormSquared(forms.stiffness, m.AsNodal());
  const double theta_term = (params.theta - 0.5) * k * k * GradientNormSquared(forms.stiffness, v);
  const double damping = params.alpha * k / params.Ce * LumpedNormSquared(forms.lumped_weights, v);
  double field = 0.0;
  if (!H.values.empty())
  {
    const auto load = CellLoad(forms.coupling, H);
    field += Dot(load, Flatten(v.values));
  }
  if (!pi.values.empty())
  {
    field += LumpedInner(forms.lumped_weights, pi, v);
  }
  field *= k / params.Ce;
  InequalityReport r;
  r.slack = grad_m - theta_term - damping + field - lhs;
  r.scale = 1.0 + grad_m + std::fabs(theta_term) + damping + std::fabs(field);
  r.passed = r.slack >= -1e-9 * r.scale;
  return r;
}

double LumpedIncrementSlack(std::span<const double> weights, const MagnetizationField &m,
                            const MagnetizationField &m_next, const NodalField &v, double k)
{
  NodalField dm{std::vector<Vec3>(m.size())};
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    dm.values[z] = m_next[z] - m[z];
  }
  return k * std::sqrt(LumpedNormSquared(weights, v)) - std::sqrt(LumpedNormSquared(weights, dm));
}

double AbelIdentityResidual(const std::vector<std::vector<double>> &u)
{
  if (u.empty())
  {
    return 0.0;
  }
  double lhs = 0.0, jumps = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i)
  {
    for (std::size_t d = 0; d < u[i].size(); ++d)
    {
      const double du = u[i][d] - u[i - 1][d];
      lhs += du * u[i][d];
      jumps += du * du;
    }
  }
  const double rhs = 0.5 * Dot(u.back(), u.back()) - 0.5 * Dot(u.front(), u.front()) + 0.5 * jumps;
  return lhs - rhs;
}

std::vector<double> ReconstructInTime(const std::vector<std::vector<double>> &history, double k,
                                      double t, TimeMode mode)
{
  if (history.empty())
  {
    throw std::out_of_range("empty history");
  }
  const std::size_t N = history.size() - 1;
  const double T = static_cast<double>(N) * k;
  if (!(t >= 0.0 && t <= T * (1.0 + 1e-14)))
  {
    throw std::out_of_range(fmt::format("time {} outside [0, {}]", t, T));
  }
  if (N == 0)
  {
    return history[0];
  }
  // interval [t_j, t_{j+1}] containing t; interior nodes t_j belong to interval j for
  // Minus, to interval j - 1 for Plus.
  const double s = t / k;
  std::size_t j = static_cast<std::size_t>(std::floor(s));
  const bool at_node = std::fabs(s - std::round(s)) <= 1e-12 * std::fmax(1.0, s);
  if (at_node)
  {
    const std::size_t n = static_cast<std::size_t>(std::llround(s));
    if (mode == TimeMode::Affine || mode == TimeMode::Minus || mode == TimeMode::Plus)
    {
      if (mode == TimeMode::Minus && n == N)
      {
        return history[N];
      }
      if (mode == TimeMode::Plus && n == 0)
      {
        return history[0];
      }
      return history[n];
    }
    j = std::min(n, N - 1);
  }
  j = std::min(j, N - 1);
  const double theta = s - static_cast<double>(j);
  const auto &a = history[j];
  const auto &b = history[j + 1];
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    switch (mode)
    {
    case TimeMode::Affine:
      out[i] = (1.0 - theta) * a[i] + theta * b[i];
      break;
    case TimeMode::Minus:
      out[i] = a[i];
      break;
    case TimeMode::Plus:
      out[i] = b[i];
      break;
    case TimeMode::Bar:
      out[i] = 0.5 * (a[i] + b[i]);
      break;
    }
  }
  return out;
}

double MidpointExactnessResidual(const std::vector<std::vector<double>> &history,
                                 const std::vector<std::vector<double>> &weights, double k)
{
  if (history.size() < 2 || weights.size() + 1 < history.size())
  {
    throw std::invalid_argument("midpoint exactness: need N+1 states and N weights");
  }
  const double gp = 0.5 / std::sqrt(3.0);
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < history.size(); ++j)
  {
    const double t0 = static_cast<double>(j) * k;
    const auto bar = ReconstructInTime(history, k, t0 + 0.5 * k, TimeMode::Bar);
    const auto a1 = ReconstructInTime(history, k, t0 + (0.5 - gp) * k, TimeMode::Affine);
    const auto a2 = ReconstructInTime(history, k, t0 + (0.5 + gp) * k, TimeMode::Affine);
    const double ibar = k * Dot(bar, weights[j]);
    const double iaff = 0.5 * k * (Dot(a1, weights[j]) + Dot(a2, weights[j]));
    worst = std::fmax(worst, std::fabs(ibar - iaff));
  }
  return worst;
}

const char *CsvHeader()
{
  return "t,m_avg_x,m_avg_y,m_avg_z,exch_energy,E_energy,H_energy,remark_energy,gs_sweeps,slack_min";
}

std::string FormatCsvRow(const CsvRow &r)
{
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g}", r.t,
                     r.m_avg.x, r.m_avg.y, r.m_avg.z, r.exch_energy, r.E_energy, r.H_energy,
                     r.remark_energy, r.gs_sweeps, r.slack_min);
}

std::vector<CsvRow> ReadCsv(std::istream &in)
{
  std::string line;
  if (!std::getline(in, line) || line != CsvHeader())
  {
    throw std::runtime_error("CSV: missing or unexpected header");
  }
  std::vector<CsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line))
  {
    ++line_no;
    if (line.empty())
    {
      continue;
    }
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    std::vector<double> vals;
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
      std::istringstream cs(cell);
      cs.imbue(std::locale::classic());
      double v = 0.0;
      cs >> v;
      if (cs.fail())
      {
        throw std::runtime_error(fmt::format("CSV line {}: malformed value '{}'", line_no, cell));
      }
      vals.push_back(v);
    }
    if (vals.size() != 10)
    {
      throw std::runtime_error(fmt::format("CSV line {}: expected 10 columns, got {}", line_no, vals.size()));
    }
    CsvRow r;
    r.t = vals[0];
    r.m_avg = {vals[1], vals[2], vals[3]};
    r.exch_energy = vals[4];
    r.E_energy = vals[5];
    r.H_energy = vals[6];
    r.remark_energy = vals[7];
    r.gs_sweeps = static_cast<int>(vals[8]);
    r.slack_min = vals[9];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace mllg
