// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/llg_step.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <fmt/format.h>
#include "mllg/errors.hpp"

namespace mllg
{

void LlgParams::Validate() const
{
  if (!(alpha > 0.0) || !(Ce > 0.0) || !(k > 0.0) || !(theta >= 0.0 && theta <= 1.0))
  {
    throw std::invalid_argument(fmt::format(
        "invalid LLG parameters (alpha = {}, Ce = {}, k = {}, theta = {})", alpha, Ce, k, theta));
  }
}

std::array<Vec3, 2> TangentBasis(const Vec3 &m)
{
  int axis = 0;
  for (int d = 1; d < 3; ++d)
  {
    if (std::fabs(m[d]) < std::fabs(m[axis]))
    {
      axis = d;
    }
  }
  Vec3 e;
  e[axis] = 1.0;
  const Vec3 t1 = normalized(e - dot(e, m) * m);
  return {t1, cross(m, t1)};
}

TangentSystem::TangentSystem(const AssembledForms &forms, const MagnetizationField &m,
                             const LlgParams &params, TangentMethod method)
  : forms_(&forms), m_(m), params_(params), method_(method)
{
  params_.Validate();
  const std::size_t n = forms.lumped_weights.size();
  if (m.size() != n)
  {
    throw std::invalid_argument("tangent system: magnetization does not match omega nodes");
  }
  if (m.MaxModulusDefect() > 1e-12)
  {
    throw InvariantError(fmt::format("tangent system: magnetization modulus defect {:.3e}",
                                     m.MaxModulusDefect()));
  }
  std::vector<double> lumped3(3 * n);
  for (std::size_t z = 0; z < n; ++z)
  {
    for (int d = 0; d < 3; ++d)
    {
      lumped3[3 * z + d] = params_.alpha * forms.lumped_weights[z];
    }
  }
  A_ = Add(1.0, SparseMatrix::Diagonal(lumped3), 1.0,
           AssembleCrossOperator(forms.lumped_weights, m));
  A_ = Add(1.0, A_, params_.theta * params_.Ce * params_.k, forms.vector_stiffness);
  basis_.resize(n);
  for (std::size_t z = 0; z < n; ++z)
  {
    basis_[z] = TangentBasis(m[z]);
  }
  weights_.assign(n, 1.0);
  Factorize();
}

SparseMatrix TangentSystem::ConstraintRows(std::span<const double> weights) const
{
  const int n = static_cast<int>(m_.size());
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (int z = 0; z < n; ++z)
  {
    const double w = weights.empty() ? 1.0 : weights[z];
    for (int d = 0; d < 3; ++d)
    {
      t.push_back({z, 3 * z + d, w * m_[z][d]});
    }
  }
  return SparseMatrix(n, 3 * n, std::move(t));
}

void TangentSystem::SetConstraintWeights(std::vector<double> weights)
{
  if (weights.size() != m_.size())
  {
    throw std::invalid_argument("constraint weights: size mismatch");
  }
  for (double w : weights)
  {
    if (!(w > 0.0))
    {
      throw std::invalid_argument("constraint weights must be positive");
    }
  }
  weights_ = std::move(weights);
  Factorize();
}

void TangentSystem::Factorize()
{
  const int n = static_cast<int>(m_.size());
  std::vector<Triplet> t;
  if (method_ == TangentMethod::Reduced)
  {
    // Q^T A Q, Q block diagonal with the 3x2 tangent frames as blocks.
    const auto &off = A_.RowOffsets();
    const auto &col = A_.ColIndices();
    const auto &val = A_.Values();
    t.reserve(4 * val.size() / 3 + 4);
    for (int r = 0; r < A_.Rows(); ++r)
    {
      const int z = r / 3, d = r % 3;
      for (int k = off[r]; k < off[r + 1]; ++k)
      {
        const int w = col[k] / 3, e = col[k] % 3;
        for (int p = 0; p < 2; ++p)
        {
          for (int q = 0; q < 2; ++q)
          {
            const double c = val[k] * basis_[z][p][d] * basis_[w][q][e];
            if (c != 0.0)
            {
              t.push_back({2 * z + p, 2 * w + q, c});
            }
          }
        }
      }
    }
    solver_.Factorize(SparseMatrix(2 * n, 2 * n, std::move(t)), SparseDirectSolver::Kind::LU);
  }
  else
  {
    t = A_.ToTriplets();
    for (int z = 0; z < n; ++z)
    {
      for (int d = 0; d < 3; ++d)
      {
        const double b = weights_[z] * m_[z][d];
        t.push_back({3 * n + z, 3 * z + d, b});
        t.push_back({3 * z + d, 3 * n + z, b});
      }
    }
    solver_.Factorize(SparseMatrix(4 * n, 4 * n, std::move(t)), SparseDirectSolver::Kind::LU);
  }
}

std::vector<double> TangentSystem::Rhs(const CellField &H, const NodalField &pi) const
{
  const std::size_t n = m_.size();
  const auto mflat = Flatten(m_.Values());
  std::vector<double> rhs = forms_->vector_stiffness * mflat;
  for (double &r : rhs)
  {
    r *= -params_.Ce;
  }
  if (!H.values.empty())
  {
    const auto load = FieldLoad(H);
    for (std::size_t i = 0; i < rhs.size(); ++i)
    {
      rhs[i] += load[i];
    }
  }
  if (!pi.values.empty())
  {
    if (pi.size() != n)
    {
      throw std::invalid_argument("tangent rhs: pi does not match omega nodes");
    }
    const auto load = LumpedLoad(forms_->lumped_weights, pi);
    for (std::size_t i = 0; i < rhs.size(); ++i)
    {
      rhs[i] += load[i];
    }
  }
  return rhs;
}

std::vector<double> TangentSystem::FieldLoad(const CellField &H) const
{
  if (H.size() != forms_->cell_volumes.size())
  {
    throw std::invalid_argument("tangent rhs: cell field does not match the mesh");
  }
  return CellLoad(forms_->coupling, H);
}

TangentSolution TangentSystem::Solve(std::span<const double> rhs) const
{
  const std::size_t n = m_.size();
  if (rhs.size() != 3 * n)
  {
    throw std::invalid_argument("tangent solve: rhs size mismatch");
  }
  TangentSolution out;
  out.v.values.assign(n, Vec3{});
  if (method_ == TangentMethod::Reduced)
  {
    std::vector<double> r(2 * n);
    for (std::size_t z = 0; z < n; ++z)
    {
      const Vec3 b{rhs[3 * z], rhs[3 * z + 1], rhs[3 * z + 2]};
      r[2 * z] = dot(basis_[z][0], b);
      r[2 * z + 1] = dot(basis_[z][1], b);
    }
    const auto c = solver_.Solve(r);
    for (std::size_t z = 0; z < n; ++z)
    {
      out.v.values[z] = c[2 * z] * basis_[z][0] + c[2 * z + 1] * basis_[z][1];
    }
  }
  else
  {
    std::vector<double> r(4 * n, 0.0);
    std::copy(rhs.begin(), rhs.end(), r.begin());
    const auto x = solver_.Solve(r);
    for (std::size_t z = 0; z < n; ++z)
    {
      out.v.values[z] = {x[3 * z], x[3 * z + 1], x[3 * z + 2]};
    }
  }
  // Multipliers and the tangential residual.
  const auto vflat = Flatten(out.v.values);
  const auto Av = A_ * vflat;
  out.lambda.resize(n);
  double res = 0.0;
  for (std::size_t z = 0; z < n; ++z)
  {
    const Vec3 r{rhs[3 * z] - Av[3 * z], rhs[3 * z + 1] - Av[3 * z + 1], rhs[3 * z + 2] - Av[3 * z + 2]};
    out.lambda[z] = dot(m_[z], r);
    const Vec3 rt = r - out.lambda[z] * m_[z];
    res += dot(rt, rt);
  }
  out.report.residual_norm = std::sqrt(res);
  out.report.iterations = 1;
  out.report.converged = std::isfinite(out.report.residual_norm);
  if (!out.report.converged)
  {
    throw NumericalError("tangent solve produced non-finite values");
  }
  return out;
}

TangentSolution SolveTangentUpdate(const AssembledForms &forms, const MagnetizationField &m,
                                   const CellField &H, const NodalField &pi,
                                   const LlgParams &params, TangentMethod method)
{
  TangentSystem sys(forms, m, params, method);
  return sys.Solve(sys.Rhs(H, pi));
}

double MaxTangencyDefect(const MagnetizationField &m, const NodalField &v)
{
  double d = 0.0;
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    d = std::fmax(d, std::fabs(dot(m[z], v.values[z])));
  }
  return d;
}

ProjectionResult ProjectUpdate(const MagnetizationField &m, const NodalField &v, double k)
{
  if (m.size() != v.size())
  {
    throw std::invalid_argument("projection: size mismatch");
  }
  ProjectionResult out;
  out.max_tangency_defect = MaxTangencyDefect(m, v);
  out.tangency_warning = out.max_tangency_defect > 1e-6;
  std::vector<Vec3> next(m.size());
  out.min_denominator = m.size() ? std::numeric_limits<double>::infinity() : 1.0;
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    const Vec3 u = m[z] + k * v.values[z];
    const double len = norm(u);
    if (!(len >= 1e-8))
    {
      throw NumericalError(fmt::format("projection: |m + k v| = {:.3e} at node {}", len, z));
    }
    out.min_denominator = std::fmin(out.min_denominator, len);
    next[z] = u / len;
  }
  out.m = MagnetizationField(std::move(next));
  return out;
}

double GradientNormSquared(const SparseMatrix &K, std::span<const double> flat)
{
  const std::size_t n = K.Rows();
  std::vector<double> c(n);
  double s = 0.0;
  for (int d = 0; d < 3; ++d)
  {
    for (std::size_t z = 0; z < n; ++z)
    {
      c[z] = flat[3 * z + d];
    }
    s += K.Quadratic(c);
  }
  return s;
}

double GradientNormSquared(const SparseMatrix &K, const NodalField &u)
{
  return GradientNormSquared(K, Flatten(u.values));
}

double LumpedInner(std::span<const double> weights, const NodalField &a, const NodalField &b)
{
  double s = 0.0;
  for (std::size_t z = 0; z < weights.size(); ++z)
  {
    s += weights[z] * dot(a.values[z], b.values[z]);
  }
  return s;
}

double LumpedNormSquared(std::span<const double> weights, const NodalField &v)
{
  return LumpedInner(weights, v, v);
}

DecayCheck ExchangeEnergyDecayCheck(const SparseMatrix &K, const MagnetizationField &m,
                                    const NodalField &v, const MagnetizationField &m_next,
                                    double k)
{
  std::vector<Vec3> u(m.size());
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    u[z] = m[z] + k * v.values[z];
  }
  DecayCheck out;
  const double before = GradientNormSquared(K, NodalField{u});
  const double after = GradientNormSquared(K, m_next.AsNodal());
  out.slack = before - after;
  out.passed = after <= before + 1e-10;
  return out;
}

}  // namespace mllg
