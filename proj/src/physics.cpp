// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/physics.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <locale>
#include <map>
#include <sstream>
#include <stdexcept>
#include <fmt/format.h>
#include "mllg/errors.hpp"
#include "mllg/keyvalue.hpp"
#include "mllg/llg_step.hpp"

namespace mllg
{

void MaterialParams::Validate() const
{
  auto fail = [](const std::string &what) { throw ConfigError("material parameters: " + what); };
  if (!(alpha > 0.0))
  {
    fail(fmt::format("alpha must be positive (got {})", alpha));
  }
  if (!(Ce > 0.0))
  {
    fail(fmt::format("Ce must be positive (got {})", Ce));
  }
  if (!(mu0 > 0.0) || !(eps0 > 0.0))
  {
    fail("mu0 and eps0 must be positive");
  }
  if (!(sigma >= 0.0))
  {
    fail(fmt::format("sigma must be non-negative (got {})", sigma));
  }
  if (!(k > 0.0))
  {
    fail(fmt::format("time step must be positive (got {})", k));
  }
  if (!(theta >= 0.0 && theta <= 1.0))
  {
    fail(fmt::format("theta must lie in [0, 1] (got {})", theta));
  }
  if (!(Ca >= 0.0))
  {
    fail("anisotropy Ca must be non-negative");
  }
}

double ExchangeLengthSquared(const RawParameters &raw)
{
  return 2.0 * raw.A / (raw.mu0 * raw.Ms * raw.Ms);
}

MaterialParams DeriveDimensionless(const RawParameters &raw)
{
  auto positive = [](double v, const char *name) {
    if (!(v > 0.0) || !std::isfinite(v))
    {
      throw ConfigError(fmt::format("parameter {} must be positive (got {})", name, v));
    }
  };
  positive(raw.A, "A");
  positive(raw.Ms, "Ms");
  positive(raw.gamma, "gamma");
  positive(raw.mu0, "mu0");
  positive(raw.eps0, "eps0");
  positive(raw.length_scale, "length_scale");
  if (!(raw.sigma >= 0.0))
  {
    throw ConfigError("parameter sigma must be non-negative");
  }
  const double L0 = raw.length_scale;
  const double rate = raw.gamma * raw.Ms;  // 1/s
  MaterialParams p;
  p.alpha = raw.alpha;
  p.Ce = ExchangeLengthSquared(raw) / (L0 * L0);
  p.mu0 = 1.0;
  p.eps0 = raw.mu0 * raw.eps0 * (rate * L0) * (rate * L0);
  p.sigma = raw.sigma * raw.mu0 * rate * L0 * L0;
  p.theta = raw.theta;
  p.k = raw.dt;
  p.Hext = raw.Hext_tesla / (raw.mu0 * raw.Ms);
  p.easy_axis = raw.easy_axis;
  p.Ca = raw.Ca;
  p.time_unit = 1.0 / rate;
  p.length_unit = L0;
  p.field_unit = raw.Ms;
  p.Validate();
  return p;
}

bool SetParameter(RawParameters &raw, const std::string &key, double v)
{
  static const std::map<std::string, double RawParameters::*> scalars = {
      {"alpha", &RawParameters::alpha}, {"A", &RawParameters::A},
      {"Ms", &RawParameters::Ms},       {"gamma", &RawParameters::gamma},
      {"mu0", &RawParameters::mu0},     {"eps0", &RawParameters::eps0},
      {"sigma", &RawParameters::sigma}, {"theta", &RawParameters::theta},
      {"dt", &RawParameters::dt},       {"t_end", &RawParameters::t_end},
      {"Ca", &RawParameters::Ca},       {"length_scale", &RawParameters::length_scale},
  };
  static const std::map<std::string, std::pair<Vec3 RawParameters::*, int>> vectors = {
      {"Hext_x", {&RawParameters::Hext_tesla, 0}}, {"Hext_y", {&RawParameters::Hext_tesla, 1}},
      {"Hext_z", {&RawParameters::Hext_tesla, 2}}, {"axis_x", {&RawParameters::easy_axis, 0}},
      {"axis_y", {&RawParameters::easy_axis, 1}},  {"axis_z", {&RawParameters::easy_axis, 2}},
  };
  if (auto it = scalars.find(key); it != scalars.end())
  {
    raw.*(it->second) = v;
    return true;
  }
  if (auto it = vectors.find(key); it != vectors.end())
  {
    (raw.*(it->second.first))[it->second.second] = v;
    return true;
  }
  return false;
}

RawParameters ParseParameters(std::istream &in)
{
  RawParameters raw;
  for (const auto &kv : ReadKeyValues(in, "parameter file"))
  {
    if (!SetParameter(raw, kv.key, ParseNumber(kv, "parameter file")))
    {
      throw ConfigError(fmt::format("parameter file line {}: unknown key '{}'", kv.line, kv.key));
    }
  }
  return raw;
}

RawParameters ParseParameterFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open parameter file '" + path + "'");
  }
  return ParseParameters(in);
}

NodalField ExternalField::Evaluate(const MagnetizationField &m) const
{
  return PiExternal(m, h_);
}

double ExternalField::Bound(double omega_volume) const
{
  return norm(h_) * std::sqrt(omega_volume);
}

UniaxialAnisotropy::UniaxialAnisotropy(const Vec3 &axis, double Ca) : e_(axis), Ca_(Ca)
{
  if (std::fabs(norm(axis) - 1.0) > 1e-12)
  {
    throw std::invalid_argument("anisotropy axis must have unit length");
  }
  if (!(Ca >= 0.0))
  {
    throw std::invalid_argument("anisotropy constant must be non-negative");
  }
}

NodalField UniaxialAnisotropy::Evaluate(const MagnetizationField &m) const
{
  return PiUniaxial(m, e_, Ca_);
}

double UniaxialAnisotropy::Bound(double omega_volume) const
{
  return Ca_ * std::sqrt(omega_volume);
}

NodalField CombinedField::Evaluate(const MagnetizationField &m) const
{
  NodalField out{std::vector<Vec3>(m.size())};
  for (const auto &p : parts_)
  {
    const auto f = p->Evaluate(m);
    for (std::size_t z = 0; z < m.size(); ++z)
    {
      out.values[z] += f.values[z];
    }
  }
  return out;
}

double CombinedField::Bound(double omega_volume) const
{
  double b = 0.0;
  for (const auto &p : parts_)
  {
    b += p->Bound(omega_volume);
  }
  return b;
}

NodalField PiExternal(const MagnetizationField &m, const Vec3 &Hext)
{
  return {std::vector<Vec3>(m.size(), Hext)};
}

NodalField PiUniaxial(const MagnetizationField &m, const Vec3 &axis, double Ca)
{
  if (std::fabs(norm(axis) - 1.0) > 1e-12)
  {
    throw std::invalid_argument("anisotropy axis must have unit length");
  }
  NodalField out{std::vector<Vec3>(m.size())};
  for (std::size_t z = 0; z < m.size(); ++z)
  {
    out.values[z] = (Ca * dot(axis, m[z])) * axis;
  }
  return out;
}

std::shared_ptr<FieldContribution> MakeFieldContribution(const MaterialParams &p)
{
  auto combined = std::make_shared<CombinedField>();
  combined->Add(std::make_shared<ExternalField>(p.Hext));
  if (p.Ca > 0.0)
  {
    combined->Add(std::make_shared<UniaxialAnisotropy>(p.easy_axis, p.Ca));
  }
  return combined;
}

namespace
{

// (chi_omega m, grad lambda_a) per global node.
std::vector<double> MagnetizationDivergenceLoad(const Mesh &mesh, const NodalField &m)
{
  std::vector<double> load(mesh.NumNodes(), 0.0);
  if (m.values.empty())
  {
    return load;
  }
  for (int c : mesh.OmegaCells())
  {
    const auto &g = mesh.CachedGeometry(c);
    Vec3 mean;
    for (int v : mesh.Tet(c))
    {
      mean += 0.25 * m.values[mesh.OmegaLocal(v)];
    }
    for (int a = 0; a < 4; ++a)
    {
      load[mesh.Tet(c)[a]] += g.volume * dot(mean, g.grads[a]);
    }
  }
  return load;
}

}  // namespace

double MagnetostaticResidual(const Mesh &mesh, const CellField &H, const NodalField &m)
{
  auto r = MagnetizationDivergenceLoad(mesh, m);
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &g = mesh.CachedGeometry(c);
    for (int a = 0; a < 4; ++a)
    {
      r[mesh.Tet(c)[a]] += g.volume * dot(H.values[c], g.grads[a]);
    }
  }
  return NormInf(r);
}

MagnetostaticResult MagnetostaticInit(const Mesh &mesh, const NodalField &m0,
                                      const SolverConfig *cg_config)
{
  if (!m0.values.empty() && m0.size() != static_cast<std::size_t>(mesh.NumOmegaNodes()))
  {
    throw std::invalid_argument("magnetostatic init: m0 does not match omega nodes");
  }
  const int n = mesh.NumNodes();
  // Gauge u(node 0) = 0: unknowns are nodes 1..n-1.
  std::vector<int> index(n);
  for (int i = 0; i < n; ++i)
  {
    index[i] = i - 1;
  }
  std::vector<int> all(mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    all[c] = c;
  }
  const auto K = AssembleP1Stiffness(mesh, all, index, n - 1);
  const auto load = MagnetizationDivergenceLoad(mesh, m0);
  std::vector<double> b(load.begin() + 1, load.end());
  std::vector<double> u(n - 1, 0.0);
  MagnetostaticResult out;
  if (cg_config)
  {
    JacobiPreconditioner pc(K);
    out.report = CgSolve(K, b, u, *cg_config, &pc);
    if (!out.report.converged)
    {
      throw NumericalError(fmt::format("magnetostatic solve did not converge (residual {:.3e})",
                                       out.report.residual_norm));
    }
  }
  else
  {
    SparseDirectSolver solver;
    solver.Factorize(K, SparseDirectSolver::Kind::SymmetricLDLT);
    u = solver.Solve(b);
    auto r = K * u;
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      r[i] -= b[i];
    }
    out.report = {1, Norm2(r), true};
  }
  out.H.values.resize(mesh.NumTets());
  for (int c = 0; c < mesh.NumTets(); ++c)
  {
    const auto &g = mesh.CachedGeometry(c);
    Vec3 grad;
    for (int a = 0; a < 4; ++a)
    {
      const int node = mesh.Tet(c)[a];
      grad += (node == 0 ? 0.0 : u[node - 1]) * g.grads[a];
    }
    out.H.values[c] = -1.0 * grad;
  }
  out.residual = MagnetostaticResidual(mesh, out.H, m0);
  return out;
}

namespace
{

std::vector<double> OmegaXiCoordinate(const Mesh &mesh)
{
  double lo = 1e300, hi = -1e300;
  for (int n : mesh.OmegaNodes())
  {
    lo = std::fmin(lo, mesh.Node(n).x);
    hi = std::fmax(hi, mesh.Node(n).x);
  }
  std::vector<double> xi;
  xi.reserve(mesh.NumOmegaNodes());
  for (int n : mesh.OmegaNodes())
  {
    xi.push_back(hi > lo ? (mesh.Node(n).x - lo) / (hi - lo) : 0.5);
  }
  return xi;
}

}  // namespace

MagnetizationField LinearAngleSeed(const Mesh &mesh, double phi_end)
{
  std::vector<Vec3> m;
  for (double xi : OmegaXiCoordinate(mesh))
  {
    const double phi = phi_end * (2.0 * xi - 1.0);
    m.push_back({std::cos(phi), std::sin(phi), 0.01});
  }
  return MagnetizationField::Normalize(std::move(m));
}

MagnetizationField SStateSeed(const Mesh &mesh, double phi_end)
{
  std::vector<Vec3> m;
  for (double xi : OmegaXiCoordinate(mesh))
  {
    const double s = 2.0 * xi - 1.0;
    const double phi = phi_end * s * s;
    m.push_back({std::cos(phi), std::sin(phi), 0.01});
  }
  return MagnetizationField::Normalize(std::move(m));
}

MagnetizationField UniformField(const Mesh &mesh, const Vec3 &direction)
{
  return MagnetizationField::Normalize(std::vector<Vec3>(mesh.NumOmegaNodes(), direction));
}

RelaxResult RelaxSState(const Mesh &mesh, const AssembledForms &forms, MagnetizationField seed,
                        const MaterialParams &params, const RelaxConfig &config)
{
  if (seed.size() != static_cast<std::size_t>(mesh.NumOmegaNodes()))
  {
    throw std::invalid_argument("relax: seed does not match omega nodes");
  }
  if (config.steps < 0 || !(config.k > 0.0) || !(config.alpha > 0.0))
  {
    throw std::invalid_argument("relax: invalid configuration");
  }
  LlgParams lp{config.alpha, params.Ce, params.theta, config.k};
  RelaxResult out;
  out.m = std::move(seed);
  out.exchange_energy.push_back(GradientNormSquared(forms.stiffness, out.m.AsNodal()));
  for (int step = 0; step < config.steps; ++step)
  {
    TangentSystem sys(forms, out.m, lp);
    const auto sol = sys.Solve(sys.Rhs({}, {}));
    out.m = ProjectUpdate(out.m, sol.v, config.k).m;
    out.exchange_energy.push_back(GradientNormSquared(forms.stiffness, out.m.AsNodal()));
  }
  return out;
}

}  // namespace mllg
