// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "mllg/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include "mllg/errors.hpp"
#include "mllg/io.hpp"
#include "mllg/keyvalue.hpp"

namespace mllg
{

namespace
{

constexpr const char *kWhat = "config";

std::string Resolve(const std::string &base_dir, const std::string &path)
{
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute())
  {
    return path;
  }
  return (std::filesystem::path(base_dir) / path).string();
}

bool ParseBool(const KeyValue &kv)
{
  if (kv.value == "on" || kv.value == "yes" || kv.value == "true" || kv.value == "1")
  {
    return true;
  }
  if (kv.value == "off" || kv.value == "no" || kv.value == "false" || kv.value == "0")
  {
    return false;
  }
  throw ConfigError(fmt::format("config line {}: '{}' expects on/off (got '{}')", kv.line, kv.key, kv.value));
}

std::string Num(double x)
{
  return fmt::format("{}", x);
}

const char *ToString(InitialMagnetization i)
{
  switch (i)
  {
    case InitialMagnetization::SState:
      return "s-state";
    case InitialMagnetization::Uniform:
      return "uniform";
    case InitialMagnetization::Restart:
      return "restart";
  }
  return "s-state";
}

}  // namespace

void RunConfig::Validate() const
{
  if (!(material.dt > 0.0))
  {
    throw ConfigError(fmt::format("dt must be positive (got {})", material.dt));
  }
  if (!(material.t_end >= material.dt * (1.0 - 1e-12)))
  {
    throw ConfigError(fmt::format("t_end must be at least dt (got t_end {} with dt {})", material.t_end,
                                  material.dt));
  }
  if (sample_stride < 1)
  {
    throw ConfigError("sample_stride must be at least 1");
  }
  if (snapshot_every < 0)
  {
    throw ConfigError("snapshot_every must be non-negative");
  }
  if (initial == InitialMagnetization::Restart && restart_file.empty())
  {
    throw ConfigError("initial = restart needs restart_file");
  }
  if (mesh_file.empty())
  {
    for (int d = 0; d < 3; ++d)
    {
      if (box_cells[d] < 1 || !(box_extent[d] > 0.0))
      {
        throw ConfigError("box extents and cell counts must be positive");
      }
      if (!(omega_lo[d] < omega_hi[d]) || omega_lo[d] < 0.0 || omega_hi[d] > box_extent[d])
      {
        throw ConfigError("omega box must be non-empty and inside the domain box");
      }
    }
  }
  if (initial == InitialMagnetization::Uniform && norm(initial_direction) == 0.0)
  {
    throw ConfigError("initial direction must be non-zero");
  }
  if (relax.steps < 0 || !(relax.k > 0.0) || !(relax.alpha > 0.0))
  {
    throw ConfigError("relax_steps must be non-negative, relax_dt and relax_alpha positive");
  }
  try
  {
    gauss_seidel.Validate();
    cg.Validate();
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(e.what());
  }
}

long RunConfig::NumSteps() const
{
  return std::lround(material.t_end / material.dt);
}

RunConfig ParseRunConfig(std::istream &in, const std::string &base_dir, const RunConfig &defaults)
{
  RunConfig c = defaults;
  const auto kvs = ReadKeyValues(in, kWhat);
  // The material file first, so inline keys override it wherever they appear.
  for (const auto &kv : kvs)
  {
    if (kv.key == "material")
    {
      c.material = ParseParameterFile(Resolve(base_dir, kv.value));
    }
  }
  auto vec_key = [](const std::string &key, const std::string &stem) -> int {
    for (int d = 0; d < 3; ++d)
    {
      if (key == stem + "xyz"[d])
      {
        return d;
      }
    }
    return -1;
  };
  for (const auto &kv : kvs)
  {
    const std::string &k = kv.key;
    int d = -1;
    if (k == "material")
    {
      continue;
    }
    else if (k == "algorithm")
    {
      c.algorithm = ParseAlgorithm(kv.value);
    }
    else if (k == "tangent")
    {
      if (kv.value == "reduced")
        c.tangent = TangentMethod::Reduced;
      else if (kv.value == "lagrange")
        c.tangent = TangentMethod::Lagrange;
      else
        throw ConfigError(fmt::format("config line {}: tangent must be reduced or lagrange", kv.line));
    }
    else if (k == "mesh_file")
    {
      c.mesh_file = Resolve(base_dir, kv.value);
    }
    else if ((d = vec_key(k, "box_")) >= 0)
    {
      c.box_extent[d] = ParseNumber(kv, kWhat);
    }
    else if ((d = vec_key(k, "cells_")) >= 0)
    {
      c.box_cells[d] = ParseInteger(kv, kWhat);
    }
    else if ((d = vec_key(k, "omega_lo_")) >= 0)
    {
      c.omega_lo[d] = ParseNumber(kv, kWhat);
    }
    else if ((d = vec_key(k, "omega_hi_")) >= 0)
    {
      c.omega_hi[d] = ParseNumber(kv, kWhat);
    }
    else if (k == "gs_tol")
    {
      c.gauss_seidel.tol = ParseNumber(kv, kWhat);
    }
    else if (k == "gs_max_sweeps")
    {
      c.gauss_seidel.max_sweeps = ParseInteger(kv, kWhat);
    }
    else if (k == "maxwell_solver")
    {
      if (kv.value == "direct")
        c.maxwell_solver = MaxwellSolverKind::Direct;
      else if (kv.value == "cg")
        c.maxwell_solver = MaxwellSolverKind::Cg;
      else
        throw ConfigError(fmt::format("config line {}: maxwell_solver must be direct or cg", kv.line));
    }
    else if (k == "cg_rtol")
    {
      c.cg.relative_tolerance = ParseNumber(kv, kWhat);
    }
    else if (k == "cg_atol")
    {
      c.cg.absolute_tolerance = ParseNumber(kv, kWhat);
    }
    else if (k == "cg_max_iterations")
    {
      c.cg.max_iterations = ParseInteger(kv, kWhat);
    }
    else if (k == "maxwell")
    {
      c.maxwell = ParseBool(kv);
    }
    else if (k == "initial")
    {
      if (kv.value == "s-state")
        c.initial = InitialMagnetization::SState;
      else if (kv.value == "uniform")
        c.initial = InitialMagnetization::Uniform;
      else if (kv.value == "restart")
        c.initial = InitialMagnetization::Restart;
      else
        throw ConfigError(
            fmt::format("config line {}: initial must be s-state, uniform or restart", kv.line));
    }
    else if ((d = vec_key(k, "initial_")) >= 0)
    {
      c.initial_direction[d] = ParseNumber(kv, kWhat);
    }
    else if (k == "relax_steps")
    {
      c.relax.steps = ParseInteger(kv, kWhat);
    }
    else if (k == "relax_dt")
    {
      c.relax.k = ParseNumber(kv, kWhat);
    }
    else if (k == "relax_alpha")
    {
      c.relax.alpha = ParseNumber(kv, kWhat);
    }
    else if (k == "restart_file")
    {
      c.restart_file = Resolve(base_dir, kv.value);
    }
    else if (k == "output_dir")
    {
      c.output_dir = kv.value;
    }
    else if (k == "sample_stride")
    {
      c.sample_stride = ParseInteger(kv, kWhat);
    }
    else if (k == "snapshot_every")
    {
      c.snapshot_every = ParseInteger(kv, kWhat);
    }
    else if (k == "save_final_state")
    {
      c.save_final_state = ParseBool(kv);
    }
    else if (!SetParameter(c.material, k, ParseNumber(kv, kWhat)))
    {
      throw ConfigError(fmt::format("config line {}: unknown key '{}'", kv.line, k));
    }
  }
  c.Validate();
  return c;
}

RunConfig ParseRunConfigFile(const std::string &path, const RunConfig &defaults)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return ParseRunConfig(in, std::filesystem::path(path).parent_path().string(), defaults);
}

std::string FormatRunConfig(const RunConfig &c)
{
  std::ostringstream o;
  auto line = [&](const std::string &k, const std::string &v) { o << k << " = " << v << '\n'; };
  auto vec = [&](const std::string &stem, const Vec3 &v) {
    for (int d = 0; d < 3; ++d)
    {
      line(stem + "xyz"[d], Num(v[d]));
    }
  };
  o << "# scheme\n";
  line("algorithm", ToString(c.algorithm));
  line("tangent", c.tangent == TangentMethod::Reduced ? "reduced" : "lagrange");
  line("gs_tol", Num(c.gauss_seidel.tol));
  line("gs_max_sweeps", std::to_string(c.gauss_seidel.max_sweeps));
  line("maxwell", c.maxwell ? "on" : "off");
  line("maxwell_solver", c.maxwell_solver == MaxwellSolverKind::Direct ? "direct" : "cg");
  line("cg_rtol", Num(c.cg.relative_tolerance));
  line("cg_atol", Num(c.cg.absolute_tolerance));
  line("cg_max_iterations", std::to_string(c.cg.max_iterations));
  o << "# mesh (lengths in units of length_scale)\n";
  if (!c.mesh_file.empty())
  {
    line("mesh_file", c.mesh_file);
  }
  vec("box_", c.box_extent);
  for (int d = 0; d < 3; ++d)
  {
    line(std::string("cells_") + "xyz"[d], std::to_string(c.box_cells[d]));
  }
  vec("omega_lo_", c.omega_lo);
  vec("omega_hi_", c.omega_hi);
  o << "# material (SI; Hext in Tesla; dt and t_end in units of 1/(gamma Ms))\n";
  const auto &m = c.material;
  line("alpha", Num(m.alpha));
  line("A", Num(m.A));
  line("Ms", Num(m.Ms));
  line("gamma", Num(m.gamma));
  line("mu0", Num(m.mu0));
  line("eps0", Num(m.eps0));
  line("sigma", Num(m.sigma));
  line("theta", Num(m.theta));
  line("dt", Num(m.dt));
  line("t_end", Num(m.t_end));
  vec("Hext_", m.Hext_tesla);
  line("length_scale", Num(m.length_scale));
  vec("axis_", m.easy_axis);
  line("Ca", Num(m.Ca));
  o << "# initial data\n";
  line("initial", ToString(c.initial));
  vec("initial_", c.initial_direction);
  line("relax_steps", std::to_string(c.relax.steps));
  line("relax_dt", Num(c.relax.k));
  line("relax_alpha", Num(c.relax.alpha));
  if (!c.restart_file.empty())
  {
    line("restart_file", c.restart_file);
  }
  o << "# output\n";
  line("output_dir", c.output_dir);
  line("sample_stride", std::to_string(c.sample_stride));
  line("snapshot_every", std::to_string(c.snapshot_every));
  line("save_final_state", c.save_final_state ? "on" : "off");
  return o.str();
}

double ParseScale(const std::string &text)
{
  const auto slash = text.find('/');
  auto number = [&](const std::string &s) {
    KeyValue kv{"scale", s, 0};
    try
    {
      return ParseNumber(kv, "scale");
    }
    catch (const ConfigError &)
    {
      throw ConfigError("malformed scale '" + text + "'");
    }
  };
  if (slash == std::string::npos)
  {
    return number(text);
  }
  const double den = number(text.substr(slash + 1));
  if (den == 0.0)
  {
    throw ConfigError("malformed scale '" + text + "'");
  }
  return number(text.substr(0, slash)) / den;
}

RunConfig Mumag4Small(double scale)
{
  int inv = 0;
  for (int candidate : {1, 2, 4, 8})
  {
    if (std::fabs(scale * candidate - 1.0) < 1e-12)
    {
      inv = candidate;
    }
  }
  if (inv == 0)
  {
    throw ConfigError(fmt::format("unsupported scale {} (expected 1/8, 1/4, 1/2 or 1)", scale));
  }
  RunConfig c;
  c.material = RawParameters{};
  c.material.Hext_tesla = {-24.6e-3, 4.3e-3, 0.0};
  c.material.dt = 0.05;
  // about 1 ns in units of 1/(gamma Ms)
  c.material.t_end = 177.0;
  const double L0 = c.material.length_scale;
  const Vec3 film{0.5e-6 / L0, 0.125e-6 / L0, 0.003e-6 / L0};
  const int nx = 128 / inv, ny = 32 / inv;
  c.box_cells = {2 * nx, 2 * ny, 3};
  c.box_extent = {2.0 * film.x, 2.0 * film.y, 3.0 * film.z};
  c.omega_lo = {0.5 * film.x, 0.5 * film.y, film.z};
  c.omega_hi = {1.5 * film.x, 1.5 * film.y, 2.0 * film.z};
  c.initial = InitialMagnetization::SState;
  c.output_dir = fmt::format("mumag4_1_{}", inv);
  return c;
}

std::unique_ptr<Scenario> BuildScenario(const RunConfig &config)
{
  config.Validate();
  auto sc = std::make_unique<Scenario>(
      config.mesh_file.empty() ? EmbedSubdomain(BuildBoxMesh(config.box_extent, config.box_cells),
                                                Box{config.omega_lo, config.omega_hi})
                               : ReadMeshFile(config.mesh_file));
  if (sc->mesh.OmegaCells().empty())
  {
    throw ConfigError("the mesh has no magnetic subdomain");
  }
  sc->angle = CheckAngleCondition(sc->mesh);
  sc->space = std::make_unique<EdgeSpace>(sc->mesh);
  sc->forms = AssembleForms(*sc->space);
  sc->params = DeriveDimensionless(config.material);
  sc->params.Validate();
  try
  {
    sc->pi = MakeFieldContribution(sc->params);
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(e.what());
  }
  return sc;
}

State InitialState(const Scenario &sc, const RunConfig &config)
{
  if (config.initial == InitialMagnetization::Restart)
  {
    State s = LoadStateFile(config.restart_file);
    if (static_cast<int>(s.m.size()) != sc.mesh.NumOmegaNodes() ||
        static_cast<int>(s.E.size()) != sc.space->NumDofs() ||
        static_cast<int>(s.H.size()) != sc.mesh.NumTets() ||
        (!s.v_prev.values.empty() && s.v_prev.size() != s.m.size()))
    {
      throw ConfigError("restart state does not match the mesh");
    }
    if (std::fabs(s.t - static_cast<double>(s.j) * sc.params.k) > 1e-9 * (1.0 + std::fabs(s.t)))
    {
      throw ConfigError("restart state time does not match its step index for this dt");
    }
    return s;
  }
  State s;
  if (config.initial == InitialMagnetization::Uniform)
  {
    s.m = UniformField(sc.mesh, config.initial_direction);
  }
  else
  {
    s.m = RelaxSState(sc.mesh, sc.forms, SStateSeed(sc.mesh), sc.params, config.relax).m;
  }
  s.E = sc.space->Zero();
  if (config.maxwell)
  {
    s.H = MagnetostaticInit(sc.mesh, s.m.AsNodal()).H;
  }
  else
  {
    s.H.values.assign(sc.mesh.NumTets(), Vec3{});
  }
  return s;
}

namespace
{

struct Sinks
{
  std::ofstream trace, energy;
  std::string dir;
};

void WriteEnergyHeader(std::ostream &o)
{
  o << "t,grad_m2,k_sum_v2,H2,E2,theta_term,increments,remark_energy,E_energy,H_energy\n";
}

void WriteEnergyRow(std::ostream &o, const EnergyTraceRow &r)
{
  o << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t,
                   r.grad_m2, r.k_sum_v2, r.H2, r.E2, r.theta_term, r.increments, r.remark_energy,
                   r.E_energy, r.H_energy);
}

nlohmann::json ReportJson(const RunConfig &config, const RunSummary &s)
{
  nlohmann::json j;
  j["algorithm"] = ToString(config.algorithm);
  j["steps"] = s.steps;
  j["final_t"] = s.final_state.t;
  j["angle_condition"] = {{"passed", s.angle.passed},
                          {"violations", s.angle.count_violations},
                          {"worst_value", s.angle.worst_pair.value}};
  j["theta_in_convergent_range"] = s.theta_in_range;
  j["unit_modulus"] = {{"max_defect", s.max_modulus_defect}, {"passed", s.max_modulus_defect <= 1e-12}};
  j["tangency"] = {{"max_ratio", s.max_tangency_ratio}, {"passed", s.max_tangency_ratio <= 1e-10}};
  j["energy_inequality"] = {{"min_slack", s.min_inequality_slack},
                            {"failures", s.inequality_failures},
                            {"passed", s.inequality_failures == 0}};
  j["projection_decay"] = {{"min_slack", s.min_decay_slack},
                           {"failures", s.decay_failures},
                           {"passed", s.decay_failures == 0}};
  j["increment_bound"] = {{"min_slack", s.min_increment_slack},
                          {"passed", s.min_increment_slack >= -1e-12}};
  j["max_gauss_seidel_sweeps"] = s.max_sweeps;
  return j;
}

RunSummary Execute(const RunConfig &config, const StepObserver &observer, Sinks *sinks)
{
  config.Validate();
  const auto sc = BuildScenario(config);
  State state = InitialState(*sc, config);
  const long N = config.NumSteps();
  if (state.j > N)
  {
    throw ConfigError(fmt::format("restart step {} is beyond the final step {}", state.j, N));
  }

  SchemeOptions opt;
  opt.algorithm = config.algorithm;
  opt.tangent = config.tangent;
  opt.maxwell.kind = config.maxwell_solver;
  opt.maxwell.cg = config.cg;
  opt.gauss_seidel = config.gauss_seidel;
  opt.maxwell_enabled = config.maxwell;
  const Integrator integrator(*sc->space, sc->forms, sc->params, sc->pi, opt);
  EnergyTracker tracker(sc->forms, sc->params, *sc->pi);
  const double k = sc->params.k;

  RunSummary sum;
  sum.angle = sc->angle;
  sum.theta_in_range = sc->params.ThetaInConvergentRange();
  sum.min_inequality_slack = sum.min_decay_slack = sum.min_increment_slack =
      std::numeric_limits<double>::infinity();

  auto make_row = [&](const EnergyTraceRow &e, int sweeps, double slack) {
    CsvRow r;
    r.t = state.t;
    r.m_avg = AverageMagnetization(sc->mesh, state.m.AsNodal());
    r.exch_energy = 0.5 * sc->params.Ce * e.grad_m2;
    r.E_energy = e.E_energy;
    r.H_energy = e.H_energy;
    r.remark_energy = e.remark_energy;
    r.gs_sweeps = sweeps;
    r.slack_min = slack;
    sum.rows.push_back(r);
    if (sinks)
    {
      sinks->trace << FormatCsvRow(r) << '\n';
      WriteEnergyRow(sinks->energy, e);
    }
  };
  auto snapshot = [&]() {
    if (sinks && config.snapshot_every > 0 && state.j % config.snapshot_every == 0)
    {
      const std::string prefix = fmt::format("{}/snap_{:06d}", sinks->dir, state.j);
      WriteVtkSnapshot(sc->mesh, state, prefix);
      SaveStateFile(state, prefix + ".state");
    }
  };

  make_row(tracker.Start(state), 0, 0.0);
  snapshot();
  double window = std::numeric_limits<double>::infinity();
  int window_sweeps = 0;
  while (state.j < N)
  {
    const StepRecord rec = integrator.Step(state);
    const auto ineq = PerStepInequality(sc->forms, rec.m_old, rec.v, state.m, rec.H_used, rec.pi_used,
                                        sc->params);
    const auto decay = ExchangeEnergyDecayCheck(sc->forms.stiffness, rec.m_old, rec.v, state.m, k);
    const double incr = LumpedIncrementSlack(sc->forms.lumped_weights, rec.m_old, state.m, rec.v, k);
    double vmax = 0.0;
    for (const auto &x : rec.v.values)
    {
      vmax = std::fmax(vmax, norm(x));
    }
    sum.max_tangency_ratio = std::fmax(sum.max_tangency_ratio, rec.tangency_defect / (1.0 + vmax));
    sum.max_modulus_defect = std::fmax(sum.max_modulus_defect, state.m.MaxModulusDefect());
    sum.min_inequality_slack = std::fmin(sum.min_inequality_slack, ineq.slack);
    sum.inequality_failures += ineq.passed ? 0 : 1;
    sum.min_decay_slack = std::fmin(sum.min_decay_slack, decay.slack);
    sum.decay_failures += decay.passed ? 0 : 1;
    sum.min_increment_slack = std::fmin(sum.min_increment_slack, incr);
    sum.max_sweeps = std::max(sum.max_sweeps, rec.sweeps);
    sum.steps += 1;
    window = std::fmin(window, ineq.slack);
    window_sweeps = std::max(window_sweeps, rec.sweeps);

    const auto erow = tracker.Record(rec, state);
    if (observer)
    {
      observer(*sc, rec, state);
    }
    if (state.j % config.sample_stride == 0 || state.j == N)
    {
      make_row(erow, window_sweeps, window);
      window = std::numeric_limits<double>::infinity();
      window_sweeps = 0;
    }
    snapshot();
  }
  if (sum.steps == 0)
  {
    sum.min_inequality_slack = sum.min_decay_slack = sum.min_increment_slack = 0.0;
  }
  sum.final_state = std::move(state);
  return sum;
}

}  // namespace

RunSummary RunInMemory(const RunConfig &config, const StepObserver &observer)
{
  return Execute(config, observer, nullptr);
}

RunSummary Run(const RunConfig &config, const StepObserver &observer)
{
  config.Validate();
  Sinks sinks;
  sinks.dir = config.output_dir;
  std::filesystem::create_directories(sinks.dir);
  const std::string trace = sinks.dir + "/trace.csv", energy = sinks.dir + "/energy.csv";
  sinks.trace.open(trace, std::ios::trunc);
  sinks.energy.open(energy, std::ios::trunc);
  if (!sinks.trace || !sinks.energy)
  {
    throw std::runtime_error("cannot open output files in '" + sinks.dir + "'");
  }
  sinks.trace << CsvHeader() << '\n';
  WriteEnergyHeader(sinks.energy);
  RunSummary sum = Execute(config, observer, &sinks);
  sinks.trace.close();
  sinks.energy.close();
  if (!sinks.trace || !sinks.energy)
  {
    throw std::runtime_error("failed writing trace files in '" + sinks.dir + "'");
  }
  {
    std::ofstream cfg(sinks.dir + "/config.used");
    cfg << FormatRunConfig(config);
  }
  {
    std::ofstream rep(sinks.dir + "/report.json");
    rep << ReportJson(config, sum).dump(2) << '\n';
  }
  if (config.save_final_state)
  {
    SaveStateFile(sum.final_state, sinks.dir + "/state.bin");
  }
  return sum;
}

}  // namespace mllg
