// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_RUN_HPP
#define MLLG_RUN_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>
#include "mllg/assembly.hpp"
#include "mllg/diagnostics.hpp"
#include "mllg/fespace.hpp"
#include "mllg/integrator.hpp"
#include "mllg/mesh.hpp"
#include "mllg/physics.hpp"

namespace mllg
{

enum class InitialMagnetization
{
  SState,   // S-state seed relaxed without fields
  Uniform,  // constant direction
  Restart   // full state from a state file
};

//
// Everything a run needs. Lengths are in units of length_scale, times in 1/(gamma Ms).
//
struct RunConfig
{
  Algorithm algorithm = Algorithm::Decoupled;
  TangentMethod tangent = TangentMethod::Reduced;

  // Mesh: a file, or a uniform box of Kuhn-split cubes with omega given as a box.
  std::string mesh_file;
  Vec3 box_extent{1.0, 1.0, 1.0};
  std::array<int, 3> box_cells{4, 4, 4};
  Vec3 omega_lo{0.25, 0.25, 0.25};
  Vec3 omega_hi{0.75, 0.75, 0.75};

  RawParameters material;

  GaussSeidelConfig gauss_seidel;
  MaxwellSolverKind maxwell_solver = MaxwellSolverKind::Direct;
  SolverConfig cg;
  bool maxwell = true;

  InitialMagnetization initial = InitialMagnetization::SState;
  Vec3 initial_direction{1.0, 0.0, 0.0};
  RelaxConfig relax;
  std::string restart_file;

  std::string output_dir = "out";
  int sample_stride = 1;
  int snapshot_every = 0;  // 0 disables VTK snapshots
  bool save_final_state = true;

  // Throws ConfigError for dt <= 0, t_end < dt, bad strides, a missing restart file name
  // when restarting, or inconsistent omega boxes.
  void Validate() const;
  long NumSteps() const;  // round(t_end / dt)
};

// key = value configuration; unknown run keys are handed to the material parameters.
// Relative paths in mesh_file, material and restart_file resolve against base_dir.
// Keys override `defaults`.
RunConfig ParseRunConfig(std::istream &in, const std::string &base_dir = "",
                         const RunConfig &defaults = {});
RunConfig ParseRunConfigFile(const std::string &path, const RunConfig &defaults = {});
// Inverse of ParseRunConfig for every field (output round-trips).
std::string FormatRunConfig(const RunConfig &config);

// Scaled standard problem 4: omega grid (128 s) x (32 s) x 1 over 0.5 x 0.125 x 0.003 um,
// Omega doubled in-plane with one padding layer above and below. Throws ConfigError
// unless s is 1/8, 1/4, 1/2 or 1.
RunConfig Mumag4Small(double scale);
// Accepts "1/8", "0.125", "1" and so on.
double ParseScale(const std::string &text);

//
// Mesh, spaces and forms for a configuration; not copyable (the space refers to the mesh).
//
struct Scenario
{
  explicit Scenario(Mesh m) : mesh(std::move(m)) {}
  Scenario(const Scenario &) = delete;
  Scenario &operator=(const Scenario &) = delete;

  Mesh mesh;
  std::unique_ptr<EdgeSpace> space;
  AssembledForms forms;
  MaterialParams params;
  std::shared_ptr<FieldContribution> pi;
  AngleConditionReport angle;
};

std::unique_ptr<Scenario> BuildScenario(const RunConfig &config);

// E = 0, H from the magnetostatic problem (zero when Maxwell is off); m relaxed or uniform.
State InitialState(const Scenario &scenario, const RunConfig &config);

struct RunSummary
{
  long steps = 0;
  State final_state;
  std::vector<CsvRow> rows;
  AngleConditionReport angle;
  double max_modulus_defect = 0.0;
  double max_tangency_ratio = 0.0;  // max_j max_z |v.m| / (1 + max |v|)
  double min_inequality_slack = 0.0;
  int inequality_failures = 0;
  double min_decay_slack = 0.0;
  int decay_failures = 0;
  double min_increment_slack = 0.0;
  int max_sweeps = 0;
  bool theta_in_range = true;
};

// Observer called after every step.
using StepObserver = std::function<void(const Scenario &, const StepRecord &, const State &)>;

// Runs the configured scheme and writes trace.csv, energy.csv, report.json, final
// state.bin and optional snapshots into output_dir (created if needed). Errors propagate.
RunSummary Run(const RunConfig &config, const StepObserver &observer = {});

// Same as Run but without touching the file system.
RunSummary RunInMemory(const RunConfig &config, const StepObserver &observer = {});

}  // namespace mllg

#endif  // MLLG_RUN_HPP
