// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Command line driver: solve, mesh-check, make-config.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include "mllg/errors.hpp"
#include "mllg/io.hpp"
#include "mllg/mesh.hpp"
#include "mllg/run.hpp"

namespace
{

enum ExitCode
{
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kNumerical = 3
};

int Fail(int code, const char *kind, const std::string &message, const std::string &out_dir)
{
  nlohmann::json j{{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
  if (!out_dir.empty())
  {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream out(out_dir + "/error.json");
    if (out)
    {
      out << j.dump(2) << '\n';
    }
  }
  return code;
}

// Maps library exceptions onto exit codes.
template <typename F>
int Guard(const std::string &out_dir, F &&body)
{
  try
  {
    return body();
  }
  catch (const mllg::ConfigError &e)
  {
    return Fail(kConfig, "config", e.what(), out_dir);
  }
  catch (const mllg::MeshError &e)
  {
    return Fail(kConfig, "mesh", e.what(), out_dir);
  }
  catch (const mllg::StateFormatError &e)
  {
    return Fail(kConfig, "state", e.what(), out_dir);
  }
  catch (const mllg::NumericalError &e)
  {
    return Fail(kNumerical, "numerical", e.what(), out_dir);
  }
  catch (const mllg::InvariantError &e)
  {
    return Fail(kNumerical, "invariant", e.what(), out_dir);
  }
  catch (const std::exception &e)
  {
    return Fail(kOther, "runtime", e.what(), out_dir);
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Finite element Maxwell-LLG solver"};
  app.require_subcommand(1);

  auto *solve = app.add_subcommand("solve", "run a simulation");
  std::string config_path, algorithm, scale, out_dir;
  int snapshot_every = -1;
  solve->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  solve->add_option("--algorithm", algorithm, "coupled or decoupled");
  solve->add_option("--scale", scale, "use the scaled standard problem 4 setup (1/8, 1/4, 1/2, 1)");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--snapshot-every", snapshot_every, "write VTK snapshots every N steps")
      ->check(CLI::NonNegativeNumber);

  auto *mesh_check = app.add_subcommand("mesh-check", "validate a mesh file");
  std::string mesh_path;
  mesh_check->add_option("--mesh", mesh_path, "tetmesh file")->required();

  auto *make_config = app.add_subcommand("make-config", "print a scenario configuration");
  std::string scenario;
  std::string make_scale = "1/8";
  make_config->add_option("scenario", scenario, "scenario name (mumag4)")->required();
  make_config->add_option("--scale", make_scale, "grid scale");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*solve)
  {
    return Guard(out_dir, [&] {
      if (config_path.empty() && scale.empty())
      {
        throw mllg::ConfigError("solve needs --config or --scale");
      }
      mllg::RunConfig cfg;
      if (!scale.empty())
      {
        cfg = mllg::Mumag4Small(mllg::ParseScale(scale));
      }
      if (!config_path.empty())
      {
        cfg = mllg::ParseRunConfigFile(config_path, cfg);
      }
      if (!algorithm.empty())
      {
        cfg.algorithm = mllg::ParseAlgorithm(algorithm);
      }
      if (!out_dir.empty())
      {
        cfg.output_dir = out_dir;
      }
      if (snapshot_every >= 0)
      {
        cfg.snapshot_every = snapshot_every;
      }
      cfg.Validate();
      out_dir = cfg.output_dir;
      const auto sum = mllg::Run(cfg);
      const auto &last = sum.rows.back();
      std::cout << fmt::format("{} steps ({}), t = {}, <m> = ({:.6f}, {:.6f}, {:.6f}), output in {}\n",
                               sum.steps, mllg::ToString(cfg.algorithm), sum.final_state.t, last.m_avg.x,
                               last.m_avg.y, last.m_avg.z, cfg.output_dir);
      if (!sum.angle.passed)
      {
        std::cout << "warning: angle condition violated, projection decay not guaranteed\n";
      }
      if (!sum.theta_in_range)
      {
        std::cout << "warning: theta outside (1/2, 1]\n";
      }
      return static_cast<int>(kOk);
    });
  }
  if (*mesh_check)
  {
    return Guard("", [&] {
      const auto mesh = mllg::ReadMeshFile(mesh_path);
      const auto angle = mllg::CheckAngleCondition(mesh);
      nlohmann::json j{{"status", "ok"},
                       {"nodes", mesh.NumNodes()},
                       {"tets", mesh.NumTets()},
                       {"edges", mesh.NumEdges()},
                       {"omega_cells", mesh.OmegaCells().size()},
                       {"omega_nodes", mesh.NumOmegaNodes()},
                       {"angle_condition", angle.passed},
                       {"angle_violations", angle.count_violations}};
      std::cout << j.dump(2) << '\n';
      return static_cast<int>(kOk);
    });
  }
  if (*make_config)
  {
    return Guard("", [&] {
      if (scenario != "mumag4")
      {
        throw mllg::ConfigError("unknown scenario '" + scenario + "' (expected mumag4)");
      }
      std::cout << mllg::FormatRunConfig(mllg::Mumag4Small(mllg::ParseScale(make_scale)));
      return static_cast<int>(kOk);
    });
  }
  return kOther;
}
