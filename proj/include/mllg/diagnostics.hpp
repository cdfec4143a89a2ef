// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_DIAGNOSTICS_HPP
#define MLLG_DIAGNOSTICS_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>
#include "mllg/assembly.hpp"
#include "mllg/fespace.hpp"
#include "mllg/integrator.hpp"
#include "mllg/physics.hpp"

namespace mllg
{

// |omega|^-1 int_omega m with exact P1 integration.
Vec3 AverageMagnetization(const Mesh &mesh, const NodalField &m);

//
// One row of the discrete energy bookkeeping.
//
struct EnergyTraceRow
{
  double t = 0.0;
  double grad_m2 = 0.0;       // ||grad m^j||^2
  double k_sum_v2 = 0.0;      // k sum_i ||v^i||^2_lumped
  double H2 = 0.0;            // ||H^j||^2
  double E2 = 0.0;            // ||E^j||^2
  double theta_term = 0.0;    // (theta - 1/2) k^2 sum_i ||grad v^i||^2
  double increments = 0.0;    // sum_i ||H^{i+1} - H^i||^2 + ||E^{i+1} - E^i||^2
  double remark_energy = 0.0; // mu0 Ce ||grad m||^2 + mu0 ||H||^2 + eps0 ||E||^2_omega - mu0 (pi(m), m)
  double E_energy = 0.0;      // eps0 ||E||^2
  double H_energy = 0.0;      // mu0 ||H||^2
};

class EnergyTracker
{
public:
  EnergyTracker(const AssembledForms &forms, const MaterialParams &params,
                const FieldContribution &pi);

  // Row for the initial state.
  EnergyTraceRow Start(const State &state);
  // Accumulates one step and returns the row for the new state.
  EnergyTraceRow Record(const StepRecord &step, const State &state);

  const std::vector<EnergyTraceRow> &Rows() const { return rows_; }

private:
  EnergyTraceRow Row(const State &state) const;

  const AssembledForms *forms_;
  MaterialParams params_;
  const FieldContribution *pi_;
  double k_sum_v2_ = 0.0, sum_grad_v2_ = 0.0, increments_ = 0.0;
  std::vector<EnergyTraceRow> rows_;
};

//
// Per-step exchange energy inequality with lumped products:
//   1/2 ||grad m^{j+1}||^2 <= 1/2 ||grad m^j||^2 - (theta - 1/2) k^2 ||grad v||^2
//        - (alpha k / Ce) ||v||^2 + (k / Ce) [(H, v) + (pi, v)].
//
struct InequalityReport
{
  double slack = 0.0;  // rhs - lhs
  double scale = 1.0;
  bool passed = true;  // slack >= -1e-9 scale
};

InequalityReport PerStepInequality(const AssembledForms &forms, const MagnetizationField &m,
                                   const NodalField &v, const MagnetizationField &m_next,
                                   const CellField &H, const NodalField &pi,
                                   const MaterialParams &params);

// ||m^{j+1} - m^j||_lumped <= k ||v^j||_lumped; returns the slack k||v|| - ||dm||.
double LumpedIncrementSlack(std::span<const double> weights, const MagnetizationField &m,
                            const MagnetizationField &m_next, const NodalField &v, double k);

// Residual of sum_i (u_i - u_{i-1}) . u_i
//   - [1/2 |u_j|^2 - 1/2 |u_0|^2 + 1/2 sum_i |u_i - u_{i-1}|^2].
double AbelIdentityResidual(const std::vector<std::vector<double>> &u);

//
// Time interpolants of a stored sequence g^0..g^N at t_j = j k.
//
enum class TimeMode
{
  Affine,  // linear between t_j and t_{j+1}
  Minus,   // g^j on [t_j, t_{j+1})
  Plus,    // g^{j+1} on (t_j, t_{j+1}]
  Bar      // (g^j + g^{j+1}) / 2
};

// Throws std::out_of_range for t outside [0, N k].
std::vector<double> ReconstructInTime(const std::vector<std::vector<double>> &history, double k,
                                      double t, TimeMode mode);

// max over intervals of | int (g_bar, L^-) - int (g_affine, L^-) | with L a sequence of
// weights constant on each interval (Gauss quadrature in time).
double MidpointExactnessResidual(const std::vector<std::vector<double>> &history,
                                 const std::vector<std::vector<double>> &weights, double k);

//
// CSV output (fixed column order, '.' decimal).
//
struct CsvRow
{
  double t = 0.0;
  Vec3 m_avg;
  double exch_energy = 0.0;
  double E_energy = 0.0;
  double H_energy = 0.0;
  double remark_energy = 0.0;
  int gs_sweeps = 0;
  double slack_min = 0.0;
};

const char *CsvHeader();
std::string FormatCsvRow(const CsvRow &row);
// Parses CsvHeader() followed by FormatCsvRow lines; throws std::runtime_error on
// malformed input.
std::vector<CsvRow> ReadCsv(std::istream &in);

}  // namespace mllg

#endif  // MLLG_DIAGNOSTICS_HPP
