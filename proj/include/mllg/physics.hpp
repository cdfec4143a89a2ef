// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_PHYSICS_HPP
#define MLLG_PHYSICS_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>
#include "mllg/assembly.hpp"
#include "mllg/fespace.hpp"
#include "mllg/linalg.hpp"
#include "mllg/mesh.hpp"

namespace mllg
{

//
// Material and scheme constants in SI units, as they appear in a parameter file.
//
struct RawParameters
{
  double alpha = 0.02;
  double A = 1.3e-11;         // J/m
  double Ms = 8.0e5;          // A/m
  double gamma = 2.211e5;     // m/(A s)
  double mu0 = 1.25667e-6;    // V s/(A m)
  double eps0 = 0.88422e-11;  // A s/(V m)
  double sigma = 0.0;         // S/m
  double theta = 1.0;
  double dt = 0.05;           // dimensionless time
  double t_end = 5.0;         // dimensionless time
  Vec3 Hext_tesla{};          // mu0 H_ext in Tesla
  double length_scale = 3e-9; // L0 in m
  Vec3 easy_axis{0.0, 0.0, 1.0};
  double Ca = 0.0;            // dimensionless anisotropy strength
};

//
// Dimensionless constants used by the schemes. Time is measured in 1/(gamma Ms), fields
// in Ms, lengths in L0; E is scaled by mu0 gamma Ms^2 L0 so that mu = 1.
//
struct MaterialParams
{
  double alpha = 1.0;
  double Ce = 1.0;
  double mu0 = 1.0;
  double eps0 = 1.0;
  double sigma = 0.0;
  double theta = 1.0;
  double k = 0.05;
  Vec3 Hext{};
  Vec3 easy_axis{0.0, 0.0, 1.0};
  double Ca = 0.0;

  // Physical units, kept for output.
  double time_unit = 1.0;    // seconds per unit time
  double length_unit = 1.0;  // meters per unit length
  double field_unit = 1.0;   // A/m per unit field

  // Throws ConfigError on alpha <= 0, Ce <= 0, mu0/eps0 <= 0, sigma < 0, k <= 0, theta
  // outside [0, 1].
  void Validate() const;
  // theta outside (1/2, 1] is allowed but not covered by the convergence theory.
  bool ThetaInConvergentRange() const { return theta > 0.5 && theta <= 1.0; }
};

// Throws ConfigError for non-positive Ms, A, gamma, mu0, eps0 or length scale.
MaterialParams DeriveDimensionless(const RawParameters &raw);

// Exchange length squared 2A/(mu0 Ms^2) in m^2 (Ce before length scaling).
double ExchangeLengthSquared(const RawParameters &raw);

// key = value parameter file ('#' comments). Unknown keys and malformed values throw
// ConfigError naming the line.
RawParameters ParseParameters(std::istream &in);
// Sets one parameter by its file key; false for an unknown key.
bool SetParameter(RawParameters &raw, const std::string &key, double value);
RawParameters ParseParameterFile(const std::string &path);

//
// General field contribution pi and its bound C_pi on unit-modulus inputs.
//
class FieldContribution
{
public:
  virtual ~FieldContribution() = default;
  virtual NodalField Evaluate(const MagnetizationField &m) const = 0;
  // Bound on ||pi(n)||_{L2(omega)} for unit-modulus n.
  virtual double Bound(double omega_volume) const = 0;
};

// pi(m) = H_ext.
class ExternalField final : public FieldContribution
{
public:
  explicit ExternalField(const Vec3 &h) : h_(h) {}
  NodalField Evaluate(const MagnetizationField &m) const override;
  double Bound(double omega_volume) const override;

private:
  Vec3 h_;
};

// pi(m) = Ca (e . m) e, the easy-axis restoring direction.
class UniaxialAnisotropy final : public FieldContribution
{
public:
  // Throws std::invalid_argument for a non-unit axis or negative Ca.
  UniaxialAnisotropy(const Vec3 &axis, double Ca);
  NodalField Evaluate(const MagnetizationField &m) const override;
  double Bound(double omega_volume) const override;

private:
  Vec3 e_;
  double Ca_;
};

// Sum of contributions; an empty sum evaluates to zero.
class CombinedField final : public FieldContribution
{
public:
  void Add(std::shared_ptr<const FieldContribution> f) { parts_.push_back(std::move(f)); }
  NodalField Evaluate(const MagnetizationField &m) const override;
  double Bound(double omega_volume) const override;

private:
  std::vector<std::shared_ptr<const FieldContribution>> parts_;
};

NodalField PiExternal(const MagnetizationField &m, const Vec3 &Hext);
NodalField PiUniaxial(const MagnetizationField &m, const Vec3 &axis, double Ca);

// External field plus anisotropy (if Ca > 0) from the material constants.
std::shared_ptr<FieldContribution> MakeFieldContribution(const MaterialParams &p);

//
// Initial data.
//
struct MagnetostaticResult
{
  CellField H;
  SolveReport report;
  double residual = 0.0;  // max over P1 basis w of |(H + chi m, grad w)|
};

// P1 Neumann problem (grad u, grad w) = (chi_omega m0, grad w) on Omega, gauge u = 0 at
// node 0, H0 = -grad u. Defaults to a sparse direct solve; CG when solver is given.
MagnetostaticResult MagnetostaticInit(const Mesh &mesh, const NodalField &m0,
                                      const SolverConfig *cg_config = nullptr);
// max over P1 basis functions w of |(H + chi_omega m, grad w)|.
double MagnetostaticResidual(const Mesh &mesh, const CellField &H, const NodalField &m);

// Seeds for the S-state relaxation.
// Linear in-plane rotation angle normalize(cos phi, sin phi, 0.01), phi from -phi_end to
// phi_end across omega in x.
MagnetizationField LinearAngleSeed(const Mesh &mesh, double phi_end = 0.25 * 3.141592653589793);
// Both ends tilted towards +y: phi = phi_end (2 xi - 1)^2 with xi in [0, 1] across omega.
MagnetizationField SStateSeed(const Mesh &mesh, double phi_end = 0.25 * 3.141592653589793);
MagnetizationField UniformField(const Mesh &mesh, const Vec3 &direction);

struct RelaxConfig
{
  int steps = 500;
  double k = 0.1;
  double alpha = 1.0;
};

struct RelaxResult
{
  MagnetizationField m;
  std::vector<double> exchange_energy;  // ||grad m||^2 before each step and at the end
};

// Decoupled LLG steps with H = 0 and no external field.
RelaxResult RelaxSState(const Mesh &mesh, const AssembledForms &forms, MagnetizationField seed,
                        const MaterialParams &params, const RelaxConfig &config);

}  // namespace mllg

#endif  // MLLG_PHYSICS_HPP
