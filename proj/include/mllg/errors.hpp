// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_ERRORS_HPP
#define MLLG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mllg
{

// Mesh topology or geometry is unusable (non-conforming, bad indices, parse failure).
class MeshError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Tetrahedron with (scale-relative) vanishing volume.
class DegenerateElementError : public MeshError
{
public:
  using MeshError::MeshError;
};

// The subdomain box is not a union of mesh cells.
class ResolutionError : public MeshError
{
public:
  using MeshError::MeshError;
};

// A field violates a documented invariant (unit modulus, matching lengths, ...).
class InvariantError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A linear solve or nonlinear iteration failed to produce a usable result.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Bad user configuration (parameter file, CLI flags).
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mllg

#endif  // MLLG_ERRORS_HPP
