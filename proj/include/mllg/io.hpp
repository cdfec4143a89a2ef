// Copyright (c) The mllg Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MLLG_IO_HPP
#define MLLG_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include "mllg/integrator.hpp"
#include "mllg/mesh.hpp"

namespace mllg
{

class StateFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//
// Binary state container: magic "MLLGSTAT", uint32 version, int64 step, float64 t, then
// four length-prefixed (uint64) float64 arrays m, E, H, v_prev. Everything little-endian.
//
inline constexpr std::uint32_t kStateVersion = 1;

void SaveState(const State &state, std::ostream &out);
void SaveStateFile(const State &state, const std::string &path);
// Throws StateFormatError on a bad magic, version mismatch, truncation or trailing bytes.
State LoadState(std::istream &in);
State LoadStateFile(const std::string &path);

//
// Legacy ASCII VTK unstructured grids (tetrahedra, cell type 10).
//
// m as POINT_DATA on the omega submesh. Throws MeshError for an empty omega.
void WriteOmegaVtk(const Mesh &mesh, const MagnetizationField &m, std::ostream &out,
                   const std::string &title = "mllg omega");
// H as CELL_DATA on the whole mesh.
void WriteDomainVtk(const Mesh &mesh, const CellField &H, std::ostream &out,
                    const std::string &title = "mllg Omega");
// Writes <prefix>_omega.vtk and <prefix>_Omega.vtk; I/O failures throw std::runtime_error.
void WriteVtkSnapshot(const Mesh &mesh, const State &state, const std::string &prefix);

}  // namespace mllg

#endif  // MLLG_IO_HPP
