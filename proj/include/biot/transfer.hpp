/** @file transfer.hpp
 *  @brief Block-diagonal grid transfer operators between nested meshes.
 */
#pragma once

#include "biot/assembly.hpp"

namespace biot {

/// Finite element interpolation of the coarse displacement space.
SpMat build_P_u_standard(const StructuredMesh& fine, const StructuredMesh& coarse);
/// As above, with the three interior-triangle edge bubbles of every coarse
/// triangle chosen so that each corner child carries zero net flux.
SpMat build_P_u_divfree(const StructuredMesh& fine, const StructuredMesh& coarse);
/// Canonical RT0 interpolation (normal component at fine edge midpoints).
SpMat build_P_w(const StructuredMesh& fine, const StructuredMesh& coarse);
/// Piecewise constant injection into the four children.
SpMat build_P_p(const StructuredMesh& fine, const StructuredMesh& coarse);
/// Block-diagonal prolongation over all fields in the global DoF numbering.
SpMat build_P(const StructuredMesh& fine, const StructuredMesh& coarse, bool divfree = true);
/// Rows and columns restricted to the free DoFs of the two systems.
SpMat restrict_to_free(const SpMat& P, const BlockSystem& fine, const BlockSystem& coarse);
/// Restriction is the transpose of prolongation.
SpMat restriction(const SpMat& P);

}  // namespace biot
