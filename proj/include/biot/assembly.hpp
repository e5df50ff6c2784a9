/** @file assembly.hpp
 *  @brief Block assembly, Dirichlet elimination, right-hand sides and time stepping.
 */
#pragma once

#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "biot/mesh.hpp"
#include "biot/physics.hpp"

namespace biot {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

enum class Variant { ReducedQuadrature, ExactIntegration };

/// DoF kinds whose boundary entities carry Dirichlet data, per face.
/// Free boundary flux DoFs receive the natural pressure data of the exact solution.
struct DirichletSpec {
  struct Entry {
    DofKind kind;
    unsigned faces = face::All;
  };
  std::vector<Entry> entries;

  /// Displacement (P1 and bubble) and normal-flux DoFs on the faces given.
  static DirichletSpec displacement_and_flux(unsigned flux_faces = face::All);
  static DirichletSpec none() { return {}; }
};

/// Blocks are stored in field-local numbering over all (uneliminated) DoFs.
/// The monolithic operator uses the symmetric (u, w, p) form
///   [ A_u      0         alpha B_u^T ]
///   [ 0        tau M_w   tau B_w^T   ]
///   [ alpha B_u tau B_w  -(1/M) M_p  ]
struct BlockSystem {
  StructuredMesh mesh = StructuredMesh::uniform(3);
  PhysicalParams params;
  Variant variant = Variant::ReducedQuadrature;

  SpMat A_eps;     ///< (eps(u), eps(v))
  SpMat grad_div;  ///< exactly integrated (div u, div v)
  SpMat A_u;       ///< 2 mu A_eps + lambda times the variant's grad-div term
  SpMat M_w;       ///< (mu_f / k w, r)
  SpMat B_u;       ///< -(div u, q)
  SpMat B_w;       ///< -(div w, q)
  Vec M_p;         ///< diagonal of the P0 mass matrix
  SpMat K;         ///< full monolithic operator

  std::vector<int> free_dofs;     ///< reduced index -> full index
  std::vector<int> full_to_free;  ///< full index -> reduced index or -1
  std::vector<int> constrained;   ///< constrained full indices
  SpMat A;                        ///< operator on the free DoFs
  SpMat A_fc;                     ///< free rows, constrained columns
  std::array<int, 3> field_begin{};  ///< start of each field in the reduced vector
  std::array<int, 3> field_count{};  ///< size of each field in the reduced vector

  int n_full() const { return static_cast<int>(K.rows()); }
  int n_free() const { return static_cast<int>(A.rows()); }
  Vec to_free(const Vec& full) const;
  /// Scatter free values into a full vector whose constrained entries come from `fill`.
  Vec to_full(const Vec& free, const Vec& fill) const;
};

BlockSystem assemble_blocks(const StructuredMesh& mesh, const PhysicalParams& params,
                            Variant variant);
/// Eliminates the constrained DoFs symmetrically. Rejects pressure kinds.
void apply_dirichlet(BlockSystem& system, const DirichletSpec& spec);
/// Convenience: assemble and eliminate in one call.
BlockSystem make_system(const StructuredMesh& mesh, const PhysicalParams& params, Variant variant,
                        const DirichletSpec& spec);

/// Canonical interpolant: vertex values, edge flux moments and cell averages.
Vec interpolate(const StructuredMesh& mesh, const ExactSolution& exact, double t);

struct TransientState {
  Vec x;  ///< full (u, w, p) coefficient vector
  double t = 0.0;
  int step = 0;
};

TransientState initial_state(const BlockSystem& system, const ExactSolution& exact, double t0);

/// Full right-hand side for the step from prev.t to prev.t + tau.
Vec build_rhs(const BlockSystem& system, const ExactSolution& exact, const TransientState& prev);
/// Right-hand side restricted to the free DoFs with the Dirichlet lift applied.
Vec reduced_rhs(const BlockSystem& system, const Vec& full_rhs, const Vec& boundary_values);

struct SolveReport {
  Vec x;
  int iterations = 0;
  bool converged = true;
};
/// Solves A x = b on the free DoFs.
using LinearSolver = std::function<SolveReport(const Vec& b)>;

/// Advances one backward-Euler step. Throws std::runtime_error if the solver fails.
TransientState step(const BlockSystem& system, const ExactSolution& exact,
                    const TransientState& prev, const LinearSolver& solver,
                    SolveReport* report = nullptr);

struct ErrorNorms {
  double u_h1 = 0.0;  ///< H1 seminorm of the displacement error
  double p_l2 = 0.0;  ///< L2 norm of the pressure error
};
ErrorNorms error_norms(const StructuredMesh& mesh, const Vec& x_full, const ExactSolution& exact,
                       double t);

/// Sorted "row col value" text export.
void write_coordinate(const SpMat& m, std::ostream& out);

}  // namespace biot
