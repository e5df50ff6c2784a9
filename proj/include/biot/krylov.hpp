/** @file krylov.hpp
 *  @brief Flexible GMRES and the block upper-triangular preconditioner.
 */
#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "biot/multigrid.hpp"

namespace biot {

using LinearOperator = std::function<Vec(const Vec&)>;

struct FgmresResult {
  Vec x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  ///< relative residual norms, starting with the initial one
};

/// Right-preconditioned flexible GMRES without restart (modified Gram-Schmidt,
/// Givens rotations). Stops when ||b - A x|| <= rtol ||b||.
FgmresResult fgmres(const LinearOperator& A, const Vec& b, const LinearOperator& precond,
                    double rtol, int maxiter, const Vec* x0 = nullptr);
FgmresResult fgmres(const SpMat& A, const Vec& b, const LinearOperator& precond, double rtol,
                    int maxiter, const Vec* x0 = nullptr);

/// Darcy-block coefficient multiplying tau^2 B_w^T M_p^{-1} B_w.
enum class DarcyScaling {
  Cp,        ///< c_p, the Schur-complement-consistent choice
  InverseCp  ///< 1 / c_p
};

/// Solver for the Darcy diagonal block.
enum class DarcyBlockSolver {
  Direct,            ///< sparse Cholesky
  IncompleteCholesky ///< inner FGMRES to inner_rtol, preconditioned by IC(0)
};

struct BlockPrecondOptions {
  double inner_rtol = 1e-3;
  DarcyBlockSolver darcy_solver = DarcyBlockSolver::IncompleteCholesky;
  int inner_maxiter = 200;
  double displacement_omega = 0.8;
  int nu1 = 2;
  int nu2 = 2;
  DarcyScaling darcy_scaling = DarcyScaling::Cp;
};

/// Back-substitution with
///   [ A_u   alpha B_u^T   0                                 ]
///   [ 0     c_p^{-1} M_p  -tau B_w                          ]
///   [ 0     0             tau M_w + tau^2 s B_w^T M_p^{-1} B_w ]
/// in the permuted (u, p, w) ordering with the pressure equation negated.
/// The displacement block is solved by inner FGMRES preconditioned with a
/// displacement-8 Vanka V-cycle, the Darcy block directly or by inner FGMRES
/// with an incomplete Cholesky preconditioner, and the pressure block exactly.
class BlockTriangularPreconditioner {
 public:
  BlockTriangularPreconditioner(const Hierarchy& h, const BlockPrecondOptions& opt);
  Vec apply(const Vec& r);
  LinearOperator as_operator();
  /// Inner displacement iterations accumulated over all applications.
  int inner_iterations() const { return inner_iterations_; }
  /// Inner Darcy iterations accumulated over all applications (0 for the direct solver).
  int darcy_iterations() const { return darcy_iterations_; }
  /// Whether any inner displacement solve missed its tolerance.
  bool inner_failed() const { return inner_failed_; }
  const SpMat& darcy_block() const { return S_w_; }

 private:
  std::array<int, 3> begin_{}, count_{};
  BlockPrecondOptions opt_;
  std::unique_ptr<Multigrid> disp_mg_;
  SpMat A_uu_, A_up_, A_pw_;
  Vec s_p_;
  SpMat S_w_;
  Eigen::SimplicialLLT<SpMat> w_direct_;
  Eigen::IncompleteCholesky<double> w_ic_;
  int inner_iterations_ = 0;
  int darcy_iterations_ = 0;
  bool inner_failed_ = false;
};

}  // namespace biot
