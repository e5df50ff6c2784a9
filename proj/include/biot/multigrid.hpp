/** @file multigrid.hpp
 *  @brief Geometric hierarchies with rediscretized coarse operators and V-cycles.
 */
#pragma once

#include <Eigen/SparseLU>
#include <cstdint>
#include <memory>
#include <vector>

#include "biot/relaxation.hpp"

namespace biot {

enum class RelaxKind { Vanka, BsrExact, BsrInexact };

struct CycleConfig {
  RelaxKind relax = RelaxKind::Vanka;
  double omega = 1.0;
  double omega_j = 1.0;  ///< Jacobi weight for inexact Braess-Sarazin
  int nu1 = 2;
  int nu2 = 2;
  PatchKind patch = PatchKind::Full20;
  bool drop_pressure_only = true;
  /// Use the flux-cancelling displacement interpolation (otherwise plain FE interpolation).
  bool divfree_interpolation = true;
};

/// Operator-level multigrid: level 0 is the finest. prolongation[l] maps level l+1 to level l.
class Multigrid {
 public:
  struct Level {
    SpMat A;
    std::unique_ptr<Relaxation> relax;
  };

  Multigrid(std::vector<Level> levels, std::vector<SpMat> prolongation, int nu1, int nu2);

  /// One V-cycle for A x = b starting from x.
  Vec cycle(const Vec& b, const Vec& x) const;
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const SpMat& op(int l) const { return levels_[l].A; }
  const Relaxation& relaxation(int l) const { return *levels_[l].relax; }
  const SpMat& prolongation(int l) const { return P_[l]; }
  int nu1() const { return nu1_; }
  int nu2() const { return nu2_; }

 private:
  Vec cycle_at(int l, const Vec& b, Vec x) const;

  std::vector<Level> levels_;
  std::vector<SpMat> P_;
  std::vector<SpMat> R_;
  int nu1_, nu2_;
  Eigen::SparseLU<SpMat> coarse_;
};

/// Monolithic hierarchy: per-level systems are rediscretized and eliminated.
struct Hierarchy {
  std::vector<BlockSystem> systems;
  std::unique_ptr<Multigrid> mg;

  const BlockSystem& fine() const { return systems.front(); }
};

/// Builds `levels` levels (1 means a direct solve on the fine mesh).
Hierarchy build_hierarchy(const StructuredMesh& fine_mesh, const PhysicalParams& params,
                          Variant variant, const DirichletSpec& spec, const CycleConfig& config,
                          int levels);

/// Multigrid on the displacement block with displacement-8 Vanka relaxation.
std::unique_ptr<Multigrid> build_displacement_multigrid(const Hierarchy& h, double omega,
                                                        int nu1 = 2, int nu2 = 2);

Vec v_cycle(const Hierarchy& h, const Vec& b, const Vec& x);

/// The reported factor is the geometric mean of the last `window` residual ratios.
/// Iteration stops once it changes by less than `change_tol` over one window.
struct RhoOptions {
  std::uint64_t seed = 1;
  int max_iterations = 500;
  int min_iterations = 30;
  int window = 10;
  double change_tol = 1e-3;
  double divergence_factor = 1e10;
};

struct RhoResult {
  double rho = 0.0;
  int iterations = 0;
  bool settled = false;   ///< change criterion met before the iteration cap
  bool diverged = false;  ///< final factor >= 1 or residual blew up
  std::vector<double> history;
};

/// Stationary convergence factor of x <- x + cycle(b - A x) with b = 0 and random x0.
RhoResult measure_rho(const Multigrid& mg, const RhoOptions& opt = {});

}  // namespace biot
