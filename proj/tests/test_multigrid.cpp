// Multigrid hierarchies, V-cycles and measured convergence factors.
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "biot/multigrid.hpp"
#include "biot/transfer.hpp"

namespace biot {
namespace {

PhysicalParams params_for(double nu, double k) {
  PhysicalParams p;
  p.nu = nu;
  p.k = k;
  return p;
}

Hierarchy steady_hierarchy(int n, int levels, const CycleConfig& c, double nu = 0.4, double k = 1.0) {
  return build_hierarchy(StructuredMesh::uniform(n), params_for(nu, k), Variant::ReducedQuadrature,
                         DirichletSpec::displacement_and_flux(), c, levels);
}

CycleConfig vanka_cycle(double omega) {
  CycleConfig c;
  c.omega = omega;
  return c;
}

CycleConfig cycle_config_bsr(int sweeps, double omega, double omega_j) {
  CycleConfig c;
  c.relax = RelaxKind::BsrInexact;
  c.omega = omega;
  c.omega_j = omega_j;
  c.nu1 = c.nu2 = sweeps;
  return c;
}

Vec random_vector(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

Eigen::MatrixXd dense(const SpMat& A) { return Eigen::MatrixXd(A); }

TEST(Hierarchy, LevelSizes) {
  const Hierarchy h = steady_hierarchy(65, 4, vanka_cycle(0.8));
  ASSERT_EQ(h.mg->num_levels(), 4);
  EXPECT_EQ(h.systems.back().mesh.points_per_side(), 9);
  for (int l = 0; l + 1 < 4; ++l) {
    EXPECT_EQ(h.mg->op(l).rows(), h.systems[l].n_free());
    EXPECT_EQ(h.mg->prolongation(l).rows(), h.systems[l].n_free());
    EXPECT_EQ(h.mg->prolongation(l).cols(), h.systems[l + 1].n_free());
  }
}

TEST(Hierarchy, InvalidLevelCountsRejected) {
  EXPECT_THROW(steady_hierarchy(17, 0, vanka_cycle(1.0)), std::invalid_argument);
  EXPECT_NO_THROW(steady_hierarchy(17, 4, vanka_cycle(1.0)));
  EXPECT_THROW(steady_hierarchy(17, 5, vanka_cycle(1.0)), std::invalid_argument);
}

TEST(Multigrid, MismatchedProlongationsRejected) {
  std::vector<Multigrid::Level> lv(1);
  lv[0].A = SpMat(Eigen::MatrixXd::Identity(2, 2).sparseView());
  EXPECT_THROW(Multigrid(std::move(lv), {SpMat(2, 1)}, 1, 1), std::invalid_argument);
}

TEST(Multigrid, CycleIsLinear) {
  // A small Biot modulus keeps the vertex patches well conditioned, so the check
  // is not masked by the large transients of nearly singular patch solves.
  PhysicalParams p = params_for(0.4, 1.0);
  p.M = 1.0;
  const Hierarchy h = build_hierarchy(StructuredMesh::uniform(17), p, Variant::ReducedQuadrature,
                                      DirichletSpec::displacement_and_flux(), vanka_cycle(0.8), 3);
  const int n = h.fine().n_free();
  const Vec zero = Vec::Zero(n);
  EXPECT_EQ(h.mg->cycle(zero, zero).cwiseAbs().maxCoeff(), 0.0);
  const Vec b1 = h.fine().A * random_vector(n, 1), b2 = h.fine().A * random_vector(n, 2);
  const Vec lhs = h.mg->cycle(2.0 * b1 - 0.5 * b2, zero);
  const Vec rhs = 2.0 * h.mg->cycle(b1, zero) - 0.5 * h.mg->cycle(b2, zero);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10 * rhs.cwiseAbs().maxCoeff());
}

TEST(Multigrid, SingleLevelIsDirectSolve) {
  const Hierarchy h = steady_hierarchy(9, 1, vanka_cycle(1.0));
  const Vec b = random_vector(h.fine().n_free(), 5);
  const Vec x = h.mg->cycle(b, Vec::Zero(b.size()));
  EXPECT_LT((h.fine().A * x - b).norm(), 1e-8 * b.norm());
  EXPECT_LT(measure_rho(*h.mg).rho, 1e-8);
}

// Dense two-grid error propagation S^nu2 (I - P A_H^{-1} R A) S^nu1 with
// S = I - omega M^{-1} A.
Eigen::MatrixXd two_grid_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Minv,
                                const Eigen::MatrixXd& P, const Eigen::MatrixXd& AH, int nu1,
                                int nu2) {
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd S = I - Minv * A;
  const Eigen::MatrixXd C = I - P * AH.partialPivLu().solve(P.transpose() * A);
  Eigen::MatrixXd E = C;
  for (int s = 0; s < nu1; ++s) E = E * S;
  for (int s = 0; s < nu2; ++s) E = S * E;
  return E;
}

TEST(TwoGrid, CycleMatchesDenseErrorPropagation) {
  const double omega = 0.8;
  const Hierarchy h = steady_hierarchy(9, 2, vanka_cycle(omega));
  const int n = h.fine().n_free();
  const Eigen::MatrixXd A = dense(h.fine().A);
  const Eigen::MatrixXd Minv = omega * dense(make_vanka(h.fine(), VankaOptions{})->inverse_matrix());
  const Eigen::MatrixXd E =
      two_grid_matrix(A, Minv, dense(h.mg->prolongation(0)), dense(h.mg->op(1)), 2, 2);
  Eigen::MatrixXd E_cycle(n, n);
  const Vec zero = Vec::Zero(n);
  for (int j = 0; j < n; ++j) E_cycle.col(j) = h.mg->cycle(zero, Vec::Unit(n, j));
  EXPECT_LT((E - E_cycle).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, E.cwiseAbs().maxCoeff()));
}

TEST(TwoGrid, OnlyGalerkinCoarseCorrectionIsProjection) {
  const Hierarchy h = steady_hierarchy(9, 2, vanka_cycle(1.0));
  const Eigen::MatrixXd A = dense(h.fine().A), P = dense(h.mg->prolongation(0));
  const int n = static_cast<int>(A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd galerkin = P.transpose() * A * P;
  const Eigen::MatrixXd Cg = I - P * galerkin.partialPivLu().solve(P.transpose() * A);
  const Eigen::MatrixXd Cr = I - P * dense(h.mg->op(1)).partialPivLu().solve(P.transpose() * A);
  EXPECT_LT((Cg * Cg - Cg).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_GT((Cr * Cr - Cr).cwiseAbs().maxCoeff(), 1e-3);
}

double residual_after(const Hierarchy& h, int cycles) {
  const Vec b = h.fine().A * random_vector(h.fine().n_free(), 8);
  Vec x = Vec::Zero(b.size());
  for (int it = 0; it < cycles; ++it) x = v_cycle(h, b, x);
  return (b - h.fine().A * x).norm() / b.norm();
}

TEST(VCycle, VankaReducesResidualOnThreeLevels) {
  EXPECT_LT(residual_after(steady_hierarchy(33, 3, vanka_cycle(0.8), 0.2, 1.0), 15), 1e-2);
}

TEST(VCycle, InexactBraessSarazinTwoGridReducesResidual) {
  const CycleConfig c = cycle_config_bsr(1, 0.72, 1.10);
  EXPECT_LT(residual_after(steady_hierarchy(33, 2, c, 0.0, 1.0), 15), 1e-2);
}

TEST(VCycle, BraessSarazinNeedsMoreSmoothingOnDeeperHierarchies) {
  // The rediscretized coarse correction is not contractive on its own. With a
  // single sweep per side the inexact coarse solve of a three-level cycle is
  // amplified, while three sweeps per side restore convergence.
  const RhoResult one = measure_rho(*steady_hierarchy(33, 3, cycle_config_bsr(1, 0.72, 1.10), 0.0, 1.0).mg);
  const RhoResult three = measure_rho(*steady_hierarchy(33, 3, cycle_config_bsr(3, 0.72, 1.10), 0.0, 1.0).mg);
  EXPECT_GT(one.rho, 1.0);
  EXPECT_LT(three.rho, 0.6);
}

TEST(VCycle, DivergencePreservingInterpolationHelpsNearIncompressibility) {
  CycleConfig plain = vanka_cycle(0.72);
  plain.divfree_interpolation = false;
  const RhoResult with = measure_rho(*steady_hierarchy(33, 3, vanka_cycle(0.72), 0.499, 1.0).mg);
  const RhoResult without = measure_rho(*steady_hierarchy(33, 3, plain, 0.499, 1.0).mg);
  EXPECT_LT(with.rho, without.rho);
}

TEST(DisplacementMultigrid, ConvergesOnElasticBlock) {
  const Hierarchy h = steady_hierarchy(33, 3, vanka_cycle(1.0), 0.3, 1.0);
  const auto mg = build_displacement_multigrid(h, 0.8);
  EXPECT_EQ(mg->num_levels(), 3);
  EXPECT_EQ(mg->op(0).rows(), h.fine().field_count[0]);
  const RhoResult r = measure_rho(*mg);
  EXPECT_FALSE(r.diverged);
  EXPECT_LT(r.rho, 0.5);
}

TEST(MeasureRho, DeterministicForSeed) {
  const Hierarchy h = steady_hierarchy(17, 2, vanka_cycle(0.8));
  RhoOptions opt;
  opt.seed = 42;
  const RhoResult a = measure_rho(*h.mg, opt), b = measure_rho(*h.mg, opt);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(static_cast<int>(a.history.size()), a.iterations);
  EXPECT_TRUE(a.settled);
  EXPECT_FALSE(a.diverged);
  EXPECT_GT(a.rho, 0.0);
  EXPECT_LT(a.rho, 1.0);
  EXPECT_GE(a.iterations, opt.min_iterations);
}

TEST(MeasureRho, FlagsDivergence) {
  // Overdamped relaxation makes the stationary iteration blow up.
  const Hierarchy h = steady_hierarchy(17, 2, vanka_cycle(3.0));
  const RhoResult r = measure_rho(*h.mg);
  EXPECT_TRUE(r.diverged);
  EXPECT_GE(r.rho, 1.0);
}

}  // namespace
}  // namespace biot
