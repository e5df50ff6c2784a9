/** @file lfa.hpp
 *  @brief Local Fourier analysis of the monolithic two-grid method.
 *
 *  Symbols are 10x10 complex matrices whose rows and columns follow the DoF
 *  kind order of the mesh module. A Fourier mode with frequency theta has
 *  value exp(i theta . x / h) at a DoF located at x.
 */
#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/multigrid.hpp"

namespace biot {

using CMat = Eigen::MatrixXcd;
using Theta = Eigen::Vector2d;

/// One tap of a kind-block stencil: coefficient between a row DoF of kind
/// `row` and the column DoF of kind `col` displaced by (dx, dy) in units of h.
struct StencilEntry {
  DofKind row;
  DofKind col;
  double dx;
  double dy;
  double value;
};

/// Closed-form interior stencils at h = 1 (see stencil scaling in each comment).
namespace stencils {
/// (eps(u), eps(v)) over the displacement kinds; scale-free.
const std::vector<StencilEntry>& strain();
/// Exactly integrated (div u, div v); scale-free.
const std::vector<StencilEntry>& grad_div();
/// -(div u, q); multiply by h.
const std::vector<StencilEntry>& div_u();
/// -(div w, q); multiply by h.
const std::vector<StencilEntry>& div_w();
/// (w, r); multiply by mu_f h^2 / k.
const std::vector<StencilEntry>& darcy_mass();
/// Restriction R = P^T: row = coarse kind, column = fine kind, offsets in fine
/// units measured from the coarse DoF.
const std::vector<StencilEntry>& restriction();
}  // namespace stencils

/// Position of a DoF kind inside its cell in units of h.
Theta kind_position(DofKind k);

/// Kind-block stencil of a linear operator on the infinite lattice.
class StencilOperator {
 public:
  void add(DofKind row, DofKind col, double dx, double dy, double value);
  void add_all(const std::vector<StencilEntry>& entries, double scale);
  /// Coefficient between two DoFs; zero when absent.
  double coeff(DofKind row, DofKind col, double dx, double dy) const;
  /// 10x10 symbol sum_taps value exp(i theta . d).
  CMat symbol(const Theta& theta) const;
  const std::vector<StencilEntry>& entries() const { return entries_; }

 private:
  std::vector<StencilEntry> entries_;
};

/// Stencil of the monolithic (u, w, p) operator with mesh size h.
StencilOperator operator_stencil(const PhysicalParams& params, double h, Variant variant);

CMat symbol_operator(const Theta& theta, const PhysicalParams& params, double h, Variant variant);
/// Restriction symbol for the harmonic alpha at theta = theta00 + pi alpha.
CMat symbol_restriction(const Theta& theta00, const std::array<int, 2>& alpha);
/// Restriction stacked over the four harmonics (10 x 40).
CMat symbol_restriction_stacked(const Theta& theta00);

/// Offset of each DoF of an interior vertex patch from the centre vertex.
struct PatchLayout {
  std::vector<DofKind> kinds;
  std::vector<Theta> offsets;
  std::vector<double> weights;  ///< natural weights 1, 1/2, 1/3
};
PatchLayout interior_patch(PatchKind kind);

/// Symbol of M^{-1} = V^H D (V A V^T)^{-1} V for additive Vanka (undamped).
class VankaSymbol {
 public:
  /// A singular patch matrix is retried with `shift` added to its diagonal and
  /// falls back to a pseudo-inverse if it is still singular.
  VankaSymbol(const StencilOperator& op, PatchKind kind, double shift = 1e-8);
  CMat operator()(const Theta& theta) const;
  bool shifted() const { return shifted_; }

 private:
  PatchLayout layout_;
  Eigen::MatrixXd weighted_inverse_;
  int n_;
  bool shifted_ = false;
};

/// Symbol of the undamped Braess-Sarazin M^{-1}; affine in the Jacobi weight.
class BsrSymbol {
 public:
  BsrSymbol(const PhysicalParams& params, double h, Variant variant, BsrMode mode);
  /// M^{-1} for the given Jacobi weight (ignored in exact mode).
  CMat operator()(const Theta& theta, double omega_j) const;
  /// M^{-1} = C0 + omega_j C1 (C1 = 0 in exact mode).
  std::pair<CMat, CMat> parts(const Theta& theta) const;

 private:
  StencilOperator op_;
  VankaSymbol vanka_u_;
  BsrMode mode_;
  double c_, d_w_, s_diag_, h_;
};

CMat symbol_vanka(const Theta& theta, const PhysicalParams& params, double h, PatchKind kind,
                  Variant variant = Variant::ReducedQuadrature);
CMat symbol_bsr(const Theta& theta, const PhysicalParams& params, double h, BsrMode mode,
                double omega_j, Variant variant = Variant::ReducedQuadrature);

struct LfaConfig {
  RelaxKind relax = RelaxKind::Vanka;
  PatchKind patch = PatchKind::Full20;
  Variant variant = Variant::ReducedQuadrature;
  double omega = 1.0;
  double omega_j = 1.0;
  int nu1 = 2;
  int nu2 = 2;
  int samples = 32;  ///< per direction over [-pi/2, pi/2)
  double h = 1.0 / 64.0;
  double cond_guard = 1e14;
};

struct LfaResult {
  double rho = 0.0;
  Theta argmax = Theta::Zero();
  int flagged = 0;  ///< frequencies skipped because the coarse symbol is ill-conditioned
};

/// theta_j = -pi/2 + (j + 1/2) pi / samples.
std::vector<Theta> sample_frequencies(int samples);

/// Two-grid analysis with all omega-independent data precomputed per frequency.
class TwoGridLfa {
 public:
  TwoGridLfa(const PhysicalParams& params, const LfaConfig& config);
  /// Spectral radius of S^nu2 CG S^nu1 at sample s.
  double rho_at(int s, double omega, double omega_j) const;
  /// Max over all non-flagged samples; stops early (returning a value above
  /// `abort_above`) once the running maximum exceeds it.
  LfaResult rho(double omega, double omega_j,
                double abort_above = std::numeric_limits<double>::infinity()) const;
  int num_samples() const { return static_cast<int>(theta_.size()); }
  const Theta& theta(int s) const { return theta_[s]; }
  bool flagged(int s) const { return flagged_[s]; }
  /// Sample visiting order used for early termination.
  void set_order(std::vector<int> order) { order_ = std::move(order); }

 private:
  LfaConfig cfg_;
  std::vector<Theta> theta_;
  std::vector<bool> flagged_;
  std::vector<CMat> L_;   ///< 40x40 block-diagonal fine symbol
  std::vector<CMat> M0_;  ///< 40x40 block-diagonal M^{-1} parts
  std::vector<CMat> M1_;
  std::vector<CMat> CG_;  ///< 40x40 coarse-grid correction
  std::vector<int> order_;
};

LfaResult rho_lfa(const PhysicalParams& params, const LfaConfig& config);

struct OptimizeGrid {
  double omega_min = 0.02;
  double omega_max = 1.5;
  double omega_step = 0.02;
  double omega_j_min = 0.02;
  double omega_j_max = 2.0;
  double omega_j_step = 0.02;
};

struct OptimizeResult {
  double omega = 0.0;
  double omega_j = 0.0;
  double rho = 0.0;
  int flagged = 0;
};

/// Brute-force minimization of rho_lfa over omega (and omega_j for inexact
/// Braess-Sarazin). Ties go to the smaller omega, then the smaller omega_j.
OptimizeResult optimize_parameters(const PhysicalParams& params, const LfaConfig& config,
                                   const OptimizeGrid& grid = {});

/// Smoothing factor max over high frequencies of rho(S^(nu1+nu2))^(1/(nu1+nu2)).
double smoothing_factor(const PhysicalParams& params, const LfaConfig& config);

/// Writes "theta1,theta2,rho" for every sample.
void write_rho_map_csv(const PhysicalParams& params, const LfaConfig& config, std::ostream& out);

}  // namespace biot
