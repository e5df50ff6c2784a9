/** @file relaxation.hpp
 *  @brief Additive Vanka and Braess-Sarazin relaxation on the eliminated system.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <memory>
#include <string>
#include <vector>

#include "biot/assembly.hpp"

namespace biot {

/// One relaxation sweep is x <- x + omega M^{-1} (b - A x).
class Relaxation {
 public:
  virtual ~Relaxation() = default;
  /// Damped correction omega M^{-1} r.
  virtual Vec correction(const Vec& r) const = 0;
  virtual std::string name() const = 0;
  void sweep(const SpMat& A, const Vec& b, Vec& x) const { x += correction(b - A * x); }
};

struct VankaOptions {
  PatchKind patch = PatchKind::Full20;
  double omega = 1.0;
  /// Patches whose free DoFs are all pressure DoFs are skipped.
  bool drop_pressure_only = true;
  /// Shift added to the diagonal of singular patches when 1/M = 0.
  double singular_shift = 1e-8;
};

/// Additive Vanka: omega sum_l V_l^T D_l (V_l A V_l^T)^{-1} V_l r.
class VankaRelaxation : public Relaxation {
 public:
  /// Generic form: `patches` hold row indices of A; weights are 1/multiplicity.
  /// Singular patches are shifted when `allow_shift` is set, otherwise rejected.
  VankaRelaxation(const SpMat& A, std::vector<std::vector<int>> patches, double omega,
                  bool allow_shift = false, double shift = 1e-8);

  Vec correction(const Vec& r) const override;
  std::string name() const override { return "vanka"; }

  double omega() const { return omega_; }
  int num_patches() const { return static_cast<int>(patches_.size()); }
  int num_shifted() const { return shifted_; }
  const std::vector<std::vector<int>>& patches() const { return patches_; }
  const std::vector<double>& weights() const { return weight_; }
  /// Assembled sparse M^{-1} without the damping factor.
  SpMat inverse_matrix() const;
  /// Correction with the patch contributions summed in the given order.
  Vec correction_ordered(const Vec& r, const std::vector<int>& order) const;

 private:
  std::vector<std::vector<int>> patches_;
  std::vector<Eigen::MatrixXd> weighted_inv_;  ///< D_l (V_l A V_l^T)^{-1}
  std::vector<double> weight_;
  double omega_;
  int n_;
  int shifted_ = 0;
};

/// Vertex patches of the eliminated system, in reduced numbering.
std::vector<std::vector<int>> reduced_patches(const BlockSystem& system, PatchKind kind,
                                              bool drop_pressure_only = true);
std::unique_ptr<VankaRelaxation> make_vanka(const BlockSystem& system, const VankaOptions& opt);
/// Displacement-8 Vanka on the displacement block of the eliminated system.
std::unique_ptr<VankaRelaxation> make_displacement_vanka(const BlockSystem& system, double omega);

enum class BsrMode { Exact, Inexact };

struct BsrOptions {
  BsrMode mode = BsrMode::Inexact;
  double omega = 1.0;
  double omega_j = 1.0;
};

/// Braess-Sarazin relaxation with F = diag(displacement Vanka, tau diag(M_w)) and
/// S = (1/M + alpha^2/(lambda + mu)) M_p + tau B_w diag(M_w)^{-1} B_w^T.
class BsrRelaxation : public Relaxation {
 public:
  BsrRelaxation(const BlockSystem& system, const BsrOptions& opt);
  Vec correction(const Vec& r) const override;
  std::string name() const override {
    return mode_ == BsrMode::Exact ? "bsr-exact" : "bsr-inexact";
  }
  const SpMat& schur() const { return S_; }

 private:
  std::array<int, 3> begin_{}, count_{};
  BsrMode mode_;
  double omega_, omega_j_;
  std::unique_ptr<VankaRelaxation> vanka_u_;
  Vec d_w_;
  SpMat A_up_, A_wp_, A_pu_, A_pw_;
  SpMat S_;
  Vec s_diag_;
  Eigen::SimplicialLDLT<SpMat> s_solver_;
};

}  // namespace biot
