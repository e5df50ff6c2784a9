#include "biot/relaxation.hpp"

#include <Eigen/LU>
#include <stdexcept>

namespace biot {

namespace {

// A patch inverse is accepted when it reproduces the identity to this accuracy.
constexpr double kInverseTol = 1e-6;

bool invert(const Eigen::MatrixXd& B, Eigen::MatrixXd& inv) {
  inv = Eigen::PartialPivLU<Eigen::MatrixXd>(B).inverse();
  if (!inv.allFinite()) return false;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(B.rows(), B.cols());
  return (B * inv - I).cwiseAbs().maxCoeff() < kInverseTol;
}

Eigen::MatrixXd dense_block(const SpMat& A, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd B(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) B(a, b) = A.coeff(idx[a], idx[b]);
  return B;
}

SpMat sub_block(const SpMat& A, int r0, int nr, int c0, int nc) {
  return SpMat(A.block(r0, c0, nr, nc));
}

}  // namespace

VankaRelaxation::VankaRelaxation(const SpMat& A, std::vector<std::vector<int>> patches,
                                 double omega, bool allow_shift, double shift)
    : patches_(std::move(patches)), omega_(omega), n_(static_cast<int>(A.rows())) {
  std::vector<int> count(n_, 0);
  for (const auto& p : patches_)
    for (int d : p) ++count[d];
  weight_.assign(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    if (count[i] > 0) weight_[i] = 1.0 / count[i];
  weighted_inv_.reserve(patches_.size());
  for (const auto& p : patches_) {
    Eigen::MatrixXd B = dense_block(A, p);
    Eigen::MatrixXd W;
    if (!invert(B, W)) {
      if (!allow_shift) throw std::runtime_error("singular Vanka patch matrix");
      B.diagonal().array() += shift;
      ++shifted_;
      if (!invert(B, W)) throw std::runtime_error("Vanka patch matrix singular after diagonal shift");
    }
    for (size_t a = 0; a < p.size(); ++a) W.row(a) *= weight_[p[a]];
    weighted_inv_.push_back(std::move(W));
  }
}

Vec VankaRelaxation::correction(const Vec& r) const {
  Vec out = Vec::Zero(n_);
  Eigen::VectorXd loc;
  for (size_t l = 0; l < patches_.size(); ++l) {
    const auto& p = patches_[l];
    loc.resize(p.size());
    for (size_t a = 0; a < p.size(); ++a) loc[a] = r[p[a]];
    const Eigen::VectorXd c = weighted_inv_[l] * loc;
    for (size_t a = 0; a < p.size(); ++a) out[p[a]] += c[a];
  }
  return omega_ * out;
}

Vec VankaRelaxation::correction_ordered(const Vec& r, const std::vector<int>& order) const {
  Vec out = Vec::Zero(n_);
  for (int l : order) {
    const auto& p = patches_[l];
    Eigen::VectorXd loc(p.size());
    for (size_t a = 0; a < p.size(); ++a) loc[a] = r[p[a]];
    const Eigen::VectorXd c = weighted_inv_[l] * loc;
    for (size_t a = 0; a < p.size(); ++a) out[p[a]] += c[a];
  }
  return omega_ * out;
}

SpMat VankaRelaxation::inverse_matrix() const {
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t l = 0; l < patches_.size(); ++l) {
    const auto& p = patches_[l];
    for (size_t a = 0; a < p.size(); ++a)
      for (size_t b = 0; b < p.size(); ++b)
        trip.emplace_back(p[a], p[b], weighted_inv_[l](a, b));
  }
  SpMat M(n_, n_);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

std::vector<std::vector<int>> reduced_patches(const BlockSystem& system, PatchKind kind,
                                              bool drop_pressure_only) {
  const int p_begin = system.field_begin[static_cast<int>(Field::Pressure)];
  std::vector<std::vector<int>> out;
  for (const PatchIndexSet& ps : vertex_patches(system.mesh, kind)) {
    std::vector<int> idx;
    bool has_velocity = false;
    for (int d : ps.dofs) {
      const int f = system.full_to_free[d];
      if (f < 0) continue;
      idx.push_back(f);
      if (f < p_begin) has_velocity = true;
    }
    if (idx.empty() || (drop_pressure_only && !has_velocity)) continue;
    out.push_back(std::move(idx));
  }
  return out;
}

std::unique_ptr<VankaRelaxation> make_vanka(const BlockSystem& system, const VankaOptions& opt) {
  if (opt.patch == PatchKind::Displacement8) return make_displacement_vanka(system, opt.omega);
  return std::make_unique<VankaRelaxation>(
      system.A, reduced_patches(system, opt.patch, opt.drop_pressure_only), opt.omega,
      system.params.inv_M() == 0.0, opt.singular_shift);
}

std::unique_ptr<VankaRelaxation> make_displacement_vanka(const BlockSystem& system, double omega) {
  const int nu = system.field_count[0];
  const SpMat Auu = sub_block(system.A, 0, nu, 0, nu);
  return std::make_unique<VankaRelaxation>(
      Auu, reduced_patches(system, PatchKind::Displacement8, false), omega);
}

BsrRelaxation::BsrRelaxation(const BlockSystem& system, const BsrOptions& opt)
    : begin_(system.field_begin),
      count_(system.field_count),
      mode_(opt.mode),
      omega_(opt.omega),
      omega_j_(opt.omega_j) {
  const PhysicalParams& prm = system.params;
  if (!(prm.k > 0.0)) throw std::invalid_argument("Braess-Sarazin relaxation requires k > 0");
  if (!(prm.tau > 0.0)) throw std::invalid_argument("Braess-Sarazin relaxation requires tau > 0");
  const SpMat& A = system.A;
  const int bu = begin_[0], nu = count_[0], bw = begin_[1], nw = count_[1], bp = begin_[2],
            np = count_[2];
  vanka_u_ = make_displacement_vanka(system, 1.0);
  d_w_ = SpMat(A.block(bw, bw, nw, nw)).diagonal();
  A_up_ = sub_block(A, bu, nu, bp, np);
  A_wp_ = sub_block(A, bw, nw, bp, np);
  A_pu_ = sub_block(A, bp, np, bu, nu);
  A_pw_ = sub_block(A, bp, np, bw, nw);

  const double c = prm.inv_M() + prm.alpha * prm.alpha / prm.zeta2();
  Vec mp(np);
  for (int i = 0; i < np; ++i)
    mp[i] = system.M_p[system.free_dofs[bp + i] - system.mesh.field_offset(Field::Pressure)];
  SpMat Dinv(nw, nw);
  Dinv.setIdentity();
  Dinv.diagonal() = d_w_.cwiseInverse();
  S_ = SpMat(A_pw_ * Dinv * A_wp_);
  SpMat C(np, np);
  C.setIdentity();
  C.diagonal() = c * mp;
  S_ += C;
  S_.makeCompressed();
  s_diag_ = S_.diagonal();
  if (mode_ == BsrMode::Exact) {
    s_solver_.compute(S_);
    if (s_solver_.info() != Eigen::Success)
      throw std::runtime_error("Schur approximation is not positive definite");
  }
}

Vec BsrRelaxation::correction(const Vec& r) const {
  const auto ru = r.segment(begin_[0], count_[0]);
  const auto rw = r.segment(begin_[1], count_[1]);
  const auto rp = r.segment(begin_[2], count_[2]);
  const Vec tu = vanka_u_->correction(ru);
  const Vec tw = rw.cwiseQuotient(d_w_);
  const Vec rhs = A_pu_ * tu + A_pw_ * tw - rp;
  Vec dp;
  if (mode_ == BsrMode::Exact)
    dp = s_solver_.solve(rhs);
  else
    dp = omega_j_ * rhs.cwiseQuotient(s_diag_);
  Vec out(r.size());
  out.segment(begin_[0], count_[0]) = vanka_u_->correction(ru - A_up_ * dp);
  out.segment(begin_[1], count_[1]) = (rw - A_wp_ * dp).cwiseQuotient(d_w_);
  out.segment(begin_[2], count_[2]) = dp;
  return omega_ * out;
}

}  // namespace biot
