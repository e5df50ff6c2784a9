#include "biot/krylov.hpp"

#include <cmath>
#include <stdexcept>

namespace biot {

FgmresResult fgmres(const LinearOperator& A, const Vec& b, const LinearOperator& precond,
                    double rtol, int maxiter, const Vec* x0) {
  if (!(rtol > 0.0 && rtol < 1.0)) throw std::invalid_argument("rtol must lie in (0, 1)");
  const int n = static_cast<int>(b.size());
  FgmresResult res;
  res.x = x0 ? *x0 : Vec::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    res.history.push_back(0.0);
    return res;
  }
  Vec r = x0 ? Vec(b - A(res.x)) : b;
  double beta = r.norm();
  res.history.push_back(beta / bnorm);
  if (beta <= rtol * bnorm) {
    res.converged = true;
    return res;
  }
  std::vector<Vec> V, Z;
  V.push_back(r / beta);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(maxiter + 1, maxiter);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(maxiter), sn = Eigen::VectorXd::Zero(maxiter);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(maxiter + 1);
  g[0] = beta;
  int k = 0;
  for (; k < maxiter; ++k) {
    Z.push_back(precond(V[k]));
    Vec w = A(Z[k]);
    for (int i = 0; i <= k; ++i) {
      H(i, k) = w.dot(V[i]);
      w -= H(i, k) * V[i];
    }
    H(k + 1, k) = w.norm();
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
      H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
      H(i, k) = t;
    }
    const double denom = std::hypot(H(k, k), H(k + 1, k));
    cs[k] = H(k, k) / denom;
    sn[k] = H(k + 1, k) / denom;
    H(k, k) = denom;
    H(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    const double rel = std::abs(g[k + 1]) / bnorm;
    res.history.push_back(rel);
    const bool done = rel <= rtol;
    if (done || k + 1 == maxiter || w.norm() == 0.0) {
      ++k;
      res.converged = done;
      break;
    }
    V.push_back(w / w.norm());
  }
  const Eigen::VectorXd y =
      H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
  for (int i = 0; i < k; ++i) res.x += y[i] * Z[i];
  res.iterations = k;
  if (!res.converged) res.converged = (b - A(res.x)).norm() <= rtol * bnorm;
  return res;
}

FgmresResult fgmres(const SpMat& A, const Vec& b, const LinearOperator& precond, double rtol,
                    int maxiter, const Vec* x0) {
  return fgmres([&A](const Vec& v) { return Vec(A * v); }, b, precond, rtol, maxiter, x0);
}

BlockTriangularPreconditioner::BlockTriangularPreconditioner(const Hierarchy& h,
                                                             const BlockPrecondOptions& opt)
    : begin_(h.fine().field_begin), count_(h.fine().field_count), opt_(opt) {
  const BlockSystem& s = h.fine();
  const PhysicalParams& prm = s.params;
  const SpMat& A = s.A;
  const int bu = begin_[0], nu = count_[0], bw = begin_[1], nw = count_[1], bp = begin_[2],
            np = count_[2];
  disp_mg_ = build_displacement_multigrid(h, opt.displacement_omega, opt.nu1, opt.nu2);
  A_uu_ = SpMat(A.block(bu, bu, nu, nu));
  A_up_ = SpMat(A.block(bu, bp, nu, np));
  A_pw_ = SpMat(A.block(bp, bw, np, nw));
  const SpMat A_wp = SpMat(A.block(bw, bp, nw, np));
  const SpMat A_ww = SpMat(A.block(bw, bw, nw, nw));

  Vec mp(np);
  for (int i = 0; i < np; ++i)
    mp[i] = s.M_p[s.free_dofs[bp + i] - s.mesh.field_offset(Field::Pressure)];
  const double cp = prm.c_p();
  s_p_ = mp / cp;
  const double scale = opt.darcy_scaling == DarcyScaling::Cp ? cp : 1.0 / cp;
  SpMat Mpinv(np, np);
  Mpinv.setIdentity();
  Mpinv.diagonal() = mp.cwiseInverse();
  // A_wp M_p^{-1} A_pw = tau^2 B_w^T M_p^{-1} B_w on the free DoFs.
  S_w_ = SpMat(A_ww + scale * SpMat(A_wp * Mpinv * A_pw_));
  bool ok = true;
  if (opt.darcy_solver == DarcyBlockSolver::Direct) {
    w_direct_.compute(S_w_);
    ok = w_direct_.info() == Eigen::Success;
  } else {
    w_ic_.compute(S_w_);
    ok = w_ic_.info() == Eigen::Success;
  }
  if (!ok) throw std::runtime_error("Darcy block of the block preconditioner is not positive definite");
}

Vec BlockTriangularPreconditioner::apply(const Vec& r) {
  const auto ru = r.segment(begin_[0], count_[0]);
  const auto rw = r.segment(begin_[1], count_[1]);
  const auto rp = r.segment(begin_[2], count_[2]);
  Vec zw;
  if (opt_.darcy_solver == DarcyBlockSolver::Direct) {
    zw = w_direct_.solve(Vec(rw));
  } else {
    const FgmresResult dw = fgmres(
        S_w_, Vec(rw), [this](const Vec& v) { return Vec(w_ic_.solve(v)); }, opt_.inner_rtol,
        opt_.inner_maxiter);
    darcy_iterations_ += dw.iterations;
    if (!dw.converged) inner_failed_ = true;
    zw = dw.x;
  }
  const Vec zp = (A_pw_ * zw - rp).cwiseQuotient(s_p_);
  const Vec rhs_u = ru - A_up_ * zp;
  const Multigrid& mg = *disp_mg_;
  const FgmresResult inner = fgmres(
      A_uu_, rhs_u, [&mg](const Vec& v) { return mg.cycle(v, Vec::Zero(v.size())); },
      opt_.inner_rtol, opt_.inner_maxiter);
  inner_iterations_ += inner.iterations;
  if (!inner.converged) inner_failed_ = true;
  Vec z(r.size());
  z.segment(begin_[0], count_[0]) = inner.x;
  z.segment(begin_[1], count_[1]) = zw;
  z.segment(begin_[2], count_[2]) = zp;
  return z;
}

LinearOperator BlockTriangularPreconditioner::as_operator() {
  return [this](const Vec& r) { return apply(r); };
}

}  // namespace biot
