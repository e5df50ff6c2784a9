#include "biot/lfa.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace biot {

namespace {

using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
constexpr double kTapTol = 1e-12;

const std::array<std::array<int, 2>, 4> kHarmonics = {{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

CMat block_diag(const std::array<CMat, 4>& b) {
  CMat out = CMat::Zero(40, 40);
  for (int a = 0; a < 4; ++a) out.block(10 * a, 10 * a, 10, 10) = b[a];
  return out;
}

/// Ruiz equilibration: returns row and column scalings that bring every row and
/// column of diag(r) A diag(c) to unit max-norm.
std::pair<Eigen::VectorXd, Eigen::VectorXd> equilibrate(const CMat& A) {
  const Eigen::Index n = A.rows();
  Eigen::VectorXd r = Eigen::VectorXd::Ones(n), c = Eigen::VectorXd::Ones(n);
  for (int it = 0; it < 20; ++it) {
    const Eigen::MatrixXd B = (r.asDiagonal() * A.cwiseAbs() * c.asDiagonal()).eval();
    const Eigen::VectorXd rn = B.rowwise().maxCoeff(), cn = B.colwise().maxCoeff().transpose();
    if ((rn.array() - 1.0).abs().maxCoeff() < 1e-3 && (cn.array() - 1.0).abs().maxCoeff() < 1e-3)
      break;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (rn[i] > 0.0) r[i] /= std::sqrt(rn[i]);
      if (cn[i] > 0.0) c[i] /= std::sqrt(cn[i]);
    }
  }
  return {r, c};
}

double spectral_radius(const CMat& E) {
  Eigen::ComplexEigenSolver<CMat> es(E, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Theta kind_position(DofKind k) {
  const auto o = kind_offset_in_cell(k);
  return Theta(o[0], o[1]);
}

void StencilOperator::add(DofKind row, DofKind col, double dx, double dy, double value) {
  entries_.push_back({row, col, dx, dy, value});
}

void StencilOperator::add_all(const std::vector<StencilEntry>& entries, double scale) {
  for (const StencilEntry& e : entries) add(e.row, e.col, e.dx, e.dy, scale * e.value);
}

double StencilOperator::coeff(DofKind row, DofKind col, double dx, double dy) const {
  double s = 0.0;
  for (const StencilEntry& e : entries_)
    if (e.row == row && e.col == col && std::abs(e.dx - dx) < kTapTol &&
        std::abs(e.dy - dy) < kTapTol)
      s += e.value;
  return s;
}

CMat StencilOperator::symbol(const Theta& theta) const {
  CMat S = CMat::Zero(kNumDofKinds, kNumDofKinds);
  for (const StencilEntry& e : entries_)
    S(kind_index(e.row), kind_index(e.col)) +=
        e.value * std::exp(cd(0.0, theta[0] * e.dx + theta[1] * e.dy));
  return S;
}

StencilOperator operator_stencil(const PhysicalParams& params, double h, Variant variant) {
  const double mu = params.mu(), lambda = params.lambda(), alpha = params.alpha,
               tau = params.tau;
  StencilOperator op;
  op.add_all(stencils::strain(), 2.0 * mu);
  if (variant == Variant::ExactIntegration) {
    op.add_all(stencils::grad_div(), lambda);
  } else {
    // lambda B_u^T M_p^{-1} B_u with B_u = h * table and M_p = h^2 / 2.
    const auto& B = stencils::div_u();
    for (const StencilEntry& a : B)
      for (const StencilEntry& b : B)
        if (a.row == b.row)
          op.add(a.col, b.col, b.dx - a.dx, b.dy - a.dy, 2.0 * lambda * a.value * b.value);
  }
  op.add_all(stencils::darcy_mass(), tau * params.mu_f * h * h / params.k);
  for (const StencilEntry& e : stencils::div_u()) {
    op.add(e.row, e.col, e.dx, e.dy, alpha * h * e.value);
    op.add(e.col, e.row, -e.dx, -e.dy, alpha * h * e.value);
  }
  for (const StencilEntry& e : stencils::div_w()) {
    op.add(e.row, e.col, e.dx, e.dy, tau * h * e.value);
    op.add(e.col, e.row, -e.dx, -e.dy, tau * h * e.value);
  }
  const double c = params.inv_M() * h * h / 2.0;
  if (c != 0.0) {
    op.add(DofKind::P0Lower, DofKind::P0Lower, 0, 0, -c);
    op.add(DofKind::P0Upper, DofKind::P0Upper, 0, 0, -c);
  }
  return op;
}

CMat symbol_operator(const Theta& theta, const PhysicalParams& params, double h, Variant variant) {
  return operator_stencil(params, h, variant).symbol(theta);
}

CMat symbol_restriction(const Theta& theta00, const std::array<int, 2>& alpha) {
  const Theta th = theta00 + kPi * Theta(alpha[0], alpha[1]);
  CMat R = CMat::Zero(kNumDofKinds, kNumDofKinds);
  for (const StencilEntry& e : stencils::restriction()) {
    const Theta xc = 2.0 * kind_position(e.row);
    const double phase = kPi * (alpha[0] * xc[0] + alpha[1] * xc[1]);
    R(kind_index(e.row), kind_index(e.col)) +=
        e.value * std::exp(cd(0.0, th[0] * e.dx + th[1] * e.dy + phase));
  }
  return R;
}

CMat symbol_restriction_stacked(const Theta& theta00) {
  CMat R(kNumDofKinds, 4 * kNumDofKinds);
  for (int a = 0; a < 4; ++a) R.middleCols(10 * a, 10) = symbol_restriction(theta00, kHarmonics[a]);
  return R;
}

PatchLayout interior_patch(PatchKind kind) {
  using K = DofKind;
  PatchLayout p;
  auto add = [&](K k, double dx, double dy, double w) {
    p.kinds.push_back(k);
    p.offsets.emplace_back(dx, dy);
    p.weights.push_back(w);
  };
  add(K::P1x, 0, 0, 1.0);
  add(K::P1y, 0, 0, 1.0);
  const std::array<K, 2> diag = {K::BubbleDiag, K::FluxDiag};
  const std::array<K, 2> xe = {K::BubbleX, K::FluxX};
  const std::array<K, 2> ye = {K::BubbleY, K::FluxY};
  const int groups = kind == PatchKind::Full20 ? 2 : 1;
  for (int g = 0; g < groups; ++g) {
    add(diag[g], -0.5, 0.5, 0.5);
    add(diag[g], 0.5, -0.5, 0.5);
    add(xe[g], 0, 0.5, 0.5);
    add(xe[g], 0, -0.5, 0.5);
    add(ye[g], 0.5, 0, 0.5);
    add(ye[g], -0.5, 0, 0.5);
  }
  if (kind == PatchKind::Full20) {
    const double t = 1.0 / 3.0;
    add(K::P0Lower, 0.5, 0.5, t);
    add(K::P0Lower, -0.5, 0.5, t);
    add(K::P0Lower, 0.5, -0.5, t);
    add(K::P0Upper, -0.5, 0.5, t);
    add(K::P0Upper, -0.5, -0.5, t);
    add(K::P0Upper, 0.5, -0.5, t);
  }
  return p;
}

namespace {

bool usable_inverse(const Eigen::MatrixXd& K, const Eigen::MatrixXd& inv) {
  if (!inv.allFinite()) return false;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(K.rows(), K.cols());
  return (K * inv - I).cwiseAbs().maxCoeff() < 1e-6;
}

}  // namespace

VankaSymbol::VankaSymbol(const StencilOperator& op, PatchKind kind, double shift)
    : layout_(interior_patch(kind)), n_(static_cast<int>(layout_.kinds.size())) {
  Eigen::MatrixXd K(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) {
      const Theta d = layout_.offsets[b] - layout_.offsets[a];
      K(a, b) = op.coeff(layout_.kinds[a], layout_.kinds[b], d[0], d[1]);
    }
  weighted_inverse_ = K.partialPivLu().inverse();
  if (!usable_inverse(K, weighted_inverse_)) {
    shifted_ = true;
    const Eigen::MatrixXd Ks = K + shift * Eigen::MatrixXd::Identity(n_, n_);
    weighted_inverse_ = Ks.partialPivLu().inverse();
    if (!usable_inverse(Ks, weighted_inverse_))
      weighted_inverse_ = Ks.completeOrthogonalDecomposition().pseudoInverse();
  }
  for (int a = 0; a < n_; ++a) weighted_inverse_.row(a) *= layout_.weights[a];
}

CMat VankaSymbol::operator()(const Theta& theta) const {
  CMat V = CMat::Zero(n_, kNumDofKinds);
  for (int j = 0; j < n_; ++j)
    V(j, kind_index(layout_.kinds[j])) = std::exp(cd(0.0, theta.dot(layout_.offsets[j])));
  return V.adjoint() * weighted_inverse_.cast<cd>() * V;
}

BsrSymbol::BsrSymbol(const PhysicalParams& params, double h, Variant variant, BsrMode mode)
    : op_(operator_stencil(params, h, variant)),
      vanka_u_(op_, PatchKind::Displacement8),
      mode_(mode),
      c_(params.inv_M() + params.alpha * params.alpha / params.zeta2()),
      h_(h) {
  const double tau = params.tau;
  d_w_ = tau * (2.0 / 3.0) * params.mu_f * h * h / params.k;
  double sq = 0.0;
  for (const StencilEntry& e : stencils::div_w())
    if (e.row == DofKind::P0Lower) sq += (tau * h * e.value) * (tau * h * e.value);
  s_diag_ = c_ * h * h / 2.0 + sq / d_w_;
}

std::pair<CMat, CMat> BsrSymbol::parts(const Theta& theta) const {
  const CMat L = op_.symbol(theta);
  const CMat Mv = vanka_u_(theta).topLeftCorner(5, 5);
  const CMat A_pu = L.block(8, 0, 2, 5), A_pw = L.block(8, 5, 2, 3);
  const CMat A_up = L.block(0, 8, 5, 2), A_wp = L.block(5, 8, 3, 2);
  // delta p = G r with G = S^{-1} [A_pu Mv, A_pw / d_w, -I] (exact) or a diagonal scaling.
  CMat F = CMat::Zero(2, 10);
  F.block(0, 0, 2, 5) = A_pu * Mv;
  F.block(0, 5, 2, 3) = A_pw / d_w_;
  F.block(0, 8, 2, 2) = -CMat::Identity(2, 2);
  CMat base = CMat::Zero(10, 10);
  base.block(0, 0, 5, 5) = Mv;
  base.block(5, 5, 3, 3) = CMat::Identity(3, 3) / d_w_;
  CMat back = CMat::Zero(10, 2);
  back.block(0, 0, 5, 2) = -Mv * A_up;
  back.block(5, 0, 3, 2) = -A_wp / d_w_;
  back.block(8, 0, 2, 2) = CMat::Identity(2, 2);
  if (mode_ == BsrMode::Exact) {
    const CMat S = c_ * (h_ * h_ / 2.0) * CMat::Identity(2, 2) + A_pw * A_wp / d_w_;
    const CMat G = S.partialPivLu().solve(F);
    return {base + back * G, CMat::Zero(10, 10)};
  }
  return {base, back * (F / s_diag_)};
}

CMat BsrSymbol::operator()(const Theta& theta, double omega_j) const {
  auto [c0, c1] = parts(theta);
  return c0 + omega_j * c1;
}

CMat symbol_vanka(const Theta& theta, const PhysicalParams& params, double h, PatchKind kind,
                  Variant variant) {
  return VankaSymbol(operator_stencil(params, h, variant), kind)(theta);
}

CMat symbol_bsr(const Theta& theta, const PhysicalParams& params, double h, BsrMode mode,
                double omega_j, Variant variant) {
  return BsrSymbol(params, h, variant, mode)(theta, omega_j);
}

std::vector<Theta> sample_frequencies(int samples) {
  std::vector<Theta> out;
  out.reserve(static_cast<size_t>(samples) * samples);
  for (int j2 = 0; j2 < samples; ++j2)
    for (int j1 = 0; j1 < samples; ++j1)
      out.emplace_back(-kPi / 2 + (j1 + 0.5) * kPi / samples, -kPi / 2 + (j2 + 0.5) * kPi / samples);
  return out;
}

TwoGridLfa::TwoGridLfa(const PhysicalParams& params, const LfaConfig& config)
    : cfg_(config), theta_(sample_frequencies(config.samples)) {
  if (config.samples < 1) throw std::invalid_argument("at least one sample per direction");
  const StencilOperator fine = operator_stencil(params, config.h, config.variant);
  const StencilOperator coarse = operator_stencil(params, 2.0 * config.h, config.variant);
  std::unique_ptr<VankaSymbol> vanka;
  std::unique_ptr<BsrSymbol> bsr;
  if (config.relax == RelaxKind::Vanka)
    vanka = std::make_unique<VankaSymbol>(fine, config.patch);
  else
    bsr = std::make_unique<BsrSymbol>(
        params, config.h, config.variant,
        config.relax == RelaxKind::BsrExact ? BsrMode::Exact : BsrMode::Inexact);

  const size_t n = theta_.size();
  flagged_.assign(n, false);
  L_.resize(n);
  M0_.resize(n);
  M1_.resize(n);
  CG_.resize(n);
  for (size_t s = 0; s < n; ++s) {
    std::array<CMat, 4> L, M0, M1;
    for (int a = 0; a < 4; ++a) {
      const Theta th = theta_[s] + kPi * Theta(kHarmonics[a][0], kHarmonics[a][1]);
      L[a] = fine.symbol(th);
      if (vanka) {
        M0[a] = (*vanka)(th);
        M1[a] = CMat::Zero(10, 10);
      } else {
        std::tie(M0[a], M1[a]) = bsr->parts(th);
      }
    }
    L_[s] = block_diag(L);
    M0_[s] = block_diag(M0);
    M1_[s] = block_diag(M1);
    const CMat LH = coarse.symbol(2.0 * theta_[s]);
    const auto [row_scale, col_scale] = equilibrate(LH);
    const CMat LHs = row_scale.asDiagonal() * LH * col_scale.asDiagonal();
    Eigen::JacobiSVD<CMat> svd(LHs);
    const auto sv = svd.singularValues();
    const double cond = sv[0] / sv[sv.size() - 1];
    if (!std::isfinite(cond) || cond > config.cond_guard) {
      flagged_[s] = true;
      continue;
    }
    const CMat R = symbol_restriction_stacked(theta_[s]);
    const CMat P = 0.25 * R.adjoint();
    const CMat X = col_scale.asDiagonal() *
                   LHs.partialPivLu().solve(row_scale.asDiagonal() * (R * L_[s]));
    CG_[s] = CMat::Identity(40, 40) - P * X;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
}

double TwoGridLfa::rho_at(int s, double omega, double omega_j) const {
  const CMat S = CMat::Identity(40, 40) - omega * (M0_[s] + omega_j * M1_[s]) * L_[s];
  CMat E = CG_[s];
  for (int i = 0; i < cfg_.nu1; ++i) E = E * S;
  for (int i = 0; i < cfg_.nu2; ++i) E = S * E;
  return spectral_radius(E);
}

LfaResult TwoGridLfa::rho(double omega, double omega_j, double abort_above) const {
  LfaResult out;
  out.rho = 0.0;
  for (int s : order_) {
    if (flagged_[s]) {
      ++out.flagged;
      continue;
    }
    const double r = rho_at(s, omega, omega_j);
    if (r > out.rho) {
      out.rho = r;
      out.argmax = theta_[s];
    }
    if (out.rho > abort_above) return out;
  }
  return out;
}

LfaResult rho_lfa(const PhysicalParams& params, const LfaConfig& config) {
  return TwoGridLfa(params, config).rho(config.omega, config.omega_j);
}

OptimizeResult optimize_parameters(const PhysicalParams& params, const LfaConfig& config,
                                   const OptimizeGrid& grid) {
  TwoGridLfa lfa(params, config);
  auto axis = [](double lo, double hi, double step) {
    std::vector<double> v;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) v.push_back(lo + i * step);
    return v;
  };
  const std::vector<double> omegas = axis(grid.omega_min, grid.omega_max, grid.omega_step);
  const std::vector<double> omega_js = config.relax == RelaxKind::BsrInexact
                                           ? axis(grid.omega_j_min, grid.omega_j_max,
                                                  grid.omega_j_step)
                                           : std::vector<double>{config.omega_j};

  // Visit the hardest frequencies first so that poor parameters are rejected early.
  const double w0 = omegas[omegas.size() / 2], wj0 = omega_js[omega_js.size() / 2];
  std::vector<double> rho0(lfa.num_samples(), 0.0);
  for (int s = 0; s < lfa.num_samples(); ++s)
    if (!lfa.flagged(s)) rho0[s] = lfa.rho_at(s, w0, wj0);
  std::vector<int> order(lfa.num_samples());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rho0[a] > rho0[b]; });
  lfa.set_order(order);

  // The maximum over a subset of frequencies bounds the full maximum from below.
  // Grid points are scored on a small subset and then evaluated in order of that
  // bound until the bound exceeds the best full value.
  std::vector<int> subset;
  for (int s : order)
    if (!lfa.flagged(s) && subset.size() < 8) subset.push_back(s);
  struct Candidate {
    double bound, omega, omega_j;
  };
  std::vector<Candidate> cands;
  cands.reserve(omegas.size() * omega_js.size());
  for (double w : omegas)
    for (double wj : omega_js) {
      double lb = 0.0;
      for (int s : subset) lb = std::max(lb, lfa.rho_at(s, w, wj));
      cands.push_back({lb, w, wj});
    }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.bound < b.bound; });

  constexpr double kTie = 1e-12;
  OptimizeResult best;
  best.rho = std::numeric_limits<double>::infinity();
  for (const Candidate& c : cands) {
    if (c.bound > best.rho + kTie) break;
    const LfaResult r = lfa.rho(c.omega, c.omega_j, best.rho + kTie);
    const bool better = r.rho < best.rho - kTie;
    const bool tie_smaller = std::abs(r.rho - best.rho) <= kTie &&
                             (c.omega < best.omega ||
                              (c.omega == best.omega && c.omega_j < best.omega_j));
    if (better || tie_smaller) best = {c.omega, c.omega_j, r.rho, r.flagged};
  }
  return best;
}

double smoothing_factor(const PhysicalParams& params, const LfaConfig& config) {
  const StencilOperator fine = operator_stencil(params, config.h, config.variant);
  std::unique_ptr<VankaSymbol> vanka;
  std::unique_ptr<BsrSymbol> bsr;
  if (config.relax == RelaxKind::Vanka)
    vanka = std::make_unique<VankaSymbol>(fine, config.patch);
  else
    bsr = std::make_unique<BsrSymbol>(
        params, config.h, config.variant,
        config.relax == RelaxKind::BsrExact ? BsrMode::Exact : BsrMode::Inexact);
  const int nu = std::max(1, config.nu1 + config.nu2);
  double mu = 0.0;
  for (const Theta& t : sample_frequencies(config.samples))
    for (int a = 1; a < 4; ++a) {
      const Theta th = t + kPi * Theta(kHarmonics[a][0], kHarmonics[a][1]);
      const CMat Minv = vanka ? (*vanka)(th) : (*bsr)(th, config.omega_j);
      const CMat S = CMat::Identity(10, 10) - config.omega * Minv * fine.symbol(th);
      CMat E = CMat::Identity(10, 10);
      for (int i = 0; i < nu; ++i) E = S * E;
      mu = std::max(mu, std::pow(spectral_radius(E), 1.0 / nu));
    }
  return mu;
}

void write_rho_map_csv(const PhysicalParams& params, const LfaConfig& config, std::ostream& out) {
  TwoGridLfa lfa(params, config);
  out << "theta1,theta2,rho\n";
  char buf[96];
  for (int s = 0; s < lfa.num_samples(); ++s) {
    const double r = lfa.flagged(s) ? std::nan("") : lfa.rho_at(s, config.omega, config.omega_j);
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g\n", lfa.theta(s)[0], lfa.theta(s)[1], r);
    out << buf;
  }
}

}  // namespace biot
