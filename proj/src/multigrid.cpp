#include "biot/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "biot/transfer.hpp"

namespace biot {

Multigrid::Multigrid(std::vector<Level> levels, std::vector<SpMat> prolongation, int nu1, int nu2)
    : levels_(std::move(levels)), P_(std::move(prolongation)), nu1_(nu1), nu2_(nu2) {
  if (levels_.empty()) throw std::invalid_argument("multigrid needs at least one level");
  if (P_.size() + 1 != levels_.size())
    throw std::invalid_argument("one prolongation per pair of adjacent levels required");
  for (const SpMat& P : P_) R_.push_back(restriction(P));
  SpMat Ac = levels_.back().A;
  Ac.makeCompressed();
  coarse_.analyzePattern(Ac);
  coarse_.factorize(Ac);
  if (coarse_.info() != Eigen::Success) throw std::runtime_error("coarsest operator is singular");
}

Vec Multigrid::cycle(const Vec& b, const Vec& x) const { return cycle_at(0, b, x); }

Vec Multigrid::cycle_at(int l, const Vec& b, Vec x) const {
  if (l == num_levels() - 1) return coarse_.solve(b);
  const Level& lev = levels_[l];
  for (int s = 0; s < nu1_; ++s) lev.relax->sweep(lev.A, b, x);
  const Vec rc = R_[l] * (b - lev.A * x);
  const Vec ec = cycle_at(l + 1, rc, Vec::Zero(rc.size()));
  x += P_[l] * ec;
  for (int s = 0; s < nu2_; ++s) lev.relax->sweep(lev.A, b, x);
  return x;
}

namespace {

std::unique_ptr<Relaxation> make_relaxation(const BlockSystem& sys, const CycleConfig& c) {
  switch (c.relax) {
    case RelaxKind::Vanka: {
      VankaOptions o;
      o.patch = c.patch;
      o.omega = c.omega;
      o.drop_pressure_only = c.drop_pressure_only;
      return make_vanka(sys, o);
    }
    case RelaxKind::BsrExact:
      return std::make_unique<BsrRelaxation>(sys, BsrOptions{BsrMode::Exact, c.omega, c.omega_j});
    default:
      return std::make_unique<BsrRelaxation>(sys, BsrOptions{BsrMode::Inexact, c.omega, c.omega_j});
  }
}

SpMat displacement_block(const SpMat& P, const BlockSystem& fine, const BlockSystem& coarse) {
  return SpMat(P.block(0, 0, fine.field_count[0], coarse.field_count[0]));
}

}  // namespace

Hierarchy build_hierarchy(const StructuredMesh& fine_mesh, const PhysicalParams& params,
                          Variant variant, const DirichletSpec& spec, const CycleConfig& config,
                          int levels) {
  if (levels < 1) throw std::invalid_argument("at least one level required");
  Hierarchy h;
  std::vector<StructuredMesh> meshes{fine_mesh};
  for (int l = 1; l < levels; ++l) {
    if (meshes.back().cells_per_side() < 4)
      throw std::invalid_argument("too many levels for this mesh");
    meshes.push_back(coarsen(meshes.back()));
  }
  for (const StructuredMesh& m : meshes) h.systems.push_back(make_system(m, params, variant, spec));

  std::vector<Multigrid::Level> lv;
  std::vector<SpMat> P;
  for (int l = 0; l < levels; ++l) {
    Multigrid::Level L;
    L.A = h.systems[l].A;
    if (l + 1 < levels) {
      L.relax = make_relaxation(h.systems[l], config);
      P.push_back(restrict_to_free(build_P(meshes[l], meshes[l + 1], config.divfree_interpolation), h.systems[l], h.systems[l + 1]));
    }
    lv.push_back(std::move(L));
  }
  h.mg = std::make_unique<Multigrid>(std::move(lv), std::move(P), config.nu1, config.nu2);
  return h;
}

std::unique_ptr<Multigrid> build_displacement_multigrid(const Hierarchy& h, double omega, int nu1,
                                                        int nu2) {
  const int levels = static_cast<int>(h.systems.size());
  std::vector<Multigrid::Level> lv;
  std::vector<SpMat> P;
  for (int l = 0; l < levels; ++l) {
    const BlockSystem& s = h.systems[l];
    const int nu = s.field_count[0];
    Multigrid::Level L;
    L.A = SpMat(s.A.block(0, 0, nu, nu));
    if (l + 1 < levels) {
      L.relax = make_displacement_vanka(s, omega);
      P.push_back(displacement_block(h.mg->prolongation(l), s, h.systems[l + 1]));
    }
    lv.push_back(std::move(L));
  }
  return std::make_unique<Multigrid>(std::move(lv), std::move(P), nu1, nu2);
}

Vec v_cycle(const Hierarchy& h, const Vec& b, const Vec& x) { return h.mg->cycle(b, x); }

RhoResult measure_rho(const Multigrid& mg, const RhoOptions& opt) {
  const SpMat& A = mg.op(0);
  const int n = static_cast<int>(A.rows());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = dist(rng);
  const Vec zero = Vec::Zero(n);
  double r_prev = (A * x).norm();
  RhoResult out;
  std::vector<double> log_factor;
  auto window_mean = [&](int end) {
    double s = 0.0;
    for (int i = end - opt.window; i < end; ++i) s += log_factor[i];
    return std::exp(s / opt.window);
  };
  for (int it = 1; it <= opt.max_iterations; ++it) {
    x = mg.cycle(zero, x);
    const double r = (A * x).norm();
    out.iterations = it;
    if (!std::isfinite(r)) {
      out.diverged = true;
      out.rho = std::numeric_limits<double>::infinity();
      return out;
    }
    const double rho = r_prev > 0.0 ? r / r_prev : 0.0;
    out.history.push_back(rho);
    if (r == 0.0) {
      out.rho = 0.0;
      out.settled = true;
      return out;
    }
    if (rho > opt.divergence_factor) {
      out.rho = rho;
      out.diverged = true;
      return out;
    }
    log_factor.push_back(std::log(rho));
    out.rho = it >= opt.window ? window_mean(it) : rho;
    if (it >= std::max(opt.min_iterations, 2 * opt.window) &&
        std::abs(out.rho - window_mean(it - opt.window)) < opt.change_tol) {
      out.settled = true;
      out.diverged = out.rho >= 1.0;
      return out;
    }
    // Rescale to keep the iterate away from under- and overflow.
    x /= r;
    r_prev = 1.0;
  }
  out.diverged = out.rho >= 1.0;
  return out;
}

}  // namespace biot
