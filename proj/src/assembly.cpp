#include "biot/assembly.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "biot/quadrature.hpp"
#include "element.hpp"

namespace biot {

using detail::Element;

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::array<int, 9> disp_dofs(const StructuredMesh& mesh, const TriangleRef& t) {
  std::array<int, 9> d{};
  for (int a = 0; a < 3; ++a) {
    d[a] = mesh.dof(DofKind::P1x, t.vertices[a].i, t.vertices[a].j);
    d[a + 3] = mesh.dof(DofKind::P1y, t.vertices[a].i, t.vertices[a].j);
    d[a + 6] = mesh.dof(detail::bubble_kind(t.edges[a].kind), t.edges[a].i, t.edges[a].j);
  }
  return d;
}

std::array<int, 3> flux_dofs(const StructuredMesh& mesh, const TriangleRef& t) {
  std::array<int, 3> d{};
  const int off = mesh.field_offset(Field::Darcy);
  for (int a = 0; a < 3; ++a)
    d[a] = mesh.dof(detail::flux_kind(t.edges[a].kind), t.edges[a].i, t.edges[a].j) - off;
  return d;
}

int pressure_dof(const StructuredMesh& mesh, const TriangleRef& t) {
  return mesh.dof(t.upper ? DofKind::P0Upper : DofKind::P0Lower, t.i, t.j) -
         mesh.field_offset(Field::Pressure);
}

SpMat from_triplets(int rows, int cols, const Triplets& trip) {
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.prune(0.0);
  return m;
}

// Appends block `m` at (r0, c0) scaled by s.
void append_block(Triplets& trip, const SpMat& m, int r0, int c0, double s) {
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()),
                        s * it.value());
}

// Endpoints of an edge entity in lattice coordinates.
std::pair<Index2, Index2> edge_endpoints(EdgeKind k, int i, int j) {
  switch (k) {
    case EdgeKind::Diag:
      return {{i, j + 1}, {i + 1, j}};
    case EdgeKind::X:
      return {{i, j}, {i, j + 1}};
    default:
      return {{i, j}, {i + 1, j}};
  }
}

}  // namespace

DirichletSpec DirichletSpec::displacement_and_flux(unsigned flux_faces) {
  DirichletSpec s;
  for (DofKind k : {DofKind::P1x, DofKind::P1y, DofKind::BubbleDiag, DofKind::BubbleX,
                    DofKind::BubbleY})
    s.entries.push_back({k, face::All});
  for (DofKind k : {DofKind::FluxDiag, DofKind::FluxX, DofKind::FluxY})
    s.entries.push_back({k, flux_faces});
  return s;
}

Vec BlockSystem::to_free(const Vec& full) const {
  Vec out(n_free());
  for (int r = 0; r < n_free(); ++r) out[r] = full[free_dofs[r]];
  return out;
}

Vec BlockSystem::to_full(const Vec& free, const Vec& fill) const {
  Vec out = fill;
  for (int r = 0; r < n_free(); ++r) out[free_dofs[r]] = free[r];
  return out;
}

BlockSystem assemble_blocks(const StructuredMesh& mesh, const PhysicalParams& params,
                            Variant variant) {
  params.validate();
  const int nu = mesh.field_size(Field::Displacement);
  const int nw = mesh.field_size(Field::Darcy);
  const int np = mesh.field_size(Field::Pressure);
  const double h = mesh.h();
  const TriangleRule rule = dunavant_degree4();
  const double mw_scale = params.mu_f / params.k;

  Triplets t_eps, t_gd, t_bu, t_mw, t_bw;
  Vec mp = Vec::Zero(np);
  for (const TriangleRef& t : mesh.triangles()) {
    const Element el(t, h);
    const auto ud = disp_dofs(mesh, t);
    const auto wd = flux_dofs(mesh, t);
    const int pd = pressure_dof(mesh, t);

    Eigen::Matrix<double, 9, 9> ke = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 9> kd = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 1> bu = Eigen::Matrix<double, 9, 1>::Zero();
    Eigen::Matrix3d mw = Eigen::Matrix3d::Zero();
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& L = rule.points[q];
      const double w = rule.weights[q] * el.area;
      std::array<Eigen::Matrix2d, 9> eps;
      std::array<double, 9> div{};
      for (int a = 0; a < 9; ++a) {
        const Eigen::Matrix2d g = el.disp_grad(a, L);
        eps[a] = 0.5 * (g + g.transpose());
        div[a] = g.trace();
      }
      for (int a = 0; a < 9; ++a) {
        for (int b = 0; b < 9; ++b) {
          ke(a, b) += w * eps[a].cwiseProduct(eps[b]).sum();
          kd(a, b) += w * div[a] * div[b];
        }
        bu(a) -= w * div[a];
      }
      std::array<Eigen::Vector2d, 3> psi;
      for (int e = 0; e < 3; ++e) psi[e] = el.flux_value(e, L);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) mw(a, b) += w * mw_scale * psi[a].dot(psi[b]);
    }
    for (int a = 0; a < 9; ++a) {
      for (int b = 0; b < 9; ++b) {
        t_eps.emplace_back(ud[a], ud[b], ke(a, b));
        t_gd.emplace_back(ud[a], ud[b], kd(a, b));
      }
      t_bu.emplace_back(pd, ud[a], bu(a));
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) t_mw.emplace_back(wd[a], wd[b], mw(a, b));
      t_bw.emplace_back(pd, wd[a], -el.flux_div(a) * el.area);
    }
    mp[pd] += el.area;
  }

  BlockSystem s;
  s.mesh = mesh;
  s.params = params;
  s.variant = variant;
  s.A_eps = from_triplets(nu, nu, t_eps);
  s.grad_div = from_triplets(nu, nu, t_gd);
  s.B_u = from_triplets(np, nu, t_bu);
  s.M_w = from_triplets(nw, nw, t_mw);
  s.B_w = from_triplets(np, nw, t_bw);
  s.M_p = mp;

  const double mu = params.mu(), lam = params.lambda();
  if (variant == Variant::ReducedQuadrature) {
    const Vec inv_mp = mp.cwiseInverse();
    const SpMat proj = SpMat(s.B_u.transpose()) * inv_mp.asDiagonal() * s.B_u;
    s.A_u = 2.0 * mu * s.A_eps + lam * proj;
  } else {
    s.A_u = 2.0 * mu * s.A_eps + lam * s.grad_div;
  }
  s.A_u.prune(0.0);

  const double alpha = params.alpha, tau = params.tau;
  Triplets tk;
  append_block(tk, s.A_u, 0, 0, 1.0);
  append_block(tk, s.M_w, nu, nu, tau);
  const SpMat but = s.B_u.transpose();
  const SpMat bwt = s.B_w.transpose();
  append_block(tk, but, 0, nu + nw, alpha);
  append_block(tk, bwt, nu, nu + nw, tau);
  append_block(tk, s.B_u, nu + nw, 0, alpha);
  append_block(tk, s.B_w, nu + nw, nu, tau);
  if (params.inv_M() != 0.0)
    for (int r = 0; r < np; ++r) tk.emplace_back(nu + nw + r, nu + nw + r, -params.inv_M() * mp[r]);
  s.K = from_triplets(nu + nw + np, nu + nw + np, tk);

  apply_dirichlet(s, DirichletSpec::none());
  return s;
}

void apply_dirichlet(BlockSystem& s, const DirichletSpec& spec) {
  const StructuredMesh& mesh = s.mesh;
  const int n = s.n_full();
  std::vector<char> fixed(n, 0);
  for (const auto& e : spec.entries) {
    if (field_of(e.kind) == Field::Pressure)
      throw std::invalid_argument("pressure DoFs cannot carry Dirichlet constraints");
    for (int d : mesh.boundary_dofs(e.kind, e.faces)) fixed[d] = 1;
  }
  s.free_dofs.clear();
  s.constrained.clear();
  s.full_to_free.assign(n, -1);
  for (int d = 0; d < n; ++d) {
    if (fixed[d]) {
      s.constrained.push_back(d);
    } else {
      s.full_to_free[d] = static_cast<int>(s.free_dofs.size());
      s.free_dofs.push_back(d);
    }
  }
  const int nf = static_cast<int>(s.free_dofs.size());
  const int nc = static_cast<int>(s.constrained.size());
  std::vector<int> col_map(n, -1);
  for (int c = 0; c < nc; ++c) col_map[s.constrained[c]] = c;

  Triplets tf, tc;
  for (int c = 0; c < s.K.outerSize(); ++c)
    for (SpMat::InnerIterator it(s.K, c); it; ++it) {
      const int rf = s.full_to_free[it.row()];
      if (rf < 0) continue;
      const int cf = s.full_to_free[it.col()];
      if (cf >= 0)
        tf.emplace_back(rf, cf, it.value());
      else
        tc.emplace_back(rf, col_map[it.col()], it.value());
    }
  s.A = from_triplets(nf, nf, tf);
  s.A_fc = from_triplets(nf, nc, tc);

  const std::array<Field, 3> fields = {Field::Displacement, Field::Darcy, Field::Pressure};
  for (int f = 0; f < 3; ++f) {
    const int b = mesh.field_offset(fields[f]);
    const int e = b + mesh.field_size(fields[f]);
    int first = -1, count = 0;
    for (int d = b; d < e; ++d)
      if (s.full_to_free[d] >= 0) {
        if (first < 0) first = s.full_to_free[d];
        ++count;
      }
    s.field_begin[f] = first < 0 ? (f == 0 ? 0 : s.field_begin[f - 1] + s.field_count[f - 1]) : first;
    s.field_count[f] = count;
  }
}

BlockSystem make_system(const StructuredMesh& mesh, const PhysicalParams& params, Variant variant,
                        const DirichletSpec& spec) {
  BlockSystem s = assemble_blocks(mesh, params, variant);
  apply_dirichlet(s, spec);
  return s;
}

Vec interpolate(const StructuredMesh& mesh, const ExactSolution& exact, double t) {
  const double h = mesh.h();
  Vec x = Vec::Zero(mesh.num_dofs());
  const LineRule line = gauss_legendre(4);
  const TriangleRule tri = collapsed_gauss(5);

  for (DofKind k : {DofKind::P1x, DofKind::P1y}) {
    const int comp = k == DofKind::P1x ? 0 : 1;
    for (int l = 0; l < mesh.kind_size(k); ++l) {
      const int g = mesh.kind_offset(k) + l;
      const auto d = mesh.dof_info(g);
      x[g] = exact.u(d.i * h, d.j * h, t)[comp];
    }
  }
  for (EdgeKind e : {EdgeKind::Diag, EdgeKind::X, EdgeKind::Y}) {
    const Eigen::Vector2d n = detail::edge_normal(e);
    for (bool flux : {false, true}) {
      const DofKind k = flux ? detail::flux_kind(e) : detail::bubble_kind(e);
      for (int l = 0; l < mesh.kind_size(k); ++l) {
        const int g = mesh.kind_offset(k) + l;
        const auto d = mesh.dof_info(g);
        const auto [pa, pb] = edge_endpoints(e, d.i, d.j);
        const Eigen::Vector2d A(pa.i * h, pa.j * h), B(pb.i * h, pb.j * h);
        const double len = (B - A).norm();
        double moment = 0.0;
        if (flux) {
          for (size_t q = 0; q < line.points.size(); ++q) {
            const Eigen::Vector2d p = A + line.points[q] * (B - A);
            moment += line.weights[q] * exact.w(p.x(), p.y(), t).dot(n);
          }
          x[g] = moment;
        } else {
          const Vec2 ua = exact.u(A.x(), A.y(), t), ub = exact.u(B.x(), B.y(), t);
          for (size_t q = 0; q < line.points.size(); ++q) {
            const double s = line.points[q];
            const Eigen::Vector2d p = A + s * (B - A);
            const Vec2 lin = (1.0 - s) * ua + s * ub;
            moment += line.weights[q] * len * (exact.u(p.x(), p.y(), t) - lin).dot(n);
          }
          x[g] = moment / (2.0 * len / 3.0);
        }
      }
    }
  }
  for (const TriangleRef& tr : mesh.triangles()) {
    const Element el(tr, h);
    double avg = 0.0;
    for (size_t q = 0; q < tri.weights.size(); ++q) {
      const Eigen::Vector2d p = el.point(tri.points[q]);
      avg += tri.weights[q] * exact.p(p.x(), p.y(), t);
    }
    x[mesh.dof(tr.upper ? DofKind::P0Upper : DofKind::P0Lower, tr.i, tr.j)] = avg;
  }
  return x;
}

TransientState initial_state(const BlockSystem& system, const ExactSolution& exact, double t0) {
  return TransientState{interpolate(system.mesh, exact, t0), t0, 0};
}

Vec build_rhs(const BlockSystem& s, const ExactSolution& exact, const TransientState& prev) {
  const StructuredMesh& mesh = s.mesh;
  const PhysicalParams& prm = s.params;
  const double t = prev.t + prm.tau;
  const int nu = mesh.field_size(Field::Displacement);
  const int nw = mesh.field_size(Field::Darcy);
  const int np = mesh.field_size(Field::Pressure);
  const TriangleRule rule = collapsed_gauss(5);
  Vec b = Vec::Zero(nu + nw + np);

  for (const TriangleRef& tr : mesh.triangles()) {
    const Element el(tr, mesh.h());
    const auto ud = disp_dofs(mesh, tr);
    const auto wd = flux_dofs(mesh, tr);
    const int pd = pressure_dof(mesh, tr);
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& L = rule.points[q];
      const double w = rule.weights[q] * el.area;
      const Eigen::Vector2d p = el.point(L);
      const Vec2 gu = exact.g_u(p.x(), p.y(), t);
      const Vec2 gw = exact.g_w(p.x(), p.y(), t);
      const double f = exact.f(p.x(), p.y(), t);
      for (int a = 0; a < 9; ++a) b[ud[a]] += w * gu.dot(el.disp_value(a, L));
      for (int e = 0; e < 3; ++e) b[nu + wd[e]] += prm.tau * w * gw.dot(el.flux_value(e, L));
      b[nu + nw + pd] -= prm.tau * w * f;
    }
  }
  // Natural pressure data on boundary edges whose flux is not prescribed.
  const LineRule line = gauss_legendre(4);
  const double h = mesh.h();
  for (EdgeKind e : {EdgeKind::X, EdgeKind::Y}) {
    const DofKind k = detail::flux_kind(e);
    for (int g : mesh.boundary_dofs(k)) {
      if (s.full_to_free[g] < 0) continue;
      const auto d = mesh.dof_info(g);
      const unsigned faces = mesh.boundary_faces(k, d.i, d.j);
      const double outward = (faces & (face::Right | face::Top)) ? 1.0 : -1.0;
      const auto [pa, pb] = edge_endpoints(e, d.i, d.j);
      const Eigen::Vector2d A(pa.i * h, pa.j * h), B(pb.i * h, pb.j * h);
      double pint = 0.0;
      for (size_t q = 0; q < line.points.size(); ++q) {
        const Eigen::Vector2d p = A + line.points[q] * (B - A);
        pint += line.weights[q] * h * exact.p(p.x(), p.y(), t);
      }
      b[g] -= prm.tau * outward * pint;
    }
  }
  const Vec u_prev = prev.x.head(nu);
  const Vec p_prev = prev.x.tail(np);
  b.tail(np) += prm.alpha * (s.B_u * u_prev) - prm.inv_M() * s.M_p.cwiseProduct(p_prev);
  return b;
}

Vec reduced_rhs(const BlockSystem& s, const Vec& full_rhs, const Vec& boundary_values) {
  Vec g(s.constrained.size());
  for (size_t c = 0; c < s.constrained.size(); ++c) g[c] = boundary_values[s.constrained[c]];
  Vec b = s.to_free(full_rhs);
  if (g.size() > 0) b -= s.A_fc * g;
  return b;
}

TransientState step(const BlockSystem& s, const ExactSolution& exact, const TransientState& prev,
                    const LinearSolver& solver, SolveReport* report) {
  const double t = prev.t + s.params.tau;
  const Vec bc = interpolate(s.mesh, exact, t);
  const Vec b = reduced_rhs(s, build_rhs(s, exact, prev), bc);
  SolveReport rep = solver(b);
  if (report) *report = rep;
  if (!rep.converged) throw std::runtime_error("linear solver did not converge");
  return TransientState{s.to_full(rep.x, bc), t, prev.step + 1};
}

ErrorNorms error_norms(const StructuredMesh& mesh, const Vec& x, const ExactSolution& exact,
                       double t) {
  const TriangleRule rule = collapsed_gauss(6);
  const int p_off = mesh.field_offset(Field::Pressure);
  double eu = 0.0, ep = 0.0;
  for (const TriangleRef& tr : mesh.triangles()) {
    const Element el(tr, mesh.h());
    const auto ud = disp_dofs(mesh, tr);
    const double ph = x[p_off + pressure_dof(mesh, tr)];
    for (size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& L = rule.points[q];
      const double w = rule.weights[q] * el.area;
      const Eigen::Vector2d p = el.point(L);
      Mat2 gh = Mat2::Zero();
      for (int a = 0; a < 9; ++a) gh += x[ud[a]] * el.disp_grad(a, L);
      eu += w * (exact.grad_u(p.x(), p.y(), t) - gh).squaredNorm();
      const double dp = exact.p(p.x(), p.y(), t) - ph;
      ep += w * dp * dp;
    }
  }
  return {std::sqrt(eu), std::sqrt(ep)};
}

void write_coordinate(const SpMat& m, std::ostream& out) {
  std::vector<std::tuple<int, int, double>> e;
  e.reserve(m.nonZeros());
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it)
      e.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(e.begin(), e.end());
  char buf[96];
  for (const auto& [r, c, v] : e) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r, c, v);
    out << buf;
  }
}

}  // namespace biot
