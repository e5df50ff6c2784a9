#include "biot/transfer.hpp"

#include <map>
#include <stdexcept>

#include "biot/quadrature.hpp"
#include "element.hpp"

namespace biot {

using detail::Element;

namespace {

using Entries = std::map<std::pair<int, int>, double>;

void check_pair(const StructuredMesh& fine, const StructuredMesh& coarse) {
  if (fine.is_periodic() != coarse.is_periodic() ||
      fine.cells_per_side() != 2 * coarse.cells_per_side())
    throw std::invalid_argument("fine mesh is not the refinement of the coarse mesh");
}

struct CoarseCell {
  TriangleRef tri;
  std::array<TriangleRef, 3> corners;
  TriangleRef interior;
};

std::vector<CoarseCell> coarse_cells(const StructuredMesh& fine, const StructuredMesh& coarse) {
  std::vector<CoarseCell> out;
  for (const TriangleRef& t : coarse.triangles()) {
    const int I = t.i, J = t.j;
    CoarseCell c{t, {}, {}};
    if (!t.upper) {
      c.corners = {fine.triangle(false, 2 * I, 2 * J), fine.triangle(false, 2 * I + 1, 2 * J),
                   fine.triangle(false, 2 * I, 2 * J + 1)};
      c.interior = fine.triangle(true, 2 * I, 2 * J);
    } else {
      c.corners = {fine.triangle(true, 2 * I + 1, 2 * J + 1), fine.triangle(true, 2 * I + 1, 2 * J),
                   fine.triangle(true, 2 * I, 2 * J + 1)};
      c.interior = fine.triangle(false, 2 * I + 1, 2 * J + 1);
    }
    out.push_back(c);
  }
  return out;
}

std::array<Eigen::Vector2d, 3> lattice_points(const TriangleRef& t, double scale) {
  std::array<Eigen::Vector2d, 3> p;
  for (int a = 0; a < 3; ++a) p[a] = Eigen::Vector2d(scale * t.vertices[a].i, scale * t.vertices[a].j);
  return p;
}

std::array<double, 3> barycentric(const Element& el, const Eigen::Vector2d& x) {
  const double l1 = el.G[1].dot(x - el.X[0]);
  const double l2 = el.G[2].dot(x - el.X[0]);
  return {1.0 - l1 - l2, l1, l2};
}

// Whether both endpoints of fine edge a of `el_f` lie on one edge of the coarse triangle.
bool on_coarse_boundary(const Element& el_c, const Element& el_f, int a) {
  const auto p = barycentric(el_c, el_f.X[(a + 1) % 3]);
  const auto q = barycentric(el_c, el_f.X[(a + 2) % 3]);
  for (int r = 0; r < 3; ++r)
    if (std::abs(p[r]) < 1e-12 && std::abs(q[r]) < 1e-12) return true;
  return false;
}

int fine_bubble_dof(const StructuredMesh& fine, const TriangleRef& t, int a) {
  return fine.dof(detail::bubble_kind(t.edges[a].kind), t.edges[a].i, t.edges[a].j);
}

SpMat to_matrix(int rows, int cols, const Entries& e) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(e.size());
  for (const auto& [rc, v] : e)
    if (std::abs(v) > 1e-13) trip.emplace_back(rc.first, rc.second, v);
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat build_P_u(const StructuredMesh& fine, const StructuredMesh& coarse, bool divfree) {
  check_pair(fine, coarse);
  const LineRule line = gauss_legendre(3);
  Entries P;
  for (const CoarseCell& cc : coarse_cells(fine, coarse)) {
    const Element ec(lattice_points(cc.tri, 2.0), cc.tri);
    std::array<int, 9> cd{};
    for (int a = 0; a < 3; ++a) {
      cd[a] = coarse.dof(DofKind::P1x, cc.tri.vertices[a].i, cc.tri.vertices[a].j);
      cd[a + 3] = coarse.dof(DofKind::P1y, cc.tri.vertices[a].i, cc.tri.vertices[a].j);
      cd[a + 6] = coarse.dof(detail::bubble_kind(cc.tri.edges[a].kind), cc.tri.edges[a].i,
                             cc.tri.edges[a].j);
    }
    std::array<TriangleRef, 4> kids = {cc.corners[0], cc.corners[1], cc.corners[2], cc.interior};
    for (int b = 0; b < 9; ++b) {
      auto value = [&](const Eigen::Vector2d& x) { return ec.disp_value(b, barycentric(ec, x)); };
      // Standard interpolation on all four children.
      for (const TriangleRef& kt : kids) {
        const Element ef(lattice_points(kt, 1.0), kt);
        for (int v = 0; v < 3; ++v) {
          const Eigen::Vector2d val = value(ef.X[v]);
          P[{fine.dof(DofKind::P1x, kt.vertices[v].i, kt.vertices[v].j), cd[b]}] = val.x();
          P[{fine.dof(DofKind::P1y, kt.vertices[v].i, kt.vertices[v].j), cd[b]}] = val.y();
        }
        for (int a = 0; a < 3; ++a) {
          const Eigen::Vector2d A = ef.X[(a + 1) % 3], B = ef.X[(a + 2) % 3];
          const Eigen::Vector2d ua = value(A), ub = value(B);
          const double len = ef.length[a];
          double moment = 0.0;
          for (size_t q = 0; q < line.points.size(); ++q) {
            const double s = line.points[q];
            moment += line.weights[q] * len *
                      (value(A + s * (B - A)) - ((1.0 - s) * ua + s * ub)).dot(ef.normal[a]);
          }
          P[{fine_bubble_dof(fine, kt, a), cd[b]}] = moment / (2.0 * len / 3.0);
        }
      }
      if (!divfree) continue;
      // Corner children: the edge shared with the interior child cancels the net flux.
      for (const TriangleRef& kt : cc.corners) {
        const Element ef(lattice_points(kt, 1.0), kt);
        double flux = 0.0;
        for (int v = 0; v < 3; ++v) flux += value(ef.X[v]).dot(ef.G[v]) * ef.area;
        int inner = -1;
        for (int a = 0; a < 3; ++a) {
          const double bubble_flux = ef.sign[a] * 2.0 * ef.length[a] / 3.0;
          if (on_coarse_boundary(ec, ef, a))
            flux += P[{fine_bubble_dof(fine, kt, a), cd[b]}] * bubble_flux;
          else
            inner = a;
        }
        const double bubble_flux = ef.sign[inner] * 2.0 * ef.length[inner] / 3.0;
        P[{fine_bubble_dof(fine, kt, inner), cd[b]}] = -flux / bubble_flux;
      }
    }
  }
  const int nf = fine.field_size(Field::Displacement);
  const int nc = coarse.field_size(Field::Displacement);
  return to_matrix(nf, nc, P);
}

}  // namespace

SpMat build_P_u_standard(const StructuredMesh& fine, const StructuredMesh& coarse) {
  return build_P_u(fine, coarse, false);
}

SpMat build_P_u_divfree(const StructuredMesh& fine, const StructuredMesh& coarse) {
  return build_P_u(fine, coarse, true);
}

SpMat build_P_w(const StructuredMesh& fine, const StructuredMesh& coarse) {
  check_pair(fine, coarse);
  const int off_f = fine.field_offset(Field::Darcy);
  const int off_c = coarse.field_offset(Field::Darcy);
  Entries P;
  for (const CoarseCell& cc : coarse_cells(fine, coarse)) {
    const Element ec(lattice_points(cc.tri, 2.0), cc.tri);
    std::array<TriangleRef, 4> kids = {cc.corners[0], cc.corners[1], cc.corners[2], cc.interior};
    for (int e = 0; e < 3; ++e) {
      const int col =
          coarse.dof(detail::flux_kind(cc.tri.edges[e].kind), cc.tri.edges[e].i, cc.tri.edges[e].j) -
          off_c;
      for (const TriangleRef& kt : kids) {
        const Element ef(lattice_points(kt, 1.0), kt);
        for (int a = 0; a < 3; ++a) {
          const Eigen::Vector2d mid = 0.5 * (ef.X[(a + 1) % 3] + ef.X[(a + 2) % 3]);
          const double v = ec.flux_value(e, barycentric(ec, mid)).dot(ef.normal[a]);
          const int row =
              fine.dof(detail::flux_kind(kt.edges[a].kind), kt.edges[a].i, kt.edges[a].j) - off_f;
          P[{row, col}] = v;
        }
      }
    }
  }
  return to_matrix(fine.field_size(Field::Darcy), coarse.field_size(Field::Darcy), P);
}

SpMat build_P_p(const StructuredMesh& fine, const StructuredMesh& coarse) {
  check_pair(fine, coarse);
  const int off_f = fine.field_offset(Field::Pressure);
  const int off_c = coarse.field_offset(Field::Pressure);
  Entries P;
  for (const CoarseCell& cc : coarse_cells(fine, coarse)) {
    const int col = coarse.dof(cc.tri.upper ? DofKind::P0Upper : DofKind::P0Lower, cc.tri.i, cc.tri.j) - off_c;
    std::array<TriangleRef, 4> kids = {cc.corners[0], cc.corners[1], cc.corners[2], cc.interior};
    for (const TriangleRef& kt : kids)
      P[{fine.dof(kt.upper ? DofKind::P0Upper : DofKind::P0Lower, kt.i, kt.j) - off_f, col}] = 1.0;
  }
  return to_matrix(fine.field_size(Field::Pressure), coarse.field_size(Field::Pressure), P);
}

SpMat build_P(const StructuredMesh& fine, const StructuredMesh& coarse, bool divfree) {
  const SpMat pu = build_P_u(fine, coarse, divfree);
  const SpMat pw = build_P_w(fine, coarse);
  const SpMat pp = build_P_p(fine, coarse);
  std::vector<Eigen::Triplet<double>> trip;
  auto add = [&](const SpMat& m, int r0, int c0) {
    for (int c = 0; c < m.outerSize(); ++c)
      for (SpMat::InnerIterator it(m, c); it; ++it)
        trip.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), it.value());
  };
  add(pu, 0, 0);
  add(pw, fine.field_offset(Field::Darcy), coarse.field_offset(Field::Darcy));
  add(pp, fine.field_offset(Field::Pressure), coarse.field_offset(Field::Pressure));
  SpMat P(fine.num_dofs(), coarse.num_dofs());
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

SpMat restrict_to_free(const SpMat& P, const BlockSystem& fine, const BlockSystem& coarse) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(P.nonZeros());
  for (int c = 0; c < P.outerSize(); ++c) {
    const int cf = coarse.full_to_free[c];
    if (cf < 0) continue;
    for (SpMat::InnerIterator it(P, c); it; ++it) {
      const int rf = fine.full_to_free[it.row()];
      if (rf >= 0) trip.emplace_back(rf, cf, it.value());
    }
  }
  SpMat out(fine.n_free(), coarse.n_free());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SpMat restriction(const SpMat& P) { return SpMat(P.transpose()); }

}  // namespace biot
