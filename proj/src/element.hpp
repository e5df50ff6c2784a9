// Local basis functions on one triangle of the structured mesh.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "biot/mesh.hpp"

namespace biot::detail {

inline Eigen::Vector2d edge_normal(EdgeKind k) {
  switch (k) {
    case EdgeKind::Diag:
      return Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0);
    case EdgeKind::X:
      return Eigen::Vector2d(1.0, 0.0);
    default:
      return Eigen::Vector2d(0.0, 1.0);
  }
}

inline DofKind bubble_kind(EdgeKind k) {
  return static_cast<DofKind>(kind_index(DofKind::BubbleDiag) + static_cast<int>(k));
}
inline DofKind flux_kind(EdgeKind k) {
  return static_cast<DofKind>(kind_index(DofKind::FluxDiag) + static_cast<int>(k));
}

/// Geometry of one triangle. Local displacement numbering: P1x at the three
/// vertices, P1y at the three vertices, then the bubbles of edges 0, 1, 2
/// (edge a is opposite vertex a). Bubbles are 4 l_b l_c n_e; the flux basis
/// is s (|e| / 2|T|) (x - X_a) with s the sign of n_e against the outward normal.
struct Element {
  std::array<Eigen::Vector2d, 3> X;
  std::array<Eigen::Vector2d, 3> G;  ///< gradients of the barycentric coordinates
  double area = 0.0;
  std::array<EdgeKind, 3> edge_kind{};
  std::array<Eigen::Vector2d, 3> normal;
  std::array<double, 3> length{};
  std::array<double, 3> sign{};

  Element(const TriangleRef& t, double h) {
    for (int a = 0; a < 3; ++a) X[a] = Eigen::Vector2d(t.vertices[a].i * h, t.vertices[a].j * h);
    init(t);
  }
  Element(const std::array<Eigen::Vector2d, 3>& pts, const TriangleRef& t) : X(pts) { init(t); }

  void init(const TriangleRef& t) {
    Eigen::Matrix2d J;
    J.col(0) = X[1] - X[0];
    J.col(1) = X[2] - X[0];
    area = 0.5 * std::abs(J.determinant());
    const Eigen::Matrix2d Ji = J.inverse();
    G[1] = Ji.row(0).transpose();
    G[2] = Ji.row(1).transpose();
    G[0] = -G[1] - G[2];
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      edge_kind[a] = t.edges[a].kind;
      normal[a] = edge_normal(t.edges[a].kind);
      length[a] = (X[b] - X[c]).norm();
      const Eigen::Vector2d mid = 0.5 * (X[b] + X[c]);
      sign[a] = (mid - X[a]).dot(normal[a]) > 0.0 ? 1.0 : -1.0;
    }
  }

  Eigen::Vector2d point(const std::array<double, 3>& L) const {
    return L[0] * X[0] + L[1] * X[1] + L[2] * X[2];
  }

  Eigen::Vector2d disp_value(int a, const std::array<double, 3>& L) const {
    if (a < 3) return Eigen::Vector2d(L[a], 0.0);
    if (a < 6) return Eigen::Vector2d(0.0, L[a - 3]);
    const int e = a - 6, b = (e + 1) % 3, c = (e + 2) % 3;
    return 4.0 * L[b] * L[c] * normal[e];
  }

  /// grad(r, c) = d v_r / d x_c
  Eigen::Matrix2d disp_grad(int a, const std::array<double, 3>& L) const {
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    if (a < 3) {
      g.row(0) = G[a].transpose();
    } else if (a < 6) {
      g.row(1) = G[a - 3].transpose();
    } else {
      const int e = a - 6, b = (e + 1) % 3, c = (e + 2) % 3;
      const Eigen::Vector2d gb = 4.0 * (L[b] * G[c] + L[c] * G[b]);
      g = normal[e] * gb.transpose();
    }
    return g;
  }

  Eigen::Vector2d flux_value(int e, const std::array<double, 3>& L) const {
    return sign[e] * length[e] / (2.0 * area) * (point(L) - X[e]);
  }
  double flux_div(int e) const { return sign[e] * length[e] / area; }
};

}  // namespace biot::detail
