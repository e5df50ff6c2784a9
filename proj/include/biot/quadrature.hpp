/** @file quadrature.hpp
 *  @brief Quadrature rules on the unit interval and on triangles.
 */
#pragma once

#include <array>
#include <vector>

namespace biot {

/// Rule on [0,1]; weights sum to one.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Rule in barycentric coordinates; weights sum to one (multiply by the area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

LineRule gauss_legendre(int n);
/// Six-point rule, exact for polynomials of degree 4.
TriangleRule dunavant_degree4();
/// Conical product of Gauss rules, exact for polynomials of degree 2n - 2.
TriangleRule collapsed_gauss(int n);

}  // namespace biot
