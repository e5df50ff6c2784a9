#include "biot/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace biot {

namespace {

// Legendre polynomial P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    rule.points[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

TriangleRule dunavant_degree4() {
  TriangleRule rule;
  rule.degree = 4;
  const double a = 0.44594849091596488632, wa = 0.22338158967801146570;
  const double b = 0.091576213509770743460, wb = 0.10995174365532186764;
  for (auto [c, w] : {std::pair{a, wa}, std::pair{b, wb}}) {
    const double d = 1.0 - 2.0 * c;
    rule.points.push_back({c, c, d});
    rule.points.push_back({c, d, c});
    rule.points.push_back({d, c, c});
    for (int r = 0; r < 3; ++r) rule.weights.push_back(w);
  }
  return rule;
}

TriangleRule collapsed_gauss(int n) {
  const LineRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.degree = 2 * n - 2;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double s = g.points[a];
      const double t = g.points[b] * (1.0 - s);
      rule.points.push_back({1.0 - s - t, s, t});
      rule.weights.push_back(2.0 * g.weights[a] * g.weights[b] * (1.0 - s));
    }
  return rule;
}

}  // namespace biot
