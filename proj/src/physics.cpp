#include "biot/physics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace biot {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::pair<double, double> lame_from_E_nu(double E, double nu) {
  if (!(E > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
  if (!(nu >= 0.0) || !(nu < 0.5))
    throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
  const double mu = E / (2.0 + 2.0 * nu);
  const double lambda = E * nu / ((1.0 - 2.0 * nu) * (1.0 + nu));
  return {mu, lambda};
}

double PhysicalParams::mu() const { return lame_from_E_nu(E, nu).first; }
double PhysicalParams::lambda() const { return lame_from_E_nu(E, nu).second; }
double PhysicalParams::inv_M() const { return std::isinf(M) ? 0.0 : 1.0 / M; }
double PhysicalParams::c_p() const { return 1.0 / (alpha * alpha / zeta2() + inv_M()); }

void PhysicalParams::validate() const {
  lame_from_E_nu(E, nu);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(M > 0.0)) throw std::invalid_argument("Biot modulus must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("permeability must be positive");
  if (!(mu_f > 0.0)) throw std::invalid_argument("fluid viscosity must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
}

ExactSolution steady_solution(const PhysicalParams& params) {
  const double mu = params.mu();
  auto a = [](double s) { return s * s * (1 - s) * (1 - s); };
  auto a1 = [](double s) { return 2 * s - 6 * s * s + 4 * s * s * s; };
  auto a2 = [](double s) { return 2 - 12 * s + 12 * s * s; };
  auto a3 = [](double s) { return -12 + 24 * s; };

  ExactSolution ex;
  ex.tag = ProblemTag::Steady;
  ex.name = "steady";
  ex.u = [=](double x, double y, double) { return Vec2(a(x) * a1(y), -a1(x) * a(y)); };
  ex.grad_u = [=](double x, double y, double) {
    Mat2 g;
    g << a1(x) * a1(y), a(x) * a2(y), -a2(x) * a(y), -a1(x) * a1(y);
    return g;
  };
  ex.p = [](double, double, double) { return 1.0; };
  ex.w = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.g_u = [=](double x, double y, double) {
    const double lap_x = a2(x) * a1(y) + a(x) * a3(y);
    const double lap_y = -a3(x) * a(y) - a1(x) * a2(y);
    return Vec2(-mu * lap_x, -mu * lap_y);
  };
  ex.g_w = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.f = [](double, double, double) { return 0.0; };
  return ex;
}

ExactSolution smooth_solution(const PhysicalParams& params) {
  const double mu = params.mu();
  const double lam = params.lambda();
  if (!(mu + lam > 0.0)) throw std::invalid_argument("mu + lambda must be positive");
  const double kap = 1.0 / (mu + lam);
  const double alpha = params.alpha;
  const double inv_m = params.inv_M();
  const double mob = params.k / params.mu_f;

  ExactSolution ex;
  ex.tag = ProblemTag::Smooth;
  ex.name = "smooth";
  ex.u = [=](double x, double y, double t) {
    const double e = std::exp(-t);
    return Vec2(e * std::sin(kPi * y) * (-std::cos(kPi * x) + kap * std::sin(kPi * x)),
                e * std::sin(kPi * x) * (std::cos(kPi * y) + kap * std::sin(kPi * y)));
  };
  ex.grad_u = [=](double x, double y, double t) {
    const double e = std::exp(-t);
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    Mat2 g;
    g << e * sy * kPi * (sx + kap * cx), e * kPi * cy * (-cx + kap * sx),
        e * kPi * cx * (cy + kap * sy), e * sx * kPi * (-sy + kap * cy);
    return g;
  };
  ex.p = [](double x, double y, double t) {
    return std::exp(-t) * std::sin(kPi * x) * std::sin(kPi * y);
  };
  auto grad_p = [](double x, double y, double t) {
    const double e = std::exp(-t);
    return Vec2(e * kPi * std::cos(kPi * x) * std::sin(kPi * y),
                e * kPi * std::sin(kPi * x) * std::cos(kPi * y));
  };
  ex.w = [=](double x, double y, double t) -> Vec2 { return -mob * grad_p(x, y, t); };
  ex.g_u = [=, u = ex.u](double x, double y, double t) -> Vec2 {
    const double c = std::exp(-t) * kPi * kPi * std::cos(kPi * (x + y));
    return 2.0 * kPi * kPi * mu * u(x, y, t) - Vec2(c, c) + alpha * grad_p(x, y, t);
  };
  ex.g_w = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.f = [=, p = ex.p](double x, double y, double t) {
    const double pv = p(x, y, t);
    const double div_u = std::exp(-t) * kPi * kap * std::sin(kPi * (x + y));
    return -pv * inv_m - alpha * div_u + 2.0 * kPi * kPi * mob * pv;
  };
  return ex;
}

double terzaghi_time_scale(const PhysicalParams& params) {
  return 1.0 / (0.25 * kPi * kPi * params.k * (params.lambda() + 2.0 * params.mu()));
}

ExactSolution terzaghi_solution(const PhysicalParams& params, int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("Terzaghi series needs at least one term");
  if (params.inv_M() != 0.0)
    throw std::invalid_argument("Terzaghi solution requires an infinite Biot modulus");
  const double stiff = params.lambda() + 2.0 * params.mu();
  const double alpha = params.alpha;
  const double mob = params.k / params.mu_f;
  const double cv = mob * stiff / (alpha * alpha);
  const double p0 = 1.0;

  // Partial sums of the series; the t = 0 state is the loaded initial condition.
  struct Sums {
    double p, int_p, dp;
  };
  auto sums = [=](double x, double t) -> Sums {
    if (t <= 0.0) return {p0, p0 * x, 0.0};
    Sums s{0.0, 0.0, 0.0};
    for (int i = 0; i < n_terms; ++i) {
      const double m = 2.0 * i + 1.0;
      const double c = 0.5 * m * kPi;
      const double e = std::exp(-c * c * cv * t);
      if (e == 0.0) break;
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      s.p += 4.0 * p0 / kPi * sign / m * e * std::cos(c * x);
      s.int_p += 8.0 * p0 / (kPi * kPi) * sign / (m * m) * e * std::sin(c * x);
      s.dp += -2.0 * p0 * sign * e * std::sin(c * x);
    }
    return s;
  };

  ExactSolution ex;
  ex.tag = ProblemTag::Terzaghi;
  ex.name = "terzaghi";
  ex.p = [=](double x, double, double t) { return sums(x, t).p; };
  ex.u = [=](double x, double, double t) {
    return Vec2((alpha * sums(x, t).int_p - p0 * x) / stiff, 0.0);
  };
  ex.grad_u = [=](double x, double, double t) {
    Mat2 g = Mat2::Zero();
    g(0, 0) = (alpha * sums(x, t).p - p0) / stiff;
    return g;
  };
  ex.w = [=](double x, double, double t) { return Vec2(-mob * sums(x, t).dp, 0.0); };
  ex.g_u = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.g_w = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.f = [](double, double, double) { return 0.0; };
  return ex;
}

}  // namespace biot
