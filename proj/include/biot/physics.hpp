/** @file physics.hpp
 *  @brief Material parameters and closed-form reference solutions.
 */
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

namespace biot {

struct PhysicalParams {
  double E = 3.0e4;
  double nu = 0.0;
  double alpha = 1.0;
  double M = 1.0e6;  ///< Biot modulus; +infinity is allowed
  double k = 1.0;    ///< scalar permeability, K = k I
  double mu_f = 1.0;
  double tau = 1.0;

  double mu() const;
  double lambda() const;
  /// 1/M, exactly zero for M = +infinity.
  double inv_M() const;
  /// zeta^2 = lambda + 2 mu / d with d = 2.
  double zeta2() const { return lambda() + mu(); }
  double c_p() const;
  /// Throws std::invalid_argument for out-of-range values.
  void validate() const;
};

/// Lame coefficients (mu, lambda) from Young's modulus and Poisson ratio.
std::pair<double, double> lame_from_E_nu(double E, double nu);

enum class ProblemTag { Steady, Smooth, Terzaghi };

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Reference solution together with the data that makes it satisfy the
/// continuous equations:
///   -div(2 mu eps(u)) - lambda grad div u + alpha grad p = g_u
///   (mu_f / k) w + grad p                               = g_w
///   d/dt (p / M + alpha div u) + div w                  = f
struct ExactSolution {
  ProblemTag tag = ProblemTag::Steady;
  std::string name;
  std::function<Vec2(double, double, double)> u;
  /// grad_u(r, c) = d u_r / d x_c
  std::function<Mat2(double, double, double)> grad_u;
  std::function<double(double, double, double)> p;
  std::function<Vec2(double, double, double)> w;
  std::function<Vec2(double, double, double)> g_u;
  std::function<Vec2(double, double, double)> g_w;
  std::function<double(double, double, double)> f;
};

ExactSolution steady_solution(const PhysicalParams& params);
ExactSolution smooth_solution(const PhysicalParams& params);
ExactSolution terzaghi_solution(const PhysicalParams& params, int n_terms = 200);

/// Time scale 1 / (0.25 pi^2 k (lambda + 2 mu)) of the consolidation problem.
double terzaghi_time_scale(const PhysicalParams& params);

}  // namespace biot
