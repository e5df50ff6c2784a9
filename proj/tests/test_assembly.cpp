// Global assembly, Dirichlet elimination, right-hand sides and error norms.
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <random>
#include <sstream>

#include "biot/assembly.hpp"
#include "biot/experiments.hpp"
#include "biot/quadrature.hpp"

namespace biot {
namespace {

PhysicalParams params_for(double nu, double k) {
  PhysicalParams p;
  p.nu = nu;
  p.k = k;
  return p;
}

double max_abs(const SpMat& m) {
  double v = 0.0;
  for (int c = 0; c < m.outerSize(); ++c)
    for (SpMat::InnerIterator it(m, c); it; ++it) v = std::max(v, std::abs(it.value()));
  return v;
}

int disp(const StructuredMesh& m, DofKind k, int i, int j) { return m.dof(k, i, j); }
int flux(const StructuredMesh& m, DofKind k, int i, int j) {
  return m.dof(k, i, j) - m.field_offset(Field::Darcy);
}

TEST(Blocks, StrainStencilAtInteriorVertex) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  const PhysicalParams p = params_for(0.3, 1.0);
  const BlockSystem s = assemble_blocks(m, p, Variant::ReducedQuadrature);
  const double mu = p.mu();
  const SpMat A = 2.0 * mu * s.A_eps;
  const int c = disp(m, DofKind::P1x, 4, 4);
  const auto at = [&](int i, int j) { return A.coeff(c, disp(m, DofKind::P1x, i, j)); };
  EXPECT_NEAR(at(4, 4), 6 * mu, 1e-9 * mu);
  EXPECT_NEAR(at(3, 4), -2 * mu, 1e-9 * mu);
  EXPECT_NEAR(at(5, 4), -2 * mu, 1e-9 * mu);
  EXPECT_NEAR(at(4, 3), -mu, 1e-9 * mu);
  EXPECT_NEAR(at(4, 5), -mu, 1e-9 * mu);
  EXPECT_NEAR(at(3, 3), 0.0, 1e-9 * mu);
  EXPECT_NEAR(at(5, 5), 0.0, 1e-9 * mu);
}

TEST(Blocks, DarcyMassDiagonalEdgeRow) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  const PhysicalParams p = params_for(0.3, 1e-3);
  const BlockSystem s = assemble_blocks(m, p, Variant::ReducedQuadrature);
  const double h = m.h();
  const int r = flux(m, DofKind::FluxDiag, 3, 4);
  EXPECT_NEAR(s.M_w.coeff(r, r), 2.0 * p.mu_f * h * h / (3.0 * p.k), 1e-12 * s.M_w.coeff(r, r));
  for (SpMat::InnerIterator it(s.M_w, r); it; ++it) {
    if (it.index() == r) continue;
    const DofKind k = m.dof_info(it.index() + m.field_offset(Field::Darcy)).kind;
    EXPECT_NE(k, DofKind::FluxDiag);
    EXPECT_NEAR(it.value(), 0.0, 1e-12 * s.M_w.coeff(r, r)) << kind_name(k);
  }
}

TEST(Blocks, PressureMassIsHalfCellArea) {
  const StructuredMesh m = StructuredMesh::uniform(17);
  const BlockSystem s = assemble_blocks(m, params_for(0.2, 1.0), Variant::ReducedQuadrature);
  for (int i = 0; i < s.M_p.size(); ++i) EXPECT_NEAR(s.M_p[i], m.h() * m.h() / 2.0, 1e-16);
}

TEST(Blocks, ReducedQuadratureSplitting) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  const PhysicalParams p = params_for(0.45, 1.0);
  const BlockSystem s = assemble_blocks(m, p, Variant::ReducedQuadrature);
  const SpMat expected =
      2.0 * p.mu() * s.A_eps +
      p.lambda() * SpMat(s.B_u.transpose() * s.M_p.cwiseInverse().asDiagonal() * s.B_u);
  EXPECT_LT(max_abs(s.A_u - expected), 1e-10 * max_abs(s.A_u));
}

TEST(Blocks, VariantsDifferOnlyInDisplacementBlock) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  const PhysicalParams p = params_for(0.4, 1e-4);
  const BlockSystem rq = assemble_blocks(m, p, Variant::ReducedQuadrature);
  const BlockSystem ex = assemble_blocks(m, p, Variant::ExactIntegration);
  EXPECT_EQ(max_abs(rq.B_u - ex.B_u), 0.0);
  EXPECT_EQ(max_abs(rq.B_w - ex.B_w), 0.0);
  EXPECT_EQ(max_abs(rq.M_w - ex.M_w), 0.0);
  EXPECT_EQ((rq.M_p - ex.M_p).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(max_abs(rq.A_u - ex.A_u), 0.0);
  const SpMat expected = 2.0 * p.mu() * ex.A_eps + p.lambda() * ex.grad_div;
  EXPECT_LT(max_abs(ex.A_u - expected), 1e-10 * max_abs(ex.A_u));
}

TEST(Blocks, MonolithicOperatorSymmetric) {
  for (Variant v : {Variant::ReducedQuadrature, Variant::ExactIntegration}) {
    BlockSystem s = make_system(StructuredMesh::uniform(9), params_for(0.49, 1e-6), v,
                                DirichletSpec::displacement_and_flux());
    const SpMat Kt = s.K.transpose();
    EXPECT_LT(max_abs(s.K - Kt), 1e-12 * max_abs(s.K));
    const SpMat At = s.A.transpose();
    EXPECT_LT(max_abs(s.A - At), 1e-12 * max_abs(s.A));
  }
}

class RandomVectors : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(RandomVectors, ProjectedDivergenceBoundedByExactDivergence) {
  const auto [nu, k] = GetParam();
  const BlockSystem s = assemble_blocks(StructuredMesh::uniform(9), params_for(nu, k),
                                        Variant::ReducedQuadrature);
  const SpMat P = SpMat(s.B_u.transpose() * s.M_p.cwiseInverse().asDiagonal() * s.B_u);
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec v(s.A_u.rows());
    for (int i = 0; i < v.size(); ++i) v[i] = u(gen);
    const double proj = v.dot(P * v), full = v.dot(s.grad_div * v);
    EXPECT_LE(proj, full * (1.0 + 1e-12));
  }
}

TEST_P(RandomVectors, ProjectedDivergenceBoundedByEnergy) {
  // ||P_Q div u||^2 <= ||u||^2_{A_u} / zeta^2 with zeta^2 = lambda + mu.
  const auto [nu, k] = GetParam();
  const PhysicalParams p = params_for(nu, k);
  const BlockSystem s = assemble_blocks(StructuredMesh::uniform(9), p, Variant::ReducedQuadrature);
  const SpMat P = SpMat(s.B_u.transpose() * s.M_p.cwiseInverse().asDiagonal() * s.B_u);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vec v(s.A_u.rows());
    for (int i = 0; i < v.size(); ++i) v[i] = u(gen);
    EXPECT_LE(p.zeta2() * v.dot(P * v), v.dot(s.A_u * v) * (1.0 + 1e-12));
  }
}

INSTANTIATE_TEST_SUITE_P(Parameters, RandomVectors,
                         ::testing::Values(std::pair{0.0, 1.0}, std::pair{0.2, 1e-2},
                                           std::pair{0.4, 1e-6}, std::pair{0.45, 1e-8},
                                           std::pair{0.499, 1e-10}));

TEST(Blocks, DisplacementBlockDefiniteness) {
  const PhysicalParams p = params_for(0.499, 1.0);
  BlockSystem s = make_system(StructuredMesh::uniform(9), p, Variant::ReducedQuadrature,
                              DirichletSpec::displacement_and_flux());
  const Eigen::MatrixXd Au = Eigen::MatrixXd(s.A_u);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Au).eigenvalues();
  EXPECT_GT(ev.minCoeff(), -1e-10 * ev.maxCoeff());
  const int b = s.field_begin[0], n = s.field_count[0];
  const Eigen::MatrixXd Af = Eigen::MatrixXd(s.A).block(b, b, n, n);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Af).eigenvalues().minCoeff(), 0.0);
}

TEST(Dirichlet, PressureConstraintRejected) {
  BlockSystem s = assemble_blocks(StructuredMesh::uniform(5), params_for(0.2, 1.0),
                                  Variant::ReducedQuadrature);
  DirichletSpec spec;
  spec.entries.push_back({DofKind::P0Lower, face::All});
  EXPECT_THROW(apply_dirichlet(s, spec), std::invalid_argument);
}

TEST(Dirichlet, ConstrainedSetAndFieldBlocks) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  const BlockSystem s = make_system(m, params_for(0.2, 1.0), Variant::ReducedQuadrature,
                                    DirichletSpec::displacement_and_flux());
  // P1 on 32 boundary vertices, bubbles and fluxes on 32 boundary edges.
  EXPECT_EQ(s.constrained.size(), 2u * 32 + 32 + 32);
  EXPECT_EQ(s.n_free() + static_cast<int>(s.constrained.size()), m.num_dofs());
  EXPECT_EQ(s.field_count[2], m.field_size(Field::Pressure));
  EXPECT_EQ(s.field_begin[1], s.field_count[0]);
  for (int r = 0; r < s.n_free(); ++r) EXPECT_EQ(s.full_to_free[s.free_dofs[r]], r);
  Vec x = Vec::LinSpaced(m.num_dofs(), 0.0, 1.0);
  EXPECT_EQ((s.to_full(s.to_free(x), x) - x).norm(), 0.0);
}

TEST(Dirichlet, EliminationPreservesSolution) {
  // Solving the eliminated system with lifted data reproduces a full solve in
  // which the constrained rows are replaced by identity rows.
  // A unit Biot modulus keeps the dense reference solve well conditioned.
  const StructuredMesh m = StructuredMesh::uniform(5);
  PhysicalParams p = params_for(0.3, 1.0);
  p.M = 1.0;
  const BlockSystem s = make_system(m, p, Variant::ReducedQuadrature,
                                    DirichletSpec::displacement_and_flux());
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec f(m.num_dofs()), g(m.num_dofs());
  for (int i = 0; i < f.size(); ++i) {
    f[i] = u(gen);
    g[i] = u(gen);
  }
  Eigen::MatrixXd K = Eigen::MatrixXd(s.K);
  Vec rhs = f;
  for (int c : s.constrained) {
    K.row(c).setZero();
    K(c, c) = 1.0;
    rhs[c] = g[c];
  }
  const Vec full = K.fullPivLu().solve(rhs);
  Eigen::SparseLU<SpMat> lu(s.A);
  const Vec red = lu.solve(reduced_rhs(s, f, g));
  EXPECT_LT((s.to_full(red, g) - full).norm(), 1e-10 * full.norm());
}

// Polynomial data of degree at most four, integrated exactly by both rules.
ExactSolution polynomial_data() {
  ExactSolution ex;
  ex.tag = ProblemTag::Smooth;
  ex.u = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.grad_u = [](double, double, double) { return Mat2::Zero().eval(); };
  ex.p = [](double, double, double) { return 0.0; };
  ex.w = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.g_u = [](double x, double y, double) { return Vec2(x * x * x * y, x * y * y); };
  ex.g_w = [](double x, double y, double) { return Vec2(y * y, x); };
  ex.f = [](double x, double y, double) { return x * x * y * y + 1.0; };
  return ex;
}

TEST(RightHandSide, AgreesWithIndependentQuadrature) {
  const StructuredMesh m = StructuredMesh::uniform(9);
  PhysicalParams p = params_for(0.3, 1.0);
  p.tau = 0.25;
  const BlockSystem s = make_system(m, p, Variant::ReducedQuadrature,
                                    DirichletSpec::displacement_and_flux());
  const ExactSolution ex = polynomial_data();
  const TransientState zero{Vec::Zero(m.num_dofs()), 0.0, 0};
  const Vec b = build_rhs(s, ex, zero);
  const TriangleRule rule = dunavant_degree4();
  const double h = m.h();
  double gx_total = 0.0, gy_total = 0.0;
  for (const TriangleRef& t : m.triangles()) {
    double fint = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      double x = 0.0, y = 0.0;
      for (int a = 0; a < 3; ++a) {
        x += rule.points[q][a] * t.vertices[a].i * h;
        y += rule.points[q][a] * t.vertices[a].j * h;
      }
      const double w = rule.weights[q] * h * h / 2.0;
      fint += w * ex.f(x, y, p.tau);
      gx_total += w * ex.g_u(x, y, p.tau)[0];
      gy_total += w * ex.g_u(x, y, p.tau)[1];
    }
    const int g = m.dof(t.upper ? DofKind::P0Upper : DofKind::P0Lower, t.i, t.j);
    EXPECT_NEAR(b[g], -p.tau * fint, 1e-14);
  }
  // The P1 hats form a partition of unity and the bubbles integrate to zero
  // against constants, so the P1 rows sum to the load integral.
  double sx = 0.0, sy = 0.0;
  for (int g = 0; g < m.num_dofs(); ++g) {
    const DofKind k = m.dof_info(g).kind;
    if (k == DofKind::P1x) sx += b[g];
    if (k == DofKind::P1y) sy += b[g];
  }
  EXPECT_NEAR(sx, gx_total, 1e-14);
  EXPECT_NEAR(sy, gy_total, 1e-14);
}

TEST(RightHandSide, HistoryEntersPressureRows) {
  const StructuredMesh m = StructuredMesh::uniform(5);
  PhysicalParams p = params_for(0.3, 1.0);
  const BlockSystem s = assemble_blocks(m, p, Variant::ReducedQuadrature);
  ExactSolution ex = polynomial_data();
  ex.g_u = [](double, double, double) { return Vec2(0.0, 0.0); };
  ex.g_w = ex.g_u;
  ex.f = [](double, double, double) { return 0.0; };
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TransientState prev{Vec(m.num_dofs()), 0.0, 0};
  for (int i = 0; i < prev.x.size(); ++i) prev.x[i] = u(gen);
  const Vec b = build_rhs(s, ex, prev);
  const int nu = m.field_size(Field::Displacement), np = m.field_size(Field::Pressure);
  const Vec expected = p.alpha * (s.B_u * prev.x.head(nu)) -
                       p.inv_M() * s.M_p.cwiseProduct(prev.x.tail(np));
  EXPECT_LT((b.tail(np) - expected).norm(), 1e-14);
  EXPECT_EQ(b.head(b.size() - np).norm(), 0.0);
}

TEST(RightHandSide, ConsolidationProblemIsDrivenByBoundaryData) {
  // With M infinite and alpha = 1 the loaded initial state has zero displacement,
  // so the history term vanishes and the load enters through the Dirichlet lift.
  const StructuredMesh m = StructuredMesh::uniform(9);
  PhysicalParams p = terzaghi_params(0.4, 1e-6);
  p.tau = terzaghi_time_scale(p) / 100.0;
  const BlockSystem s = make_system(m, p, Variant::ReducedQuadrature, terzaghi_dirichlet());
  const ExactSolution ex = terzaghi_solution(p);
  const TransientState init = initial_state(s, ex, 0.0);
  const Vec b = build_rhs(s, ex, init);
  EXPECT_LT(b.norm(), 1e-12);
  const Vec lifted = reduced_rhs(s, b, interpolate(m, ex, p.tau));
  EXPECT_GT(lifted.norm(), 0.0);
}

TEST(Quadrature, RulesIntegrateMonomialsExactly) {
  // Over the reference triangle, int x^a y^b = a! b! / (a + b + 2)!.
  const auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  for (const TriangleRule& rule : {dunavant_degree4(), collapsed_gauss(5)}) {
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-14);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q)
          s += rule.weights[q] * 0.5 * std::pow(rule.points[q][1], a) * std::pow(rule.points[q][2], b);
        EXPECT_NEAR(s, fact(a) * fact(b) / fact(a + b + 2), 1e-15) << a << ' ' << b;
      }
  }
  const LineRule g = gauss_legendre(4);
  double s = 0.0;
  for (std::size_t q = 0; q < g.points.size(); ++q) s += g.weights[q] * std::pow(g.points[q], 7);
  EXPECT_NEAR(s, 1.0 / 8.0, 1e-15);
}

TEST(ErrorNorms, LinearDisplacementAndConstantPressureAreExact) {
  ExactSolution ex;
  ex.u = [](double x, double y, double) { return Vec2(1.0 + 2.0 * x - y, 3.0 * y + x); };
  ex.grad_u = [](double, double, double) { return (Mat2() << 2.0, -1.0, 1.0, 3.0).finished(); };
  ex.p = [](double, double, double) { return 2.0; };
  ex.w = [](double, double, double) { return Vec2(1.0, -1.0); };
  const StructuredMesh m = StructuredMesh::uniform(9);
  const Vec x = interpolate(m, ex, 0.0);
  const ErrorNorms e = error_norms(m, x, ex, 0.0);
  EXPECT_LT(e.u_h1, 1e-12);
  EXPECT_LT(e.p_l2, 1e-12);
}

TEST(ErrorNorms, DirectSolvesConvergeOnSteadyProblem) {
  const PhysicalParams p = params_for(0.4, 1e-6);
  const ExactSolution ex = steady_solution(p);
  std::vector<ErrorNorms> errors;
  for (int n : {9, 17, 33}) {
    const BlockSystem s = make_system(StructuredMesh::uniform(n), p, Variant::ReducedQuadrature,
                                      DirichletSpec::displacement_and_flux());
    const TransientState init = initial_state(s, ex, 0.0);
    Eigen::SparseLU<SpMat> lu(s.A);
    const LinearSolver direct = [&](const Vec& b) { return SolveReport{lu.solve(b), 1, true}; };
    const TransientState next = step(s, ex, init, direct);
    EXPECT_DOUBLE_EQ(next.t, 1.0);
    errors.push_back(error_norms(s.mesh, next.x, ex, next.t));
  }
  for (int i = 1; i < 3; ++i) {
    EXPECT_GT(errors[i - 1].u_h1 / errors[i].u_h1, 1.7);
    EXPECT_GT(errors[i - 1].p_l2 / errors[i].p_l2, 3.0);
  }
}

TEST(TimeStepping, SixtyFourStepsReachHalf) {
  PhysicalParams p = params_for(0.4, 1e-2);
  p.tau = 1.0 / 128.0;
  const ExactSolution ex = smooth_solution(p);
  const BlockSystem s = make_system(StructuredMesh::uniform(5), p, Variant::ReducedQuadrature,
                                    DirichletSpec::displacement_and_flux());
  Eigen::SparseLU<SpMat> lu(s.A);
  const LinearSolver direct = [&](const Vec& b) { return SolveReport{lu.solve(b), 1, true}; };
  TransientState st = initial_state(s, ex, 0.0);
  for (int i = 0; i < 64; ++i) st = step(s, ex, st, direct);
  EXPECT_EQ(st.step, 64);
  EXPECT_NEAR(st.t, 0.5, 1e-14);
  const LinearSolver failing = [](const Vec& b) { return SolveReport{b, 1, false}; };
  EXPECT_THROW(step(s, ex, st, failing), std::runtime_error);
}

TEST(Export, CoordinateFormatSorted) {
  SpMat m(3, 3);
  m.insert(2, 0) = 1.5;
  m.insert(0, 1) = -2.0;
  m.insert(0, 0) = 4.0;
  std::ostringstream out;
  write_coordinate(m, out);
  std::istringstream in(out.str());
  int r, c, pr = -1, pc = -1, n = 0;
  double v;
  while (in >> r >> c >> v) {
    EXPECT_TRUE(r > pr || (r == pr && c > pc));
    pr = r;
    pc = c;
    ++n;
  }
  EXPECT_EQ(n, 3);
}

}  // namespace
}  // namespace biot
