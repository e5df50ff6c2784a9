#include "biot/experiments.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

namespace biot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<double> kTableNus = {0.0, 0.2, 0.4, 0.45, 0.49, 0.499};
const std::vector<double> kTableKs = {1.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
const std::vector<double> kUpperNus = {0.4, 0.45, 0.49, 0.499};
const std::vector<double> kSmallKs = {1e-4, 1e-6, 1e-8, 1e-10};

template <class T>
std::vector<T> pick(const std::vector<T>& override_values, const std::vector<T>& defaults) {
  return override_values.empty() ? defaults : override_values;
}

void validate(const ExperimentConfig& c) {
  for (double nu : c.nus)
    if (!(nu >= 0.0 && nu < 0.5)) throw std::invalid_argument("nu must lie in [0, 0.5)");
  for (double k : c.ks)
    if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  for (int n : c.Ns)
    if (n < 3 || ((n - 1) & (n - 2)) != 0)
      throw std::invalid_argument("N must be 2^l + 1, got " + std::to_string(n));
  for (double t : c.taus)
    if (!(t > 0.0)) throw std::invalid_argument("time-step values must be positive");
  if (c.tau && !(*c.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (c.levels && *c.levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (c.omega && !(*c.omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (c.omega_j && !(*c.omega_j > 0.0)) throw std::invalid_argument("omega_j must be positive");
  if (c.rtol && !(*c.rtol > 0.0 && *c.rtol < 1.0))
    throw std::invalid_argument("rtol must lie in (0, 1)");
  if (c.maxiter < 1) throw std::invalid_argument("maxiter must be positive");
  if (c.lfa_samples < 8) throw std::invalid_argument("at least 8 LFA samples per direction");
}

/// Relaxation parameters for one cell: overrides or LFA optimization.
struct Chosen {
  double omega = 1.0;
  double omega_j = 1.0;
  double rho_lfa = std::numeric_limits<double>::quiet_NaN();
  int flagged = 0;
};

Chosen choose(const PhysicalParams& p, RelaxKind relax, Variant variant, int n_points,
              const ExperimentConfig& c, bool need_rho) {
  Chosen out;
  const bool needs_omega_j = relax == RelaxKind::BsrInexact;
  if (c.omega && (c.omega_j || !needs_omega_j)) {
    out.omega = *c.omega;
    out.omega_j = c.omega_j.value_or(1.0);
    if (need_rho) {
      LfaConfig lc;
      lc.relax = relax;
      lc.variant = variant;
      lc.omega = out.omega;
      lc.omega_j = out.omega_j;
      lc.samples = c.lfa_samples;
      lc.h = 1.0 / (n_points - 1);
      const CycleConfig cc = cycle_config(relax, out.omega, out.omega_j);
      lc.nu1 = cc.nu1;
      lc.nu2 = cc.nu2;
      const LfaResult r = rho_lfa(p, lc);
      out.rho_lfa = r.rho;
      out.flagged = r.flagged;
    }
    return out;
  }
  const OptimizeResult r = lfa_parameters(p, relax, variant, n_points, c.lfa_samples);
  out.omega = c.omega.value_or(r.omega);
  out.omega_j = c.omega_j.value_or(r.omega_j);
  out.rho_lfa = r.rho;
  out.flagged = r.flagged;
  return out;
}

std::string out_path(const ExperimentConfig& c, const std::string& file) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / file).string();
}

void finish(ExperimentReport& rep, const ExperimentConfig& c, const std::vector<std::string>& keys) {
  rep.table.sort_by(keys);
  const std::string path = out_path(c, rep.id + ".csv");
  rep.table.write_file(path);
  rep.files.push_back(path);
}

int levels_for(const ExperimentConfig& c, int n_points) {
  return c.levels.value_or(auto_levels(n_points));
}

std::vector<RelaxKind> relaxations(const ExperimentConfig& c, std::vector<RelaxKind> defaults) {
  if (c.relax) return {*c.relax};
  return defaults;
}

// ---------------------------------------------------------------------------

ExperimentReport naive_table(const ExperimentConfig& c) {
  ExperimentReport rep{"naive-table", CsvTable({"relax", "nu", "k", "omega", "omega_j", "rho_lfa",
                                                "rho_n", "cycles", "settled", "diverged",
                                                "time_s"}),
                       {}, false, {}};
  const int N = c.Ns.empty() ? 65 : c.Ns.front();
  const int levels = c.levels.value_or(2);
  for (RelaxKind relax :
       relaxations(c, {RelaxKind::BsrExact, RelaxKind::BsrInexact, RelaxKind::Vanka}))
    for (double k : pick(c.ks, {1e-6}))
      for (double nu : pick(c.nus, kTableNus)) {
        const auto t0 = Clock::now();
        const PhysicalParams p = benchmark_params(nu, k, c.tau.value_or(1.0));
        const Chosen ch = choose(p, relax, Variant::ExactIntegration, N, c, true);
        const RhoResult r = measured_rho(p, Variant::ExactIntegration,
                                         cycle_config(relax, ch.omega, ch.omega_j), N, levels,
                                         c.seed);
        CsvTable::Row row;
        row << relax_name(relax) << nu << k << ch.omega << ch.omega_j << ch.rho_lfa << r.rho
            << r.iterations << r.settled << r.diverged << seconds_since(t0);
        rep.table.add(row);
        if (r.diverged) rep.diverged = true;
      }
  finish(rep, c, {"relax", "nu", "k"});
  return rep;
}

ExperimentReport lfa_table(const std::string& id, RelaxKind default_relax,
                           const ExperimentConfig& c) {
  ExperimentReport rep{id, CsvTable({"nu", "k", "omega", "omega_j", "rho_lfa", "flagged", "rho_n",
                                     "cycles", "settled", "diverged", "time_s"}),
                       {}, false, {}};
  const RelaxKind relax = c.relax.value_or(default_relax);
  const int N = c.Ns.empty() ? 65 : c.Ns.front();
  const int levels = c.levels.value_or(2);
  for (double nu : pick(c.nus, kTableNus))
    for (double k : pick(c.ks, kTableKs)) {
      const auto t0 = Clock::now();
      const PhysicalParams p = benchmark_params(nu, k, c.tau.value_or(1.0));
      const Chosen ch = choose(p, relax, Variant::ReducedQuadrature, N, c, true);
      const RhoResult r = measured_rho(p, Variant::ReducedQuadrature,
                                       cycle_config(relax, ch.omega, ch.omega_j), N, levels, c.seed);
      CsvTable::Row row;
      row << nu << k << ch.omega << ch.omega_j << ch.rho_lfa << ch.flagged << r.rho << r.iterations
          << r.settled << r.diverged << seconds_since(t0);
      rep.table.add(row);
      if (r.diverged) rep.diverged = true;
    }
  finish(rep, c, {"nu", "k"});
  return rep;
}

ExperimentReport steady_table(const std::string& id, RelaxKind default_relax,
                              const ExperimentConfig& c) {
  ExperimentReport rep{id, CsvTable({"nu", "k", "omega", "omega_j", "iterations", "converged",
                                     "u_h1_error", "p_l2_error", "time_s"}),
                       {}, false, {}};
  const RelaxKind relax = c.relax.value_or(default_relax);
  const int N = c.Ns.empty() ? 65 : c.Ns.front();
  const double rtol = c.rtol.value_or(1e-6);
  for (double nu : pick(c.nus, kTableNus))
    for (double k : pick(c.ks, kTableKs)) {
      const auto t0 = Clock::now();
      const PhysicalParams p = benchmark_params(nu, k, c.tau.value_or(1.0));
      const Chosen ch = choose(p, relax, Variant::ReducedQuadrature, N, c, false);
      const SolveStats s = solve_steady(p, N, levels_for(c, N),
                                        cycle_config(relax, ch.omega, ch.omega_j), rtol, c.maxiter);
      CsvTable::Row row;
      row << nu << k << ch.omega << ch.omega_j << s.iterations << s.converged << s.error.u_h1
          << s.error.p_l2 << seconds_since(t0);
      rep.table.add(row);
      if (!s.converged) rep.diverged = true;
    }
  finish(rep, c, {"nu", "k"});
  return rep;
}

ExperimentReport steady_block(const ExperimentConfig& c) {
  ExperimentReport rep{"steady-block", CsvTable({"nu", "k", "iterations", "converged",
                                                 "inner_u_iterations", "inner_w_iterations",
                                                 "u_h1_error", "p_l2_error", "time_s"}),
                       {}, false, {}};
  const int N = c.Ns.empty() ? 65 : c.Ns.front();
  BlockPrecondOptions opt;
  if (c.omega) opt.displacement_omega = *c.omega;
  for (double nu : pick(c.nus, kTableNus))
    for (double k : pick(c.ks, kTableKs)) {
      const auto t0 = Clock::now();
      const PhysicalParams p = benchmark_params(nu, k, c.tau.value_or(1.0));
      const SolveStats s =
          solve_steady_block(p, N, levels_for(c, N), opt, c.rtol.value_or(1e-6), c.maxiter);
      CsvTable::Row row;
      row << nu << k << s.iterations << s.converged << s.inner_u_iterations << s.inner_w_iterations
          << s.error.u_h1 << s.error.p_l2 << seconds_since(t0);
      rep.table.add(row);
      if (!s.converged) rep.diverged = true;
    }
  finish(rep, c, {"nu", "k"});
  return rep;
}

ExperimentReport scaling(const ExperimentConfig& c) {
  ExperimentReport rep{"scaling", CsvTable({"N", "dofs", "levels", "nu", "k", "relax", "omega",
                                            "omega_j", "iterations", "converged", "u_h1_error",
                                            "p_l2_error", "time_s"}),
                       {}, false, {}};
  const double rtol = c.rtol.value_or(1e-6);
  for (RelaxKind relax : relaxations(c, {RelaxKind::Vanka, RelaxKind::BsrInexact}))
    for (double nu : pick(c.nus, {0.4, 0.499}))
      for (double k : pick(c.ks, {1e-6})) {
        const PhysicalParams p = benchmark_params(nu, k, c.tau.value_or(1.0));
        // Parameters are optimized once on h = 1/64 and reused for every mesh.
        const Chosen ch = choose(p, relax, Variant::ReducedQuadrature, 65, c, false);
        for (int N : pick(c.Ns, {17, 33, 65, 129})) {
          const auto t0 = Clock::now();
          const int levels = levels_for(c, N);
          const SolveStats s =
              solve_steady(p, N, levels, cycle_config(relax, ch.omega, ch.omega_j), rtol, c.maxiter);
          CsvTable::Row row;
          row << N << s.dofs << levels << nu << k << relax_name(relax) << ch.omega << ch.omega_j
              << s.iterations << s.converged << s.error.u_h1 << s.error.p_l2 << seconds_since(t0);
          rep.table.add(row);
          if (!s.converged) rep.diverged = true;
        }
      }
  finish(rep, c, {"relax", "nu", "k", "N"});
  return rep;
}

ExperimentReport smooth_param(const ExperimentConfig& c) {
  ExperimentReport rep{"smooth-param", CsvTable({"nu", "k", "omega", "steps", "avg_iterations",
                                                 "max_iterations", "converged", "u_h1_error",
                                                 "p_l2_error", "time_s"}),
                       {}, false, {}};
  const int N = c.Ns.empty() ? 65 : c.Ns.front();
  const double tau = c.tau.value_or(1.0 / 128.0);
  const int steps = static_cast<int>(std::lround(0.5 / tau));
  const RelaxKind relax = c.relax.value_or(RelaxKind::Vanka);
  for (double nu : pick(c.nus, kUpperNus))
    for (double k : pick(c.ks, kTableKs)) {
      const auto t0 = Clock::now();
      // Relaxation parameters come from the steady (tau = 1) analysis.
      const Chosen ch = choose(benchmark_params(nu, k), relax, Variant::ReducedQuadrature, N, c, false);
      const TransientStats s =
          run_transient(ProblemTag::Smooth, benchmark_params(nu, k, tau), N, levels_for(c, N),
                        cycle_config(relax, ch.omega, ch.omega_j), c.rtol.value_or(1e-10),
                        c.maxiter, steps);
      CsvTable::Row row;
      row << nu << k << ch.omega << s.steps << s.average_iterations << s.max_iterations
          << s.converged << s.final_error.u_h1 << s.final_error.p_l2 << seconds_since(t0);
      rep.table.add(row);
      if (!s.converged) rep.diverged = true;
    }
  finish(rep, c, {"nu", "k"});
  return rep;
}

ExperimentReport smooth_scaling(const ExperimentConfig& c) {
  ExperimentReport rep{"smooth-scaling", CsvTable({"nu", "k", "N", "tau", "steps", "omega",
                                                   "avg_iterations", "max_iterations", "converged",
                                                   "u_h1_error", "p_l2_error", "time_s"}),
                       {}, false, {}};
  const RelaxKind relax = c.relax.value_or(RelaxKind::Vanka);
  for (double nu : pick(c.nus, {0.4, 0.499}))
    for (double k : pick(c.ks, {1e-6})) {
      const Chosen ch = choose(benchmark_params(nu, k), relax, Variant::ReducedQuadrature, 65, c, false);
      for (int N : pick(c.Ns, {17, 33, 65, 129}))
        for (double tau : pick(c.taus, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256})) {
          const auto t0 = Clock::now();
          const int steps = static_cast<int>(std::lround(0.5 / tau));
          const TransientStats s =
              run_transient(ProblemTag::Smooth, benchmark_params(nu, k, tau), N, levels_for(c, N),
                            cycle_config(relax, ch.omega, ch.omega_j), c.rtol.value_or(1e-10),
                            c.maxiter, steps);
          CsvTable::Row row;
          row << nu << k << N << tau << s.steps << ch.omega << s.average_iterations
              << s.max_iterations << s.converged << s.final_error.u_h1 << s.final_error.p_l2
              << seconds_since(t0);
          rep.table.add(row);
          if (!s.converged) rep.diverged = true;
        }
    }
  finish(rep, c, {"nu", "k", "N", "tau"});
  return rep;
}

ExperimentReport terzaghi_table(const std::string& id, bool param_study, const ExperimentConfig& c) {
  ExperimentReport rep{id, CsvTable({"nu", "k", "N", "tau_divisor", "tau", "steps", "omega",
                                     "avg_iterations", "max_iterations", "converged",
                                     "u_h1_error", "p_l2_error", "time_s"}),
                       {}, false, {}};
  const RelaxKind relax = c.relax.value_or(RelaxKind::Vanka);
  const std::vector<double> nus = pick(c.nus, param_study ? kUpperNus : std::vector<double>{0.4, 0.499});
  const std::vector<double> ks = pick(c.ks, param_study ? kSmallKs : std::vector<double>{1e-6});
  const std::vector<int> Ns = pick(c.Ns, param_study ? std::vector<int>{65} : std::vector<int>{33, 65, 129});
  const std::vector<double> divisors =
      pick(c.taus, param_study ? std::vector<double>{100.0} : std::vector<double>{50, 100, 200, 400});
  for (double nu : nus)
    for (double k : ks)
      for (double div : divisors) {
        PhysicalParams p = terzaghi_params(nu, k);
        p.tau = terzaghi_time_scale(p) / div;
        const int steps = static_cast<int>(std::lround(div / 10.0));
        // Parameters are optimized for the consolidation step size on h = 1/64.
        const Chosen ch = choose(p, relax, Variant::ReducedQuadrature, 65, c, false);
        for (int N : Ns) {
          const auto t0 = Clock::now();
          const TransientStats s =
              run_transient(ProblemTag::Terzaghi, p, N, levels_for(c, N),
                            cycle_config(relax, ch.omega, ch.omega_j), c.rtol.value_or(1e-6),
                            c.maxiter, steps);
          CsvTable::Row row;
          row << nu << k << N << div << p.tau << s.steps << ch.omega << s.average_iterations
              << s.max_iterations << s.converged << s.final_error.u_h1 << s.final_error.p_l2
              << seconds_since(t0);
          rep.table.add(row);
          if (!s.converged) rep.diverged = true;
        }
      }
  finish(rep, c, {"nu", "k", "N", "tau_divisor"});
  return rep;
}

ExperimentReport fe_convergence(const std::string& id, ProblemTag problem, const ExperimentConfig& c) {
  ExperimentReport rep{id, CsvTable({"nu", "k", "N", "h", "tau", "steps", "iterations",
                                     "converged", "u_h1_error", "p_l2_error", "time_s"}),
                       {}, false, {}};
  const RelaxKind relax = c.relax.value_or(RelaxKind::Vanka);
  const std::vector<double> nus = pick(c.nus, {0.4, 0.499});
  const std::vector<int> Ns = pick(c.Ns, {17, 33, 65, 129});
  for (double nu : nus)
    for (double k : pick(c.ks, {1e-6})) {
      const Chosen ch = choose(benchmark_params(nu, k), relax, Variant::ReducedQuadrature, 65, c, false);
      const CycleConfig cycle = cycle_config(relax, ch.omega, ch.omega_j);
      for (int N : Ns) {
        const auto t0 = Clock::now();
        const double h = 1.0 / (N - 1);
        double tau = 1.0, iterations = 0.0;
        int steps = 1;
        bool converged = false;
        ErrorNorms err;
        if (problem == ProblemTag::Steady) {
          const SolveStats s = solve_steady(benchmark_params(nu, k, c.tau.value_or(1.0)), N,
                                            levels_for(c, N), cycle, c.rtol.value_or(1e-10),
                                            c.maxiter);
          tau = c.tau.value_or(1.0);
          iterations = s.iterations;
          converged = s.converged;
          err = s.error;
        } else {
          tau = c.tau.value_or(h);
          steps = static_cast<int>(std::lround(0.5 / tau));
          const TransientStats s =
              run_transient(ProblemTag::Smooth, benchmark_params(nu, k, tau), N, levels_for(c, N),
                            cycle, c.rtol.value_or(1e-10), c.maxiter, steps);
          iterations = s.average_iterations;
          converged = s.converged;
          err = s.final_error;
        }
        CsvTable::Row row;
        row << nu << k << N << h << tau << steps << iterations << converged << err.u_h1 << err.p_l2
            << seconds_since(t0);
        rep.table.add(row);
        if (!converged) rep.diverged = true;
      }
    }
  finish(rep, c, {"nu", "k", "N"});

  // One gnuplot file and one pair of slopes per (nu, k).
  const auto nu_col = rep.table.numeric_column("nu"), k_col = rep.table.numeric_column("k");
  std::vector<std::pair<double, double>> keys;
  for (int r = 0; r < rep.table.num_rows(); ++r) {
    const std::pair<double, double> key{nu_col[r], k_col[r]};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [nu, k] : keys) {
    CsvTable sub(rep.table.header());
    for (int r = 0; r < rep.table.num_rows(); ++r)
      if (nu_col[r] == nu && k_col[r] == k) {
        CsvTable::Row row;
        for (const auto& cell : rep.table.rows()[r]) row << cell;
        sub.add(row);
      }
    const std::string tag = "nu" + format_number(nu) + "_k" + format_number(k);
    const std::string path = out_path(c, id + "_" + tag + ".dat");
    sub.write_gnuplot_file(path, {"N", "u_h1_error", "p_l2_error"});
    rep.files.push_back(path);
    if (sub.num_rows() >= 3) {
      const auto slopes = fit_convergence_order(sub, "N", {"u_h1_error", "p_l2_error"});
      rep.notes.push_back(tag + ": slope u_h1 " + format_number(slopes.at("u_h1_error")) +
                          ", slope p_l2 " + format_number(slopes.at("p_l2_error")));
    }
  }
  return rep;
}

Vec zero_like(const Vec& v) { return Vec::Zero(v.size()); }

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "naive-table",    "lfa-vanka",      "lfa-bsr",          "steady-vanka",
      "steady-bsr",     "steady-block",   "scaling",          "smooth-param",
      "smooth-scaling", "terzaghi-param", "terzaghi-scaling", "fe-convergence-steady",
      "fe-convergence-smooth"};
  return ids;
}

RelaxKind parse_relax(const std::string& name) {
  if (name == "vanka") return RelaxKind::Vanka;
  if (name == "bsr-exact") return RelaxKind::BsrExact;
  if (name == "bsr-inexact") return RelaxKind::BsrInexact;
  throw std::invalid_argument("unknown relaxation '" + name +
                              "' (expected vanka, bsr-exact or bsr-inexact)");
}

std::string relax_name(RelaxKind relax) {
  switch (relax) {
    case RelaxKind::Vanka:
      return "vanka";
    case RelaxKind::BsrExact:
      return "bsr-exact";
    default:
      return "bsr-inexact";
  }
}

int auto_levels(int n_points) {
  int levels = 1;
  for (int n = n_points - 1; n > 8 && n % 2 == 0; n /= 2) ++levels;
  return levels;
}

CycleConfig cycle_config(RelaxKind relax, double omega, double omega_j) {
  CycleConfig c;
  c.relax = relax;
  c.omega = omega;
  c.omega_j = omega_j;
  c.nu1 = c.nu2 = relax == RelaxKind::Vanka ? 2 : 1;
  return c;
}

OptimizeResult lfa_parameters(const PhysicalParams& params, RelaxKind relax, Variant variant,
                              int n_points, int samples) {
  LfaConfig lc;
  lc.relax = relax;
  lc.variant = variant;
  lc.samples = samples;
  lc.h = 1.0 / (n_points - 1);
  const CycleConfig cc = cycle_config(relax, 1.0, 1.0);
  lc.nu1 = cc.nu1;
  lc.nu2 = cc.nu2;
  return optimize_parameters(params, lc);
}

PhysicalParams benchmark_params(double nu, double k, double tau) {
  PhysicalParams p;
  p.nu = nu;
  p.k = k;
  p.tau = tau;
  p.validate();
  return p;
}

PhysicalParams terzaghi_params(double nu, double k) {
  PhysicalParams p = benchmark_params(nu, k);
  p.M = std::numeric_limits<double>::infinity();
  return p;
}

DirichletSpec terzaghi_dirichlet() {
  return DirichletSpec::displacement_and_flux(face::Left | face::Bottom | face::Top);
}

RhoResult measured_rho(const PhysicalParams& params, Variant variant, const CycleConfig& cycle,
                       int n_points, int levels, std::uint64_t seed) {
  const Hierarchy h = build_hierarchy(StructuredMesh::uniform(n_points), params, variant,
                                      DirichletSpec::displacement_and_flux(), cycle, levels);
  RhoOptions opt;
  opt.seed = seed;
  return measure_rho(*h.mg, opt);
}

SolveStats solve_steady(const PhysicalParams& params, int n_points, int levels,
                        const CycleConfig& cycle, double rtol, int maxiter) {
  const auto t0 = Clock::now();
  const Hierarchy h = build_hierarchy(StructuredMesh::uniform(n_points), params,
                                      Variant::ReducedQuadrature,
                                      DirichletSpec::displacement_and_flux(), cycle, levels);
  const ExactSolution exact = steady_solution(params);
  const TransientState s0 = initial_state(h.fine(), exact, 0.0);
  const LinearOperator precond = [&](const Vec& r) { return h.mg->cycle(r, zero_like(r)); };
  SolveStats out;
  out.dofs = h.fine().n_full();
  const LinearSolver solver = [&](const Vec& b) {
    const FgmresResult r = fgmres(h.fine().A, b, precond, rtol, maxiter);
    return SolveReport{r.x, r.iterations, r.converged};
  };
  SolveReport rep;
  try {
    const TransientState s1 = step(h.fine(), exact, s0, solver, &rep);
    out.error = error_norms(h.fine().mesh, s1.x, exact, s1.t);
    out.converged = true;
  } catch (const std::runtime_error&) {
    out.converged = false;
    out.error = {std::nan(""), std::nan("")};
  }
  out.iterations = rep.iterations;
  out.seconds = seconds_since(t0);
  return out;
}

SolveStats solve_steady_block(const PhysicalParams& params, int n_points, int levels,
                              const BlockPrecondOptions& options, double rtol, int maxiter) {
  const auto t0 = Clock::now();
  const Hierarchy h = build_hierarchy(StructuredMesh::uniform(n_points), params,
                                      Variant::ReducedQuadrature,
                                      DirichletSpec::displacement_and_flux(),
                                      cycle_config(RelaxKind::Vanka, 1.0, 1.0), levels);
  const ExactSolution exact = steady_solution(params);
  const TransientState s0 = initial_state(h.fine(), exact, 0.0);
  BlockTriangularPreconditioner B(h, options);
  const LinearOperator precond = B.as_operator();
  SolveStats out;
  out.dofs = h.fine().n_full();
  const LinearSolver solver = [&](const Vec& b) {
    const FgmresResult r = fgmres(h.fine().A, b, precond, rtol, maxiter);
    return SolveReport{r.x, r.iterations, r.converged};
  };
  SolveReport rep;
  try {
    const TransientState s1 = step(h.fine(), exact, s0, solver, &rep);
    out.error = error_norms(h.fine().mesh, s1.x, exact, s1.t);
    out.converged = true;
  } catch (const std::runtime_error&) {
    out.converged = false;
    out.error = {std::nan(""), std::nan("")};
  }
  out.iterations = rep.iterations;
  out.inner_u_iterations = B.inner_iterations();
  out.inner_w_iterations = B.darcy_iterations();
  out.seconds = seconds_since(t0);
  return out;
}

TransientStats run_transient(ProblemTag problem, const PhysicalParams& params, int n_points,
                             int levels, const CycleConfig& cycle, double rtol, int maxiter,
                             int steps) {
  if (problem == ProblemTag::Steady)
    throw std::invalid_argument("use solve_steady for the steady problem");
  if (steps < 1) throw std::invalid_argument("at least one time step");
  const auto t0 = Clock::now();
  const bool terzaghi = problem == ProblemTag::Terzaghi;
  const DirichletSpec spec = terzaghi ? terzaghi_dirichlet() : DirichletSpec::displacement_and_flux();
  const Hierarchy h = build_hierarchy(StructuredMesh::uniform(n_points), params,
                                      Variant::ReducedQuadrature, spec, cycle, levels);
  const ExactSolution exact = terzaghi ? terzaghi_solution(params) : smooth_solution(params);
  const LinearOperator precond = [&](const Vec& r) { return h.mg->cycle(r, zero_like(r)); };
  const LinearSolver solver = [&](const Vec& b) {
    const FgmresResult r = fgmres(h.fine().A, b, precond, rtol, maxiter);
    return SolveReport{r.x, r.iterations, r.converged};
  };
  TransientStats out;
  TransientState state = initial_state(h.fine(), exact, 0.0);
  long total = 0;
  out.converged = true;
  for (int n = 0; n < steps; ++n) {
    SolveReport rep;
    try {
      state = step(h.fine(), exact, state, solver, &rep);
    } catch (const std::runtime_error&) {
      out.converged = false;
      total += rep.iterations;
      out.max_iterations = std::max(out.max_iterations, rep.iterations);
      ++out.steps;
      break;
    }
    total += rep.iterations;
    out.max_iterations = std::max(out.max_iterations, rep.iterations);
    ++out.steps;
  }
  out.average_iterations = out.steps ? static_cast<double>(total) / out.steps : 0.0;
  out.final_error = out.converged ? error_norms(h.fine().mesh, state.x, exact, state.t)
                                  : ErrorNorms{std::nan(""), std::nan("")};
  out.seconds = seconds_since(t0);
  return out;
}

std::map<std::string, double> fit_convergence_order(const CsvTable& table, const std::string& x_column,
                                                    const std::vector<std::string>& error_columns) {
  if (table.num_rows() < 3)
    throw std::invalid_argument("convergence fit needs at least three mesh levels");
  const std::vector<double> x = table.numeric_column(x_column);
  std::map<std::string, double> out;
  for (const auto& name : error_columns) {
    const std::vector<double> y = table.numeric_column(name);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0) || !(y[i] > 0.0))
        throw std::invalid_argument("convergence fit needs positive values in " + name);
      const double lx = std::log(x[i]), ly = std::log(y[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out[name] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

std::map<std::string, double> fit_convergence_order(const std::string& csv_path,
                                                    const std::string& x_column,
                                                    const std::vector<std::string>& error_columns) {
  return fit_convergence_order(read_csv_file(csv_path), x_column, error_columns);
}

ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config) {
  validate(config);
  if (id == "naive-table") return naive_table(config);
  if (id == "lfa-vanka") return lfa_table(id, RelaxKind::Vanka, config);
  if (id == "lfa-bsr") return lfa_table(id, RelaxKind::BsrInexact, config);
  if (id == "steady-vanka") return steady_table(id, RelaxKind::Vanka, config);
  if (id == "steady-bsr") return steady_table(id, RelaxKind::BsrInexact, config);
  if (id == "steady-block") return steady_block(config);
  if (id == "scaling") return scaling(config);
  if (id == "smooth-param") return smooth_param(config);
  if (id == "smooth-scaling") return smooth_scaling(config);
  if (id == "terzaghi-param") return terzaghi_table(id, true, config);
  if (id == "terzaghi-scaling") return terzaghi_table(id, false, config);
  if (id == "fe-convergence-steady") return fe_convergence(id, ProblemTag::Steady, config);
  if (id == "fe-convergence-smooth") return fe_convergence(id, ProblemTag::Smooth, config);
  throw std::invalid_argument("unknown experiment '" + id + "'");
}

}  // namespace biot
