/** @file experiments.hpp
 *  @brief Parameter studies behind the benchmark tables and convergence plots.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biot/io.hpp"
#include "biot/krylov.hpp"
#include "biot/lfa.hpp"

namespace biot {

/// Overrides for run_experiment. Unset fields take the experiment's defaults.
struct ExperimentConfig {
  std::vector<double> nus;
  std::vector<double> ks;
  std::vector<int> Ns;
  /// Time-step sizes (smooth-scaling) or divisors of the consolidation time scale
  /// (terzaghi-scaling).
  std::vector<double> taus;
  std::optional<double> tau;
  std::optional<int> levels;
  std::optional<RelaxKind> relax;
  std::optional<double> omega;    ///< unset: optimized by LFA per cell
  std::optional<double> omega_j;  ///< unset: optimized by LFA per cell (inexact BSR)
  std::optional<double> rtol;
  int maxiter = 500;
  std::uint64_t seed = 1;
  int lfa_samples = 32;
  std::string out_dir = ".";
};

struct ExperimentReport {
  std::string id;
  CsvTable table;
  std::vector<std::string> files;  ///< paths written
  bool diverged = false;           ///< some cell diverged or missed its tolerance
  std::vector<std::string> notes;  ///< human-readable summary lines
};

const std::vector<std::string>& experiment_ids();
RelaxKind parse_relax(const std::string& name);
std::string relax_name(RelaxKind relax);

/// Runs one experiment and writes <out_dir>/<id>.csv (plus .dat files for the
/// plot-oriented studies). Throws std::invalid_argument for an unknown id or
/// invalid overrides.
ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& config);

/// Least-squares slope of log(error) against log(x) for each error column.
/// Throws std::invalid_argument with fewer than three rows.
std::map<std::string, double> fit_convergence_order(const CsvTable& table, const std::string& x_column,
                                                    const std::vector<std::string>& error_columns);
std::map<std::string, double> fit_convergence_order(const std::string& csv_path,
                                                    const std::string& x_column,
                                                    const std::vector<std::string>& error_columns);

// Building blocks shared by the experiments and the acceptance checks.

/// Number of levels with a 9-point coarsest grid (N = 17 gives 2).
int auto_levels(int n_points);
/// Default smoothing steps: (2,2) for Vanka and (1,1) for Braess-Sarazin.
CycleConfig cycle_config(RelaxKind relax, double omega, double omega_j);
/// LFA-optimized parameters on the mesh size 1/(N-1).
OptimizeResult lfa_parameters(const PhysicalParams& params, RelaxKind relax, Variant variant,
                              int n_points, int samples = 32);

/// Measured stationary factor of the multigrid cycle with the Dirichlet conditions
/// of the steady problem.
RhoResult measured_rho(const PhysicalParams& params, Variant variant, const CycleConfig& cycle,
                       int n_points, int levels, std::uint64_t seed = 1);

struct SolveStats {
  int iterations = 0;
  bool converged = false;
  ErrorNorms error;
  int dofs = 0;
  double seconds = 0.0;
  int inner_u_iterations = 0;  ///< block preconditioner only
  int inner_w_iterations = 0;  ///< block preconditioner only
};

/// One backward-Euler step of the steady problem from the interpolated initial state, solved by
/// multigrid-preconditioned FGMRES.
SolveStats solve_steady(const PhysicalParams& params, int n_points, int levels,
                        const CycleConfig& cycle, double rtol, int maxiter);
/// The same solve with the block upper-triangular preconditioner.
SolveStats solve_steady_block(const PhysicalParams& params, int n_points, int levels,
                              const BlockPrecondOptions& options, double rtol, int maxiter);

struct TransientStats {
  double average_iterations = 0.0;
  int max_iterations = 0;
  int steps = 0;
  bool converged = false;
  ErrorNorms final_error;
  double seconds = 0.0;
};

/// Runs `steps` backward-Euler steps of the smooth or consolidation problem
/// with params.tau as the step size. Stops at the first failed solve.
TransientStats run_transient(ProblemTag problem, const PhysicalParams& params, int n_points,
                             int levels, const CycleConfig& cycle, double rtol, int maxiter,
                             int steps);

/// Material parameters of the benchmarks (E = 3e4, alpha = mu_f = 1, M = 1e6).
PhysicalParams benchmark_params(double nu, double k, double tau = 1.0);
/// The consolidation benchmark uses M = infinity.
PhysicalParams terzaghi_params(double nu, double k);
/// Dirichlet data: displacement everywhere, normal flux except on the drained face x = 1.
DirichletSpec terzaghi_dirichlet();

}  // namespace biot
