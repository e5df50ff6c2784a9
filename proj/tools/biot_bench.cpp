// Command-line front end for the benchmark experiments and LFA utilities.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "biot/experiments.hpp"

namespace {

std::string id_list() {
  std::string s;
  for (const auto& id : biot::experiment_ids()) s += (s.empty() ? "" : ", ") + id;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biot poroelasticity solver workbench"};
  app.set_config("--config", "", "key=value configuration file (command-line values win)");
  app.require_subcommand(1);

  // run ---------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSV");
  std::string id;
  biot::ExperimentConfig cfg;
  std::string relax;
  double tau = 0.0, omega = 0.0, omega_j = 0.0, rtol = 0.0;
  int levels = 0;
  run->add_option("experiment", id, "Experiment id: " + id_list())->required();
  run->add_option("--nu", cfg.nus, "Poisson ratios")->delimiter(',');
  run->add_option("--k", cfg.ks, "Permeabilities")->delimiter(',');
  run->add_option("--N", cfg.Ns, "Points per side (2^l + 1)")->delimiter(',');
  auto* tau_opt = run->add_option("--tau", tau, "Time-step size");
  run->add_option("--taus", cfg.taus,
                  "Time-step sizes (smooth-scaling) or time-scale divisors (terzaghi-scaling)")
      ->delimiter(',');
  auto* levels_opt = run->add_option("--levels", levels, "Multigrid levels (default: 9-point coarsest grid)");
  auto* relax_opt = run->add_option("--relax", relax, "Relaxation")
                        ->check(CLI::IsMember({"vanka", "bsr-exact", "bsr-inexact"}));
  auto* omega_opt = run->add_option("--omega", omega, "Relaxation weight (default: LFA-optimized)");
  auto* omega_j_opt = run->add_option("--omega-j", omega_j, "Jacobi weight for inexact BSR");
  auto* rtol_opt = run->add_option("--rtol", rtol, "FGMRES relative tolerance");
  run->add_option("--maxiter", cfg.maxiter, "FGMRES iteration limit");
  run->add_option("--seed", cfg.seed, "Seed of the random initial error");
  run->add_option("--samples", cfg.lfa_samples, "LFA samples per direction");
  run->add_option("--out", cfg.out_dir, "Output directory");

  // list --------------------------------------------------------------------
  auto* list = app.add_subcommand("list", "List experiment ids");

  // fit ---------------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Fit convergence orders in a CSV");
  std::string fit_csv, fit_x = "N";
  std::vector<std::string> fit_cols = {"u_h1_error", "p_l2_error"};
  fit->add_option("csv", fit_csv, "Input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--x", fit_x, "Abscissa column");
  fit->add_option("--columns", fit_cols, "Error columns")->delimiter(',');

  // rho-map -----------------------------------------------------------------
  auto* map = app.add_subcommand("rho-map", "Write the two-grid LFA factor at every sample");
  double map_nu = 0.4, map_k = 1.0, map_omega = 0.8, map_omega_j = 1.0;
  std::string map_relax = "vanka", map_out = "rho_map.csv";
  int map_samples = 32;
  map->add_option("--nu", map_nu, "Poisson ratio");
  map->add_option("--k", map_k, "Permeability");
  map->add_option("--omega", map_omega, "Relaxation weight");
  map->add_option("--omega-j", map_omega_j, "Jacobi weight");
  map->add_option("--relax", map_relax, "Relaxation")
      ->check(CLI::IsMember({"vanka", "bsr-exact", "bsr-inexact"}));
  map->add_option("--samples", map_samples, "Samples per direction");
  map->add_option("--out", map_out, "Output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& e : biot::experiment_ids()) std::cout << e << '\n';
      return 0;
    }
    if (*fit) {
      for (const auto& [col, slope] : biot::fit_convergence_order(fit_csv, fit_x, fit_cols))
        std::cout << col << ' ' << biot::format_number(slope) << '\n';
      return 0;
    }
    if (*map) {
      biot::PhysicalParams p = biot::benchmark_params(map_nu, map_k);
      biot::LfaConfig lc;
      lc.relax = biot::parse_relax(map_relax);
      lc.omega = map_omega;
      lc.omega_j = map_omega_j;
      lc.samples = map_samples;
      const biot::CycleConfig cc = biot::cycle_config(lc.relax, map_omega, map_omega_j);
      lc.nu1 = cc.nu1;
      lc.nu2 = cc.nu2;
      std::ofstream out(map_out);
      if (!out) throw std::runtime_error("cannot open " + map_out);
      biot::write_rho_map_csv(p, lc, out);
      std::cout << map_out << '\n';
      return 0;
    }
    if (*tau_opt) cfg.tau = tau;
    if (*levels_opt) cfg.levels = levels;
    if (*relax_opt) cfg.relax = biot::parse_relax(relax);
    if (*omega_opt) cfg.omega = omega;
    if (*omega_j_opt) cfg.omega_j = omega_j;
    if (*rtol_opt) cfg.rtol = rtol;
    const biot::ExperimentReport rep = biot::run_experiment(id, cfg);
    rep.table.write(std::cout);
    for (const auto& n : rep.notes) std::cerr << n << '\n';
    for (const auto& f : rep.files) std::cerr << "wrote " << f << '\n';
    if (rep.diverged) {
      std::cerr << "some cells diverged or missed the tolerance\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
