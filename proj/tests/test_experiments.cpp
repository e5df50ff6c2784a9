// Experiment drivers, CSV output and convergence-order fitting.
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "biot/experiments.hpp"

namespace biot {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("biot_tests_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Io, FormatsSixSignificantDigits) {
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(1e-10), "1e-10");
  EXPECT_EQ(format_number(65.0), "65");
  EXPECT_EQ(format_number(-2.5), "-2.5");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
}

CsvTable sample_table() {
  CsvTable t({"name", "nu", "k", "ok"});
  CsvTable::Row a, b, c;
  a << "b" << 0.4 << 1e-6 << true;
  b << "a" << 0.499 << 1.0 << false;
  c << "c" << 0.4 << 1e-10 << 3;
  t.add(a);
  t.add(b);
  t.add(c);
  return t;
}

TEST(Io, CsvRoundTrip) {
  const CsvTable t = sample_table();
  std::stringstream ss;
  t.write(ss);
  EXPECT_EQ(ss.str(), "name,nu,k,ok\nb,0.4,1e-06,1\na,0.499,1,0\nc,0.4,1e-10,3\n");
  const CsvTable back = read_csv(ss);
  EXPECT_EQ(back.header(), t.header());
  EXPECT_EQ(back.rows(), t.rows());
  EXPECT_EQ(back.numeric_column("k"), (std::vector<double>{1e-6, 1.0, 1e-10}));
  EXPECT_THROW(back.numeric_column("name"), std::invalid_argument);
  EXPECT_THROW(back.column("missing"), std::out_of_range);
}

TEST(Io, SortsNumericallyByColumns) {
  CsvTable t = sample_table();
  t.sort_by({"nu", "k"});
  EXPECT_EQ(t.column("name"), (std::vector<std::string>{"c", "b", "a"}));
  t.sort_by({"name"});
  EXPECT_EQ(t.column("name"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Io, RejectsMalformedRows) {
  CsvTable t({"a", "b"});
  CsvTable::Row short_row;
  short_row << 1.0;
  EXPECT_THROW(t.add(short_row), std::invalid_argument);
  CsvTable::Row bad;
  EXPECT_THROW(bad << "x,y", std::invalid_argument);
  std::stringstream empty;
  EXPECT_THROW(read_csv(empty), std::invalid_argument);
}

TEST(Io, GnuplotColumns) {
  std::stringstream ss;
  sample_table().write_gnuplot(ss, {"k", "nu"});
  EXPECT_EQ(ss.str(), "# k nu\n1e-06 0.4\n1 0.499\n1e-10 0.4\n");
}

TEST(ConvergenceOrder, RecoversExactSlopes) {
  CsvTable t({"N", "h", "e1", "e2"});
  for (int n : {17, 33, 65, 129}) {
    CsvTable::Row r;
    r << n << 1.0 / (n - 1) << 3.0 / n << 0.5 / (double(n) * n);
    t.add(r);
  }
  const auto s = fit_convergence_order(t, "N", {"e1", "e2"});
  EXPECT_NEAR(s.at("e1"), -1.0, 1e-5);
  EXPECT_NEAR(s.at("e2"), -2.0, 1e-5);
  // Against h = 1/(N-1) the same data has local slope 1 - h/(1+h).
  const double slope_h = fit_convergence_order(t, "h", {"e1"}).at("e1");
  EXPECT_GT(slope_h, 0.95);
  EXPECT_LT(slope_h, 1.0);

  const fs::path dir = scratch_dir("fit");
  t.write_file((dir / "t.csv").string());
  const auto from_file = fit_convergence_order((dir / "t.csv").string(), "N", {"e1"});
  EXPECT_DOUBLE_EQ(from_file.at("e1"), s.at("e1"));
}

TEST(ConvergenceOrder, NeedsThreeRows) {
  CsvTable t({"N", "e"});
  for (int n : {17, 33}) {
    CsvTable::Row r;
    r << n << 1.0 / n;
    t.add(r);
  }
  EXPECT_THROW(fit_convergence_order(t, "N", {"e"}), std::invalid_argument);
}

TEST(Experiments, IdsAndRelaxationNames) {
  const auto& ids = experiment_ids();
  EXPECT_EQ(ids.size(), 13u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 13u);
  for (RelaxKind r : {RelaxKind::Vanka, RelaxKind::BsrExact, RelaxKind::BsrInexact})
    EXPECT_EQ(parse_relax(relax_name(r)), r);
  EXPECT_THROW(parse_relax("jacobi"), std::invalid_argument);
}

TEST(Experiments, LevelsAndCycleDefaults) {
  EXPECT_EQ(auto_levels(9), 1);
  EXPECT_EQ(auto_levels(17), 2);
  EXPECT_EQ(auto_levels(65), 4);
  EXPECT_EQ(auto_levels(257), 6);
  const CycleConfig v = cycle_config(RelaxKind::Vanka, 0.8, 1.0);
  EXPECT_EQ(v.nu1, 2);
  EXPECT_EQ(v.nu2, 2);
  const CycleConfig b = cycle_config(RelaxKind::BsrInexact, 0.72, 1.1);
  EXPECT_EQ(b.nu1, 1);
  EXPECT_EQ(b.nu2, 1);
  EXPECT_DOUBLE_EQ(b.omega_j, 1.1);
}

TEST(Experiments, BenchmarkParameters) {
  const PhysicalParams p = benchmark_params(0.3, 1e-4, 0.5);
  EXPECT_DOUBLE_EQ(p.E, 3e4);
  EXPECT_DOUBLE_EQ(p.M, 1e6);
  EXPECT_DOUBLE_EQ(p.tau, 0.5);
  EXPECT_EQ(terzaghi_params(0.3, 1e-4).inv_M(), 0.0);
  EXPECT_THROW(benchmark_params(0.5, 1.0), std::invalid_argument);
}

TEST(Experiments, InvalidOverridesRejected) {
  ExperimentConfig c;
  c.out_dir = scratch_dir("invalid").string();
  EXPECT_THROW(run_experiment("table-11", c), std::invalid_argument);
  c.Ns = {10};
  EXPECT_THROW(run_experiment("lfa-vanka", c), std::invalid_argument);
  c.Ns = {9};
  c.nus = {0.5};
  EXPECT_THROW(run_experiment("lfa-vanka", c), std::invalid_argument);
  c.nus = {0.4};
  c.rtol = 1.5;
  EXPECT_THROW(run_experiment("steady-vanka", c), std::invalid_argument);
}

ExperimentConfig small_lfa_config(const fs::path& dir) {
  ExperimentConfig c;
  c.nus = {0.2, 0.4};
  c.ks = {1.0};
  c.Ns = {17};
  c.levels = 2;
  c.omega = 0.8;
  c.lfa_samples = 8;
  c.seed = 7;
  c.out_dir = dir.string();
  return c;
}

std::vector<std::vector<std::string>> without_column(const CsvTable& t, const std::string& col) {
  const int skip = t.column_index(col);
  std::vector<std::vector<std::string>> out;
  for (auto row : t.rows()) {
    row.erase(row.begin() + skip);
    out.push_back(row);
  }
  return out;
}

TEST(Experiments, RunsAreDeterministic) {
  const fs::path dir = scratch_dir("determinism");
  const ExperimentReport a = run_experiment("lfa-vanka", small_lfa_config(dir));
  const CsvTable first = read_csv_file((dir / "lfa-vanka.csv").string());
  const ExperimentReport b = run_experiment("lfa-vanka", small_lfa_config(dir));
  const CsvTable second = read_csv_file((dir / "lfa-vanka.csv").string());
  EXPECT_EQ(first.num_rows(), 2);
  EXPECT_EQ(without_column(first, "time_s"), without_column(second, "time_s"));
  EXPECT_EQ(a.files, b.files);
  EXPECT_FALSE(a.diverged);
  for (double rho : first.numeric_column("rho_n")) {
    EXPECT_GT(rho, 0.0);
    EXPECT_LT(rho, 1.0);
  }
}

TEST(Experiments, SteadyTableReportsErrors) {
  ExperimentConfig c;
  c.nus = {0.2};
  c.ks = {1.0};
  c.Ns = {17};
  c.omega = 0.8;
  c.out_dir = scratch_dir("steady").string();
  const ExperimentReport r = run_experiment("steady-vanka", c);
  ASSERT_EQ(r.table.num_rows(), 1);
  EXPECT_EQ(r.table.column("converged")[0], "1");
  EXPECT_GT(r.table.numeric_column("iterations")[0], 0.0);
  EXPECT_GT(r.table.numeric_column("u_h1_error")[0], 0.0);
  EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / "steady-vanka.csv"));
}

TEST(Experiments, ConvergenceStudyWritesPlotFiles) {
  ExperimentConfig c;
  c.nus = {0.4};
  c.ks = {1.0};
  c.Ns = {9, 17, 33};
  c.omega = 0.8;
  c.out_dir = scratch_dir("fe").string();
  const ExperimentReport r = run_experiment("fe-convergence-steady", c);
  EXPECT_EQ(r.table.num_rows(), 3);
  ASSERT_EQ(r.files.size(), 2u);
  const std::string dat = r.files[1];
  EXPECT_NE(dat.find(".dat"), std::string::npos);
  std::ifstream f(dat);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "# N u_h1_error p_l2_error");
  ASSERT_EQ(r.notes.size(), 1u);
  EXPECT_NE(r.notes[0].find("slope"), std::string::npos);
}

}  // namespace
}  // namespace biot
