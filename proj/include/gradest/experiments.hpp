#pragma once

#include "gradest/directions.hpp"
#include "gradest/line_search.hpp"
#include "gradest/noise.hpp"
#include "gradest/profiles.hpp"
#include "gradest/types.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gradest {

/// Relative-error sweep over a parameter grid. On "sincos" every cell builds
/// the function from (n, M, L) and estimates the gradient at the origin; a
/// cell with L <= M uses L = M + 1. Other problem names use the problem's own
/// dimension and evaluate at `points` descent points.
struct SweepSpec {
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::string problem = "sincos";
  std::vector<int> n{20};
  std::vector<double> sigma{1e-2};
  /// Sample sizes as multiples of n; ignored when `N` is nonempty.
  std::vector<double> N_factor{4.0};
  std::vector<int> N;
  std::vector<double> L{2.0};
  std::vector<double> M{1.0};
  std::vector<double> eps_f{0.0};
  NoiseKind noise = NoiseKind::uniform_iid;
  DirectionScheme li_scheme = DirectionScheme::general_interp;
  int points = 1;
  int trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Per-cell statistics of theta.
struct CellStats {
  double mean = 0.0;
  double median = 0.0;
  double variance = 0.0;
  double mean_log10 = 0.0;
  double success_rate = 0.0;
  std::size_t trials = 0;
};

CellStats summarize_theta(std::vector<double> thetas, double success_threshold = 0.5);

struct SweepCellResult {
  Method method = Method::FFD;
  int n = 0;
  double sigma = 0.0;
  int N = 0;
  double L = 0.0;
  double M = 0.0;
  double eps_f = 0.0;
  int point = 0;
  std::vector<double> thetas;
  CellStats stats;
};

/// Runs the sweep. Writes one row per (cell, trial) to `rows` and one row per
/// cell to `summary` when the streams are given.
std::vector<SweepCellResult> run_relative_error_sweep(const SweepSpec& spec, std::ostream* rows,
                                                      std::ostream* summary);

/// GSG on phi(x) = e^T x at x = e without noise.
struct ThetaDistSpec {
  int n = 32;
  std::vector<int> N_list{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  int trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ThetaDistRow {
  int N = 0;
  CellStats stats;
};

std::vector<ThetaDistRow> run_theta_distribution(const ThetaDistSpec& spec, std::ostream* table,
                                                 std::ostream* rows);

/// Bound validation on sincos. Deterministic methods: every (sigma, eps_f,
/// point) cell takes the worst error over `noise_draws` noise redraws and
/// compares it with the closed-form bound. Smoothing methods: (sigma, N)
/// come from the condition table at (theta, delta) for each eps_f, and the
/// norm-condition failure rate over `trials` estimates at the origin is
/// compared with delta.
struct BoundCheckSpec {
  std::vector<Method> methods{Method::FFD, Method::CFD, Method::LI};
  int n = 20;
  double L = 2.0;
  double M = 1.0;
  std::vector<double> sigma{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::vector<double> eps_f{0.0, 1e-6, 1e-4, 1e-2};
  int points = 10;
  int noise_draws = 50;
  double theta = 0.5;
  double delta = 0.1;
  int trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Rows with sigma below this are reported as round-off regime and left out
/// of pass/fail.
inline constexpr double kRoundoffSigma = 1e-12;

struct BoundCheckRow {
  Method method = Method::FFD;
  double sigma = 0.0;
  double eps_f = 0.0;
  int point = -1;
  int N = 0;
  int cases = 0;
  double measured = 0.0;  // worst error, or failure rate for smoothing rows
  double bound = 0.0;     // error bound, or delta for smoothing rows
  bool pass = false;
  bool roundoff = false;
  bool skipped = false;  // smoothing rows whose sigma interval is empty
};

std::vector<BoundCheckRow> run_bound_validation(const BoundCheckSpec& spec, std::ostream* out);

/// One solver of the optimizer benchmark.
struct SolverSpec {
  std::string name;
  Method method = Method::FFD;
  double sigma = 1e-7;
  /// Sample size as a multiple of n (smoothing methods).
  double N_factor = 1.0;
  DirectionRule direction = DirectionRule::lbfgs;
};

struct BenchSpec {
  std::vector<SolverSpec> solvers;
  std::vector<std::string> problems;  // empty: every benchmark problem
  double eps_f = 0.0;
  double budget_units = 200.0;  // budget = budget_units (n + 1)
  std::vector<double> taus{1e-1, 1e-3, 1e-5};
  double reference_budget_factor = 10.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// FFD+L-BFGS and GSG(N=n)+steepest descent with their default radii.
std::vector<SolverSpec> default_solvers();

struct BenchResult {
  std::vector<std::string> problems;
  std::vector<std::string> solvers;
  std::vector<int> dims;
  std::vector<double> f0;
  std::vector<double> f_best;
  std::vector<std::vector<SolverRun>> runs;
  std::vector<ProfileData> profiles;
};

/// Runs every solver on every problem. `raw` receives one row per iteration,
/// `profiles` one row per profile point.
BenchResult run_optimizer_benchmark(const BenchSpec& spec, std::ostream* raw, std::ostream* profiles);

/// Grid helpers used by the benchmark output.
std::vector<double> default_ratio_grid();
std::vector<double> default_budget_grid(double max_units);

}  // namespace gradest
