#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gradest {

/// Noise-free objective values along one solver run, paired with the
/// cumulative evaluation count at which each value was reached.
struct SolverRun {
  std::vector<std::uint64_t> evals;
  std::vector<double> values;
};

/// Evaluations until f0 - f(x) >= (1 - tau)(f0 - f_best) first holds, or
/// nullopt if the run never satisfies it.
std::optional<double> evals_to_solve(const SolverRun& run, double f0, double f_best, double tau);

/// y(x) for one solver. x is the ratio grid (performance profile) or the
/// budget grid in units of n+1 evaluations (data profile).
struct ProfileCurve {
  std::string solver;
  std::vector<double> x;
  std::vector<double> y;
};

struct ProfileData {
  double tau = 1e-3;
  std::vector<ProfileCurve> performance;
  std::vector<ProfileCurve> data;
};

/// Costs t[p][s] (nullopt: solver s failed on problem p).
using CostTable = std::vector<std::vector<std::optional<double>>>;

/// Fraction of problems with t[p][s] / min_s t[p][s] <= ratio.
std::vector<ProfileCurve> performance_profile(const CostTable& t, const std::vector<std::string>& solvers,
                                              const std::vector<double>& ratios);

/// Fraction of problems with t[p][s] / (n_p + 1) <= budget.
std::vector<ProfileCurve> data_profile(const CostTable& t, const std::vector<int>& dims,
                                       const std::vector<std::string>& solvers,
                                       const std::vector<double>& budgets);

/// Runs[p][s] with per-problem start values and reference values f_L.
ProfileData build_profiles(const std::vector<std::vector<SolverRun>>& runs, const std::vector<double>& f0,
                           const std::vector<double>& f_best, const std::vector<int>& dims,
                           const std::vector<std::string>& solvers, double tau,
                           const std::vector<double>& ratios, const std::vector<double>& budgets);

}  // namespace gradest
