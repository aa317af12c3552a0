#include "gradest/profiles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gradest {

std::optional<double> evals_to_solve(const SolverRun& run, double f0, double f_best, double tau) {
  if (run.evals.size() != run.values.size()) throw std::invalid_argument("evals/values length mismatch");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
  const double target = (1.0 - tau) * (f0 - f_best);
  for (std::size_t k = 0; k < run.values.size(); ++k) {
    if (f0 - run.values[k] >= target) return static_cast<double>(run.evals[k]);
  }
  return std::nullopt;
}

namespace {

void check_table(const CostTable& t, std::size_t solvers) {
  for (const auto& row : t) {
    if (row.size() != solvers) throw std::invalid_argument("cost table width differs from solver count");
  }
}

}  // namespace

std::vector<ProfileCurve> performance_profile(const CostTable& t, const std::vector<std::string>& solvers,
                                              const std::vector<double>& ratios) {
  check_table(t, solvers.size());
  const double problems = static_cast<double>(t.size());
  std::vector<std::vector<double>> r(t.size(), std::vector<double>(solvers.size()));
  for (std::size_t p = 0; p < t.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : t[p]) {
      if (c) best = std::min(best, *c);
    }
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      if (!t[p][s]) {
        r[p][s] = std::numeric_limits<double>::infinity();
      } else {
        // Zero cost only happens when the start point already passes the
        // test; every solver that also reports zero is then tied.
        r[p][s] =
            best > 0.0 ? *t[p][s] / best : (*t[p][s] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
      }
    }
  }
  std::vector<ProfileCurve> out;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    ProfileCurve c{solvers[s], ratios, {}};
    for (double a : ratios) {
      std::size_t count = 0;
      for (std::size_t p = 0; p < t.size(); ++p) count += r[p][s] <= a ? 1 : 0;
      c.y.push_back(problems > 0 ? static_cast<double>(count) / problems : 0.0);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ProfileCurve> data_profile(const CostTable& t, const std::vector<int>& dims,
                                       const std::vector<std::string>& solvers,
                                       const std::vector<double>& budgets) {
  check_table(t, solvers.size());
  if (dims.size() != t.size()) throw std::invalid_argument("dims length differs from problem count");
  const double problems = static_cast<double>(t.size());
  std::vector<ProfileCurve> out;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    ProfileCurve c{solvers[s], budgets, {}};
    for (double k : budgets) {
      std::size_t count = 0;
      for (std::size_t p = 0; p < t.size(); ++p) {
        if (t[p][s] && *t[p][s] / static_cast<double>(dims[p] + 1) <= k) ++count;
      }
      c.y.push_back(problems > 0 ? static_cast<double>(count) / problems : 0.0);
    }
    out.push_back(std::move(c));
  }
  return out;
}

ProfileData build_profiles(const std::vector<std::vector<SolverRun>>& runs, const std::vector<double>& f0,
                           const std::vector<double>& f_best, const std::vector<int>& dims,
                           const std::vector<std::string>& solvers, double tau,
                           const std::vector<double>& ratios, const std::vector<double>& budgets) {
  if (runs.size() != f0.size() || runs.size() != f_best.size()) {
    throw std::invalid_argument("per-problem inputs differ in length");
  }
  CostTable t(runs.size());
  for (std::size_t p = 0; p < runs.size(); ++p) {
    for (const auto& run : runs[p]) t[p].push_back(evals_to_solve(run, f0[p], f_best[p], tau));
  }
  ProfileData out;
  out.tau = tau;
  out.performance = performance_profile(t, solvers, ratios);
  out.data = data_profile(t, dims, solvers, budgets);
  return out;
}

}  // namespace gradest
