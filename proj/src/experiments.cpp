#include "gradest/experiments.hpp"

#include "gradest/bounds.hpp"
#include "gradest/dfo.hpp"
#include "gradest/estimators.hpp"
#include "gradest/objective.hpp"
#include "gradest/oracle.hpp"
#include "gradest/parallel.hpp"
#include "gradest/problems.hpp"
#include "gradest/report_io.hpp"
#include "gradest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gradest {
namespace {

using Vec = Vector<double>;

/// Stream index reserved for evaluation points so they never collide with
/// per-trial streams.
constexpr std::uint64_t kPointStream = 0xB0D5'0000'0000'0001ULL;

NoiseModel<double> make_noise(NoiseKind kind, double eps_f, std::uint64_t seed) {
  if (eps_f == 0.0 || kind == NoiseKind::none) return NoiseModel<double>::none();
  if (kind == NoiseKind::sinusoidal_deterministic) return NoiseModel<double>::sinusoidal(eps_f);
  return NoiseModel<double>::uniform(eps_f, seed);
}

/// Estimate that redraws LI directions on SingularDirections.
GradientEstimate<double> robust_estimate(NoisyOracle<double>& oracle, const Vec& x,
                                         const EstimatorConfig<double>& cfg, RngStream& rng) {
  constexpr int kAttempts = 10;
  for (int attempt = 1;; ++attempt) {
    try {
      return estimate(oracle, x, cfg, rng);
    } catch (const SingularDirections&) {
      if (attempt == kAttempts || cfg.directions) throw;
    }
  }
}

int sample_size_for(Method method, int n, const SweepSpec& spec, std::size_t k) {
  if (!is_smoothing(method)) return n;
  if (!spec.N.empty()) return spec.N[k];
  return std::max(1, static_cast<int>(std::lround(spec.N_factor[k] * n)));
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw std::invalid_argument(std::string("grid '") + name + "' is empty");
}

}  // namespace

CellStats summarize_theta(std::vector<double> thetas, double success_threshold) {
  CellStats s;
  s.trials = thetas.size();
  if (thetas.empty()) return s;
  const double count = static_cast<double>(thetas.size());
  double sum = 0.0;
  double log_sum = 0.0;
  std::size_t successes = 0;
  for (double t : thetas) {
    sum += t;
    log_sum += std::log10(t);
    successes += t < success_threshold ? 1 : 0;
  }
  s.mean = sum / count;
  s.mean_log10 = log_sum / count;
  s.success_rate = static_cast<double>(successes) / count;
  double sq = 0.0;
  for (double t : thetas) sq += (t - s.mean) * (t - s.mean);
  s.variance = thetas.size() > 1 ? sq / (count - 1.0) : 0.0;
  std::sort(thetas.begin(), thetas.end());
  const std::size_t mid = thetas.size() / 2;
  s.median = thetas.size() % 2 == 1 ? thetas[mid] : 0.5 * (thetas[mid - 1] + thetas[mid]);
  return s;
}

std::vector<SweepCellResult> run_relative_error_sweep(const SweepSpec& spec, std::ostream* rows,
                                                      std::ostream* summary) {
  require_nonempty(spec.methods, "methods");
  require_nonempty(spec.sigma, "sigma");
  require_nonempty(spec.eps_f, "eps_f");
  if (spec.N.empty()) require_nonempty(spec.N_factor, "N_factor");
  if (spec.trials < 1 || spec.points < 1) throw std::invalid_argument("trials and points must be positive");

  const bool synthetic = spec.problem == "sincos";
  std::optional<StandardProblem> problem;
  if (!synthetic) {
    problem = find_problem(spec.problem);
    if (!problem) throw std::invalid_argument("unknown problem '" + spec.problem + "'");
  }
  const std::vector<int> dims = synthetic ? spec.n : std::vector<int>{static_cast<int>(problem->x0.size())};
  const std::vector<double> Ls =
      synthetic ? spec.L : std::vector<double>{problem->objective.lipschitz_gradient};
  const std::vector<double> Ms = synthetic ? spec.M : std::vector<double>{0.0};
  require_nonempty(dims, "n");
  require_nonempty(Ls, "L");
  require_nonempty(Ms, "M");
  const std::size_t sample_sizes = spec.N.empty() ? spec.N_factor.size() : spec.N.size();
  const int point_count = synthetic ? 1 : spec.points;

  if (rows) *rows << "method,problem,n,sigma,N,L,M,eps_f,point,seed,trial,theta,log10_theta,evals\n";
  if (summary) {
    *summary << "method,problem,n,sigma,N,L,M,eps_f,point,seed,trials,mean_theta,median_theta,"
                "var_theta,mean_log10_theta,success_rate\n";
  }

  std::vector<SweepCellResult> results;
  for (Method method : spec.methods) {
    for (int n : dims) {
      for (double L : Ls) {
        for (double M : Ms) {
          double L_eff = L;
          std::optional<ObjectiveFunction<double>> objective;
          std::vector<Vec> points;
          if (synthetic) {
            if (L_eff <= M) L_eff = M + 1.0;
            objective = make_sincos<double>(n, M, L_eff);
            points.push_back(Vec::Zero(n));
          } else {
            objective = problem->objective;
            points = descent_points(*objective, problem->x0, point_count);
          }
          for (double sigma : spec.sigma) {
            for (std::size_t k = 0; k < (is_smoothing(method) ? sample_sizes : 1); ++k) {
              const int N = sample_size_for(method, n, spec, k);
              for (double eps_f : spec.eps_f) {
                NoisyOracle<double> base(*objective, make_noise(spec.noise, eps_f, spec.seed));
                for (int p = 0; p < point_count; ++p) {
                  const Vec& x = points[static_cast<std::size_t>(p)];
                  const Vec grad = objective->gradient(x);
                  SweepCellResult cell{method, n, sigma, N, L_eff, M, eps_f, p, {}, {}};
                  cell.thetas.assign(static_cast<std::size_t>(spec.trials), 0.0);
                  std::vector<std::uint64_t> evals(cell.thetas.size(), 0);
                  EstimatorConfig<double> cfg;
                  cfg.method = method;
                  cfg.sigma = sigma;
                  cfg.N = N;
                  cfg.li_scheme = spec.li_scheme;
                  cfg.seed = spec.seed;
                  parallel_for(cell.thetas.size(), spec.threads, [&](std::size_t t) {
                    auto oracle = base.clone(t);
                    auto rng = trial_stream(spec.seed, t);
                    const auto est = robust_estimate(oracle, x, cfg, rng);
                    cell.thetas[t] = relative_error(est.g, grad);
                    evals[t] = est.evals_used;
                  });
                  cell.stats = summarize_theta(cell.thetas);
                  const std::string prefix = std::string(to_string(method)) + "," + spec.problem + "," +
                                             std::to_string(n) + "," + format_number(sigma) + "," +
                                             std::to_string(N) + "," + format_number(L_eff) + "," +
                                             format_number(M) + "," + format_number(eps_f) + "," +
                                             std::to_string(p) + "," + std::to_string(spec.seed) + ",";
                  if (rows) {
                    for (std::size_t t = 0; t < cell.thetas.size(); ++t) {
                      *rows << prefix << t << "," << format_number(cell.thetas[t]) << ","
                            << format_number(std::log10(cell.thetas[t])) << "," << evals[t] << "\n";
                    }
                  }
                  if (summary) {
                    *summary << prefix << cell.stats.trials << "," << format_number(cell.stats.mean) << ","
                             << format_number(cell.stats.median) << "," << format_number(cell.stats.variance)
                             << "," << format_number(cell.stats.mean_log10) << ","
                             << format_number(cell.stats.success_rate) << "\n";
                  }
                  results.push_back(std::move(cell));
                }
              }
            }
          }
        }
      }
    }
  }
  return results;
}

std::vector<ThetaDistRow> run_theta_distribution(const ThetaDistSpec& spec, std::ostream* table,
                                                 std::ostream* rows) {
  require_nonempty(spec.N_list, "N_list");
  if (spec.trials < 1 || spec.n < 1) throw std::invalid_argument("trials and n must be positive");
  const Vec e = Vec::Ones(spec.n);
  NoisyOracle<double> base(make_linear<double>(e));
  if (table) *table << "N,n,seed,trials,mean_theta,median_theta,var_theta,success_pct\n";
  if (rows) *rows << "N,n,seed,trial,theta\n";
  std::vector<ThetaDistRow> out;
  for (int N : spec.N_list) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    std::vector<double> thetas(static_cast<std::size_t>(spec.trials));
    parallel_for(thetas.size(), spec.threads, [&](std::size_t t) {
      auto oracle = base.clone(t);
      auto rng = trial_stream(spec.seed, t);
      const auto est = gsg(oracle, e, 1.0, N, rng);
      thetas[t] = relative_error(est.g, e);
    });
    ThetaDistRow row{N, summarize_theta(thetas)};
    if (table) {
      *table << N << "," << spec.n << "," << spec.seed << "," << spec.trials << ","
             << format_number(row.stats.mean) << "," << format_number(row.stats.median) << ","
             << format_number(row.stats.variance) << "," << format_number(100.0 * row.stats.success_rate)
             << "\n";
    }
    if (rows) {
      for (std::size_t t = 0; t < thetas.size(); ++t) {
        *rows << N << "," << spec.n << "," << spec.seed << "," << t << "," << format_number(thetas[t])
              << "\n";
      }
    }
    out.push_back(row);
  }
  return out;
}

std::vector<BoundCheckRow> run_bound_validation(const BoundCheckSpec& spec, std::ostream* out) {
  require_nonempty(spec.methods, "methods");
  require_nonempty(spec.eps_f, "eps_f");
  const auto objective = make_sincos<double>(spec.n, spec.M, spec.L);
  const double L = objective.lipschitz_gradient;
  const double M = objective.lipschitz_hessian.value();
  const Index n = spec.n;

  std::vector<Vec> points;
  std::vector<DirectionSet<double>> li_sets;
  for (int p = 0; p < spec.points; ++p) {
    auto rng = RngStream(spec.seed, kPointStream).substream(static_cast<std::uint64_t>(p));
    Vec x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    points.push_back(x);
    li_sets.push_back(interpolation_directions<double>(n, rng));
  }

  if (out) *out << "method,sigma,eps_f,point,N,seed,cases,measured,bound,margin,pass,regime\n";
  std::vector<BoundCheckRow> rows;
  auto emit = [&](const BoundCheckRow& r) {
    if (out) {
      const char* regime = r.skipped ? "empty_interval" : (r.roundoff ? "roundoff" : "normal");
      *out << to_string(r.method) << "," << format_number(r.sigma) << "," << format_number(r.eps_f) << ","
           << r.point << "," << r.N << "," << spec.seed << "," << r.cases << "," << format_number(r.measured)
           << "," << format_number(r.bound) << "," << format_number(r.bound - r.measured) << ","
           << csv_bool(r.pass) << "," << regime << "\n";
    }
    rows.push_back(r);
  };

  for (Method method : spec.methods) {
    if (is_smoothing(method)) {
      const Vec x0 = Vec::Zero(n);
      const Vec grad = objective.gradient(x0);
      for (double eps_f : spec.eps_f) {
        BoundQuery q;
        q.method = method;
        q.n = n;
        q.L = L;
        q.M = M;
        q.eps_f = eps_f;
        q.theta = spec.theta;
        q.delta = spec.delta;
        q.grad_norm = grad.norm();
        const BoundReport report = condition_table(q);
        BoundCheckRow row;
        row.method = method;
        row.eps_f = eps_f;
        row.bound = spec.delta;
        row.N = static_cast<int>(report.n_min);
        if (report.interval_empty || !report.sigma_hi) {
          row.skipped = true;
          emit(row);
          continue;
        }
        row.sigma = eps_f > 0.0 ? *report.sigma_lo : *report.sigma_hi;
        row.cases = spec.trials;
        NoisyOracle<double> base(objective, make_noise(NoiseKind::uniform_iid, eps_f, spec.seed));
        EstimatorConfig<double> cfg;
        cfg.method = method;
        cfg.sigma = row.sigma;
        cfg.N = row.N;
        std::vector<char> failed(static_cast<std::size_t>(spec.trials), 0);
        parallel_for(failed.size(), spec.threads, [&](std::size_t t) {
          auto oracle = base.clone(t);
          auto rng = trial_stream(spec.seed, t);
          const auto est = estimate(oracle, x0, cfg, rng);
          failed[t] = (est.g - grad).norm() > spec.theta * grad.norm() ? 1 : 0;
        });
        row.measured = static_cast<double>(std::accumulate(failed.begin(), failed.end(), 0)) /
                       static_cast<double>(spec.trials);
        row.pass = row.measured <= spec.delta;
        emit(row);
      }
      continue;
    }
    for (double eps_f : spec.eps_f) {
      NoisyOracle<double> base(objective, make_noise(NoiseKind::uniform_iid, eps_f, spec.seed));
      for (double sigma : spec.sigma) {
        for (int p = 0; p < spec.points; ++p) {
          const Vec& x = points[static_cast<std::size_t>(p)];
          const Vec grad = objective.gradient(x);
          const auto& dirs = li_sets[static_cast<std::size_t>(p)];
          std::optional<double> cond_qinv;
          if (method == Method::LI) cond_qinv = inverse_spectral_norm(dirs.matrix());
          BoundCheckRow row;
          row.method = method;
          row.sigma = sigma;
          row.eps_f = eps_f;
          row.point = p;
          row.N = spec.n;
          row.cases = spec.noise_draws;
          row.bound = deterministic_error_bound(method, n, L, M, sigma, eps_f, cond_qinv);
          std::vector<double> errors(static_cast<std::size_t>(spec.noise_draws));
          parallel_for(errors.size(), spec.threads, [&](std::size_t d) {
            auto oracle =
                base.clone(static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(spec.noise_draws) + d);
            GradientEstimate<double> est;
            if (method == Method::FFD)
              est = ffd(oracle, x, sigma);
            else if (method == Method::CFD)
              est = cfd(oracle, x, sigma);
            else
              est = linear_interp(oracle, x, dirs, sigma);
            errors[d] = (est.g - grad).norm();
          });
          row.measured = *std::max_element(errors.begin(), errors.end());
          row.roundoff = sigma < kRoundoffSigma;
          row.pass = row.roundoff || row.measured <= row.bound;
          emit(row);
        }
      }
    }
  }
  return rows;
}

std::vector<SolverSpec> default_solvers() {
  SolverSpec ffd_solver{"FFD+LBFGS", Method::FFD, 1.4901161193847656e-8, 1.0, DirectionRule::lbfgs};
  SolverSpec gsg_solver{"GSG+SD", Method::GSG, 1e-6, 1.0, DirectionRule::steepest_descent};
  return {ffd_solver, gsg_solver};
}

std::vector<double> default_ratio_grid() {
  return {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0, 128.0};
}

std::vector<double> default_budget_grid(double max_units) {
  std::vector<double> grid;
  for (int k = 1; k <= static_cast<int>(std::floor(max_units)); ++k) grid.push_back(static_cast<double>(k));
  return grid;
}

BenchResult run_optimizer_benchmark(const BenchSpec& spec, std::ostream* raw, std::ostream* profiles) {
  const std::vector<SolverSpec> solvers = spec.solvers.empty() ? default_solvers() : spec.solvers;
  std::vector<StandardProblem> problems;
  if (spec.problems.empty()) {
    problems = benchmark_problems();
  } else {
    for (const auto& name : spec.problems) {
      auto p = find_problem(name);
      if (!p) throw std::invalid_argument("unknown problem '" + name + "'");
      problems.push_back(std::move(*p));
    }
  }
  require_nonempty(spec.taus, "taus");
  if (!(spec.budget_units > 0.0)) throw std::invalid_argument("budget_units must be positive");

  BenchResult result;
  for (const auto& s : solvers) result.solvers.push_back(s.name);
  const std::size_t P = problems.size();
  const std::size_t S = solvers.size();
  result.runs.assign(P, std::vector<SolverRun>(S));
  std::vector<std::vector<OptimizationTrace<double>>> traces(P, std::vector<OptimizationTrace<double>>(S));
  std::vector<double> reference(P, std::numeric_limits<double>::infinity());

  auto solve = [&](const StandardProblem& problem, const SolverSpec& solver, std::uint64_t budget,
                   std::uint64_t stream) {
    const int n = static_cast<int>(problem.x0.size());
    NoisyOracle<double> oracle(problem.objective,
                               make_noise(NoiseKind::uniform_iid, spec.eps_f, spec.seed + stream));
    EstimatorConfig<double> est;
    est.method = solver.method;
    est.sigma = solver.sigma;
    est.N = std::max(1, static_cast<int>(std::lround(solver.N_factor * n)));
    LineSearchConfig ls;
    ls.direction = solver.direction;
    ls.eval_budget = budget;
    ls.max_iters = std::numeric_limits<std::int64_t>::max();
    auto rng = trial_stream(spec.seed, stream);
    return run_dfo(oracle, est, ls, problem.x0, rng);
  };

  // One task per (problem, solver) plus one high-budget reference run per problem.
  parallel_for(P * (S + 1), spec.threads, [&](std::size_t task) {
    const std::size_t p = task / (S + 1);
    const std::size_t s = task % (S + 1);
    const int n = static_cast<int>(problems[p].x0.size());
    const auto budget = static_cast<std::uint64_t>(spec.budget_units * (n + 1));
    if (s < S) {
      traces[p][s] = solve(problems[p], solvers[s], budget, task);
      return;
    }
    SolverSpec ref{"reference", Method::CFD, 6.0554544523933395e-6, 1.0, DirectionRule::lbfgs};
    const auto trace =
        solve(problems[p], ref,
              static_cast<std::uint64_t>(spec.reference_budget_factor * static_cast<double>(budget)), task);
    for (const auto& r : trace.records) reference[p] = std::min(reference[p], r.phi);
  });

  if (raw) *raw << "problem,solver,seed,trial,iter,evals,f,phi,grad_est_norm,alpha,backtracks\n";
  for (std::size_t p = 0; p < P; ++p) {
    result.problems.push_back(problems[p].name);
    result.dims.push_back(static_cast<int>(problems[p].x0.size()));
    const double f0 = problems[p].objective.value(problems[p].x0);
    result.f0.push_back(f0);
    double best = std::min(reference[p], f0);
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t task = p * (S + 1) + s;
      auto& run = result.runs[p][s];
      for (const auto& r : traces[p][s].records) {
        run.evals.push_back(r.evals);
        run.values.push_back(r.phi);
        best = std::min(best, r.phi);
        if (raw) {
          *raw << problems[p].name << "," << solvers[s].name << "," << spec.seed << "," << task << ","
               << r.iter << "," << r.evals << "," << format_number(r.f) << "," << format_number(r.phi) << ","
               << format_number(r.grad_est_norm) << "," << format_number(r.alpha) << "," << r.backtracks
               << "\n";
        }
      }
    }
    result.f_best.push_back(best);
  }

  const auto ratios = default_ratio_grid();
  const auto budgets = default_budget_grid(spec.budget_units);
  if (profiles) *profiles << "tau,profile,solver,x,y\n";
  for (double tau : spec.taus) {
    auto data = build_profiles(result.runs, result.f0, result.f_best, result.dims, result.solvers, tau,
                               ratios, budgets);
    if (profiles) {
      for (const auto& [kind, curves] :
           {std::pair{"performance", &data.performance}, std::pair{"data", &data.data}}) {
        for (const auto& c : *curves) {
          for (std::size_t i = 0; i < c.x.size(); ++i) {
            *profiles << format_number(tau) << "," << kind << "," << c.solver << "," << format_number(c.x[i])
                      << "," << format_number(c.y[i]) << "\n";
          }
        }
      }
    }
    result.profiles.push_back(std::move(data));
  }
  return result;
}

}  // namespace gradest
