// Command line driver: single estimates, bound reports, sweeps and benchmarks.

#include "gradest/bounds.hpp"
#include "gradest/dfo.hpp"
#include "gradest/estimators.hpp"
#include "gradest/experiments.hpp"
#include "gradest/problems.hpp"
#include "gradest/report_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gradest;
using Vec = Vector<double>;

struct Globals {
  std::uint64_t seed = 0;
  std::string out = "-";
  unsigned threads = 1;
  int trials = 0;
  std::string spec;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
};

/// Output stream for `path`; "-" is stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

nlohmann::json load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read spec file '" + path + "'");
  return nlohmann::json::parse(in);
}

/// Spec body without the keys handled here.
nlohmann::json spec_body(const nlohmann::json& j, Globals& g) {
  nlohmann::json body = j;
  if (body.contains("output") && g.out == "-") g.out = body.at("output").get<std::string>();
  body.erase("output");
  body.erase("experiment");
  return body;
}

template <typename SpecT>
void apply_globals(SpecT& spec, const Globals& g) {
  if (g.seed_opt->count() > 0) spec.seed = g.seed;
  if (g.threads_opt->count() > 0) spec.threads = g.threads;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct ProblemChoice {
  std::string name = "sincos";
  int n = 20;
  double M = 1.0;
  double L = 2.0;
};

/// Objective and default point for a problem choice; sincos uses (n, M, L)
/// and the origin.
std::pair<ObjectiveFunction<double>, Vec> resolve_problem(const ProblemChoice& c) {
  if (c.name == "sincos") {
    const double L = c.L <= c.M ? c.M + 1.0 : c.L;
    return {make_sincos<double>(c.n, c.M, L), Vec::Zero(c.n)};
  }
  auto p = find_problem(c.name);
  if (!p) throw std::invalid_argument("unknown problem '" + c.name + "'");
  return {p->objective, p->x0};
}

void add_problem_options(CLI::App* app, ProblemChoice& c) {
  app->add_option("--problem", c.name, "Problem name (see `gradest problems`)")->capture_default_str();
  app->add_option("--n", c.n, "Dimension for sincos")->capture_default_str();
  app->add_option("--M", c.M, "Hessian constant for sincos")->capture_default_str();
  app->add_option("--L", c.L, "Gradient constant for sincos")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient estimation under bounded noise: estimators, bounds and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output path ('-' for stdout)")->capture_default_str();
  g.threads_opt =
      app.add_option("--threads", g.threads, "Worker threads (0: all cores)")->capture_default_str();
  g.trials_opt = app.add_option("--trials", g.trials, "Trials per cell");
  app.add_option("--spec", g.spec, "JSON experiment spec")->check(CLI::ExistingFile);

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "Estimate a gradient and report its relative error");
  ProblemChoice est_problem;
  add_problem_options(est_cmd, est_problem);
  std::string est_method = "FFD";
  double est_sigma = 1e-2;
  int est_N = 0;
  double est_eps = 0.0;
  std::string est_noise = "uniform";
  std::string est_scheme = "general_interp";
  std::uint64_t est_trial = 0;
  int est_point = 0;
  bool est_print_g = false;
  est_cmd->add_option("--method", est_method, "FFD, CFD, LI, GSG, cGSG, BSG or cBSG")->capture_default_str();
  est_cmd->add_option("--sigma", est_sigma, "Sampling radius")->capture_default_str();
  est_cmd->add_option("--N", est_N, "Sample size for smoothing methods (default 4n)");
  est_cmd->add_option("--eps-f", est_eps, "Noise level")->capture_default_str();
  est_cmd->add_option("--noise", est_noise, "none, uniform or sinusoidal")->capture_default_str();
  est_cmd->add_option("--li-scheme", est_scheme, "LI directions: coordinate, orthonormal, general_interp")
      ->capture_default_str();
  est_cmd->add_option("--trial", est_trial, "First trial index")->capture_default_str();
  est_cmd->add_option("--point", est_point, "Descent point index (standard problems)")->capture_default_str();
  est_cmd->add_flag("--print-gradient", est_print_g, "Also print estimate and true gradient per component");

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Print the condition-table row for one query as JSON");
  BoundQuery bq;
  std::string bq_method = "FFD";
  std::optional<double> bq_M, bq_grad, bq_cond;
  int bq_n = 20;
  bounds_cmd->add_option("--method", bq_method)->capture_default_str();
  bounds_cmd->add_option("--n", bq_n)->capture_default_str();
  bounds_cmd->add_option("--L", bq.L, "Gradient Lipschitz constant")->required();
  bounds_cmd->add_option("--M", bq_M, "Hessian Lipschitz constant");
  bounds_cmd->add_option("--eps-f", bq.eps_f)->capture_default_str();
  bounds_cmd->add_option("--theta", bq.theta)->capture_default_str();
  bounds_cmd->add_option("--delta", bq.delta)->capture_default_str();
  bounds_cmd->add_option("--grad-norm", bq_grad, "||grad phi(x)|| (omit when unknown)");
  bounds_cmd->add_option("--cond-qinv", bq_cond, "||Q^{-1}||_2 (LI)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Relative-error sweep");
  std::string sweep_methods, sweep_sigma, sweep_eps, sweep_nfac, sweep_summary;
  std::string sweep_problem;
  sweep_cmd->add_option("--methods", sweep_methods, "Comma-separated methods");
  sweep_cmd->add_option("--sigma", sweep_sigma, "Comma-separated radii");
  sweep_cmd->add_option("--eps-f", sweep_eps, "Comma-separated noise levels");
  sweep_cmd->add_option("--N-factor", sweep_nfac, "Comma-separated N/n ratios");
  sweep_cmd->add_option("--problem", sweep_problem, "Problem name (default sincos)");
  sweep_cmd->add_option("--summary", sweep_summary, "Per-cell summary CSV path");

  // theta-dist
  auto* theta_cmd = app.add_subcommand("theta-dist", "Distribution of theta for GSG on e^T x");
  std::string theta_raw;
  std::string theta_list;
  int theta_n = 0;
  theta_cmd->add_option("--n", theta_n, "Dimension (default 32)");
  theta_cmd->add_option("--N-list", theta_list, "Comma-separated sample sizes");
  theta_cmd->add_option("--raw", theta_raw, "Per-trial CSV path");

  // bound-check
  auto* check_cmd = app.add_subcommand("bound-check", "Validate the error bounds on sincos");
  std::string check_methods;
  check_cmd->add_option("--methods", check_methods, "Comma-separated methods");

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "Run the line-search DFO method and print its trace");
  ProblemChoice opt_problem;
  add_problem_options(opt_cmd, opt_problem);
  std::string opt_method = "FFD";
  std::optional<double> opt_sigma;
  int opt_N = 0;
  std::string opt_direction = "lbfgs";
  std::uint64_t opt_budget = 10000;
  std::int64_t opt_iters = 100000;
  double opt_eps = 0.0;
  std::optional<double> opt_fixed;
  opt_cmd->add_option("--method", opt_method)->capture_default_str();
  opt_cmd->add_option("--sigma", opt_sigma, "Sampling radius (default: noise-balanced or 1.5e-8)");
  opt_cmd->add_option("--N", opt_N, "Sample size for smoothing methods (default n)");
  opt_cmd->add_option("--direction", opt_direction, "lbfgs or sd")->capture_default_str();
  opt_cmd->add_option("--budget", opt_budget, "Evaluation budget")->capture_default_str();
  opt_cmd->add_option("--max-iters", opt_iters)->capture_default_str();
  opt_cmd->add_option("--eps-f", opt_eps, "Uniform noise level")->capture_default_str();
  opt_cmd->add_option("--fixed-step", opt_fixed, "Use fixed-step steepest descent with this step");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Optimizer benchmark with performance and data profiles");
  std::string bench_profiles;
  double bench_units = 0.0;
  bench_cmd->add_option("--profiles", bench_profiles, "Profile CSV path");
  bench_cmd->add_option("--budget-units", bench_units, "Budget in units of n+1 evaluations");

  // problems
  auto* list_cmd = app.add_subcommand("problems", "List the standard problems");

  CLI11_PARSE(app, argc, argv);

  try {
    std::optional<nlohmann::json> spec_json;
    if (!g.spec.empty()) spec_json = load_spec(g.spec);

    if (*est_cmd) {
      Output out(g.out);
      const auto [objective, default_x] = resolve_problem(est_problem);
      Vec x = default_x;
      if (est_problem.name != "sincos") {
        const auto pts = descent_points(objective, default_x, est_point + 1);
        x = pts[static_cast<std::size_t>(est_point)];
      }
      const Vec grad = objective.gradient(x);
      EstimatorConfig<double> cfg;
      cfg.method = method_from_string(est_method);
      cfg.sigma = est_sigma;
      cfg.N = est_N > 0 ? est_N : static_cast<int>(4 * x.size());
      if (!is_smoothing(cfg.method)) cfg.N = static_cast<int>(x.size());
      cfg.li_scheme = scheme_from_string(est_scheme);
      cfg.seed = g.seed;
      const NoiseKind kind = noise_kind_from_string(est_noise);
      NoiseModel<double> noise = NoiseModel<double>::none();
      if (est_eps > 0.0 && kind == NoiseKind::uniform_iid)
        noise = NoiseModel<double>::uniform(est_eps, g.seed);
      if (est_eps > 0.0 && kind == NoiseKind::sinusoidal_deterministic)
        noise = NoiseModel<double>::sinusoidal(est_eps);
      NoisyOracle<double> base(objective, noise);
      const int trials = std::max(1, g.trials);
      auto& os = out.stream();
      os << "method,problem,n,sigma,N,eps_f,point,seed,trial,theta,log10_theta,evals\n";
      for (int k = 0; k < trials; ++k) {
        const std::uint64_t t = est_trial + static_cast<std::uint64_t>(k);
        auto oracle = base.clone(t);
        auto rng = trial_stream(g.seed, t);
        GradientEstimate<double> est;
        for (int attempt = 0;; ++attempt) {
          try {
            est = estimate(oracle, x, cfg, rng);
            break;
          } catch (const SingularDirections&) {
            if (attempt == 9) throw;
          }
        }
        const double theta = relative_error(est.g, grad);
        os << to_string(cfg.method) << "," << est_problem.name << "," << x.size() << ","
           << format_number(cfg.sigma) << "," << cfg.N << "," << format_number(est_eps) << "," << est_point
           << "," << g.seed << "," << t << "," << format_number(theta) << ","
           << format_number(std::log10(theta)) << "," << est.evals_used << "\n";
        if (est_print_g) {
          os << "component,g,grad\n";
          for (Index i = 0; i < x.size(); ++i) {
            os << i << "," << format_number(est.g[i]) << "," << format_number(grad[i]) << "\n";
          }
        }
      }
      return 0;
    }

    if (*bounds_cmd) {
      Output out(g.out);
      bq.method = method_from_string(bq_method);
      bq.n = bq_n;
      bq.M = bq_M;
      bq.grad_norm = bq_grad;
      bq.cond_qinv = bq_cond;
      out.stream() << to_json(condition_table(bq), bq).dump(2) << "\n";
      return 0;
    }

    if (*sweep_cmd) {
      SweepSpec spec = spec_json ? sweep_spec_from_json(spec_body(*spec_json, g)) : SweepSpec{};
      apply_globals(spec, g);
      if (g.trials_opt->count() > 0) spec.trials = g.trials;
      if (!sweep_methods.empty()) {
        spec.methods.clear();
        std::stringstream ss(sweep_methods);
        std::string item;
        while (std::getline(ss, item, ',')) spec.methods.push_back(method_from_string(item));
      }
      if (!sweep_sigma.empty()) spec.sigma = parse_vector(sweep_sigma);
      if (!sweep_eps.empty()) spec.eps_f = parse_vector(sweep_eps);
      if (!sweep_nfac.empty()) spec.N_factor = parse_vector(sweep_nfac);
      if (!sweep_problem.empty()) spec.problem = sweep_problem;
      Output out(g.out);
      std::optional<Output> summary;
      if (!sweep_summary.empty()) summary.emplace(sweep_summary);
      run_relative_error_sweep(spec, &out.stream(), summary ? &summary->stream() : nullptr);
      return 0;
    }

    if (*theta_cmd) {
      ThetaDistSpec spec = spec_json ? theta_dist_spec_from_json(spec_body(*spec_json, g)) : ThetaDistSpec{};
      apply_globals(spec, g);
      if (g.trials_opt->count() > 0) spec.trials = g.trials;
      if (theta_n > 0) spec.n = theta_n;
      if (!theta_list.empty()) {
        spec.N_list.clear();
        for (double v : parse_vector(theta_list)) spec.N_list.push_back(static_cast<int>(v));
      }
      Output out(g.out);
      std::optional<Output> raw;
      if (!theta_raw.empty()) raw.emplace(theta_raw);
      run_theta_distribution(spec, &out.stream(), raw ? &raw->stream() : nullptr);
      return 0;
    }

    if (*check_cmd) {
      BoundCheckSpec spec =
          spec_json ? bound_check_spec_from_json(spec_body(*spec_json, g)) : BoundCheckSpec{};
      apply_globals(spec, g);
      if (g.trials_opt->count() > 0) spec.trials = g.trials;
      if (!check_methods.empty()) {
        spec.methods.clear();
        std::stringstream ss(check_methods);
        std::string item;
        while (std::getline(ss, item, ',')) spec.methods.push_back(method_from_string(item));
      }
      Output out(g.out);
      const auto rows = run_bound_validation(spec, &out.stream());
      int failures = 0;
      for (const auto& r : rows) failures += (!r.pass && !r.roundoff && !r.skipped) ? 1 : 0;
      std::cerr << rows.size() << " rows, " << failures << " failing\n";
      return failures == 0 ? 0 : 2;
    }

    if (*opt_cmd) {
      Output out(g.out);
      const auto [objective, x0] = resolve_problem(opt_problem);
      const Index n = x0.size();
      EstimatorConfig<double> cfg;
      cfg.method = method_from_string(opt_method);
      cfg.N = opt_N > 0 ? opt_N : static_cast<int>(n);
      cfg.seed = g.seed;
      if (opt_sigma) {
        cfg.sigma = *opt_sigma;
      } else if (opt_eps > 0.0) {
        BoundQuery q;
        q.method = cfg.method == Method::LI ? Method::FFD : cfg.method;
        q.n = n;
        q.L = objective.lipschitz_gradient;
        q.M = objective.lipschitz_hessian.value_or(objective.lipschitz_gradient);
        q.eps_f = opt_eps;
        cfg.sigma = condition_table(q).sigma_lo.value();
      } else {
        cfg.sigma = is_central(cfg.method) ? 6.0554544523933395e-6 : 1.4901161193847656e-8;
      }
      NoisyOracle<double> oracle(objective, opt_eps > 0.0 ? NoiseModel<double>::uniform(opt_eps, g.seed)
                                                          : NoiseModel<double>::none());
      auto rng = trial_stream(g.seed, 0);
      OptimizationTrace<double> trace;
      if (opt_fixed) {
        trace = fixed_step_dfo(oracle, cfg, *opt_fixed, x0, opt_budget, rng, opt_iters);
      } else {
        LineSearchConfig ls;
        ls.direction = direction_rule_from_string(opt_direction);
        ls.eval_budget = opt_budget;
        ls.max_iters = opt_iters;
        trace = run_dfo(oracle, cfg, ls, x0, rng);
      }
      auto& os = out.stream();
      os << "iter,f,grad_est_norm,true_grad_norm,alpha,evals,backtracks\n";
      for (const auto& r : trace.records) {
        os << r.iter << "," << format_number(r.f) << "," << format_number(r.grad_est_norm) << ","
           << (r.true_grad_norm ? format_number(*r.true_grad_norm) : std::string()) << ","
           << format_number(r.alpha) << "," << r.evals << "," << r.backtracks << "\n";
      }
      std::cerr << "termination: " << to_string(trace.termination)
                << ", phi = " << format_number(trace.final().phi) << ", evals = " << oracle.eval_count()
                << "\n";
      return 0;
    }

    if (*bench_cmd) {
      BenchSpec spec = spec_json ? bench_spec_from_json(spec_body(*spec_json, g)) : BenchSpec{};
      apply_globals(spec, g);
      if (bench_units > 0.0) spec.budget_units = bench_units;
      Output out(g.out);
      std::optional<Output> prof;
      if (!bench_profiles.empty()) prof.emplace(bench_profiles);
      run_optimizer_benchmark(spec, &out.stream(), prof ? &prof->stream() : nullptr);
      return 0;
    }

    if (*list_cmd) {
      Output out(g.out);
      out.stream() << "name,n,L_local,f_star\n";
      for (const auto& p : make_standard_problems()) {
        out.stream() << p.name << "," << p.x0.size() << "," << format_number(p.objective.lipschitz_gradient)
                     << "," << (p.f_star ? format_number(*p.f_star) : std::string()) << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
