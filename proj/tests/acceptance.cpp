// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "gradest/dfo.hpp"
#include "gradest/directions.hpp"
#include "gradest/estimators.hpp"
#include "gradest/experiments.hpp"
#include "gradest/moments.hpp"
#include "gradest/parallel.hpp"
#include "gradest/problems.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace gradest;
using namespace gradest::testing;
using Vec = Vector<double>;
using Mat = Matrix<double>;

namespace {

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome theta_distribution() {
  ThetaDistSpec spec;
  spec.n = 32;
  spec.N_list = {32, 128, 512};
  spec.trials = 10000;
  spec.seed = 1;
  spec.threads = worker_count();
  const auto rows = run_theta_distribution(spec, nullptr, nullptr);
  const double mean_ref[] = {1.00, 0.50, 0.25};
  const double success_ref[] = {0.0, 49.53, 100.0};
  Outcome out{true, ""};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double pct = 100.0 * rows[i].stats.success_rate;
    out.pass = out.pass && std::abs(rows[i].stats.mean - mean_ref[i]) <= 0.05 &&
               std::abs(pct - success_ref[i]) <= 3.0;
    out.detail += fmt("N=%.0f mean=%.4f success=%.2f%% ", rows[i].N, rows[i].stats.mean, pct);
  }
  return out;
}

/// MC mean of ||g - a||^p for GSG on phi = a^T x with a = e.
MeanSe gsg_error_power(Index n, Index N, int power, std::int64_t trials, std::uint64_t seed) {
  const Vec a = Vec::Ones(n);
  NoisyOracle<double> base(make_linear<double>(a));
  std::vector<double> xs(static_cast<std::size_t>(trials));
  parallel_for(xs.size(), worker_count(), [&](std::size_t t) {
    auto oracle = base.clone(t);
    auto rng = trial_stream(seed, t);
    const double e2 = (gsg(oracle, a, 1.0, N, rng).g - a).squaredNorm();
    xs[t] = power == 2 ? e2 : e2 * e2;
  });
  return mean_se(xs);
}

Outcome moment_law(int power) {
  const std::pair<Index, Index> settings[] = {{4, 1}, {4, 2}, {32, 8}};
  Outcome out{true, ""};
  for (const auto& [n, N] : settings) {
    const double a2 = static_cast<double>(n);
    const double nn = static_cast<double>(n), NN = static_cast<double>(N);
    const double expected =
        power == 2
            ? (nn + 1.0) * a2 / NN
            : (NN * (NN - 1.0) * (nn * nn + 4.0 * nn + 7.0) + NN * (3.0 * nn * nn + 20.0 * nn + 37.0)) * a2 *
                  a2 / (NN * NN * NN * NN);
    const auto run = [&](std::int64_t trials, std::uint64_t seed) {
      return gsg_error_power(n, N, power, trials, seed);
    };
    const auto m = run(100000, 10 + static_cast<std::uint64_t>(power));
    const bool ok = mc_scalar_check(run, expected, 100000, 10 + static_cast<std::uint64_t>(power));
    out.pass = out.pass && ok;
    out.detail += fmt("(n=%.0f,N=%.0f) ", nn, NN) + fmt("mean=%.4g expected=%.4g ", m.mean, expected);
  }
  return out;
}

Outcome moment_identities() {
  constexpr std::int64_t K = 1000000;
  struct Check {
    MomentDistribution dist;
    MomentFunctional<double> f;
    Index n;
    bool bound_only;
  };
  std::vector<Check> checks;
  RngStream arng(20, 0);
  for (Index n : {2, 5, 20}) {
    for (int k = 0; k < 20; ++k) {
      Vec a(n);
      for (Index i = 0; i < n; ++i) a[i] = arng.uniform(-2.0, 2.0);
      checks.push_back({MomentDistribution::gaussian, MomentFunctional<double>::quad_outer(a), n, false});
    }
    Vec a(n);
    for (Index i = 0; i < n; ++i) a[i] = arng.uniform(-2.0, 2.0);
    for (auto dist : {MomentDistribution::gaussian, MomentDistribution::sphere}) {
      checks.push_back({dist, MomentFunctional<double>::quad_outer(a), n, false});
      for (int k : {0, 1, 2}) checks.push_back({dist, MomentFunctional<double>::odd_outer(a, k), n, false});
    }
    for (int k : {0, 1, 2, 3})
      checks.push_back({MomentDistribution::sphere, MomentFunctional<double>::norm_outer(k), n, false});
    checks.push_back({MomentDistribution::gaussian, MomentFunctional<double>::norm_outer(1), n, true});
  }
  std::vector<char> ok(checks.size(), 0);
  parallel_for(checks.size(), worker_count(), [&](std::size_t i) {
    const auto& c = checks[i];
    const auto run = [&](std::int64_t samples, std::uint64_t seed) {
      RngStream rng(seed, i);
      return monte_carlo_moment(c.dist, c.f, c.n, samples, rng);
    };
    if (c.bound_only) {
      const auto m = run(K, 21);
      const Mat gap = gaussian_odd_norm_bound<double>(c.n, 1) * Mat::Identity(c.n, c.n) - m.mean;
      Eigen::SelfAdjointEigenSolver<Mat> eig(gap);
      ok[i] = eig.eigenvalues().minCoeff() >=
              -kStandardErrors * m.std_error.maxCoeff() * static_cast<double>(c.n);
      return;
    }
    ok[i] = mc_moment_check(run, moment_closed_form(c.dist, c.f, c.n), K, 21);
  });
  const auto passed = std::count(ok.begin(), ok.end(), 1);
  return {passed == static_cast<long>(checks.size()),
          fmt("%.0f/%.0f checks at K=1e6", static_cast<double>(passed), static_cast<double>(checks.size()))};
}

Outcome deterministic_dominance() {
  BoundCheckSpec spec;
  spec.methods = {Method::FFD, Method::CFD, Method::LI};
  spec.seed = 5;
  spec.threads = worker_count();
  const auto rows = run_bound_validation(spec, nullptr);
  Outcome out{true, ""};
  for (Method m : spec.methods) {
    int cases = 0, failed = 0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      cases += r.cases;
      if (!r.pass || r.roundoff) failed += r.cases;
    }
    out.pass = out.pass && failed == 0 && cases == 10000;
    out.detail += std::string(to_string(m)) + fmt(" %.0f/%.0f ", cases - failed, cases);
  }
  return out;
}

Outcome probabilistic_validity() {
  BoundCheckSpec spec;
  spec.methods = {Method::GSG, Method::cGSG, Method::BSG, Method::cBSG};
  spec.eps_f = {0.0, 1e-6};
  spec.trials = 1000;
  spec.seed = 6;
  spec.threads = worker_count();
  const auto rows = run_bound_validation(spec, nullptr);
  Outcome out{true, ""};
  for (Method m : spec.methods) {
    int evaluated = 0;
    double worst = 0.0;
    for (const auto& r : rows) {
      if (r.method != m || r.skipped) continue;
      ++evaluated;
      worst = std::max(worst, r.measured);
    }
    out.pass = out.pass && evaluated > 0 && worst <= 0.15;
    out.detail += std::string(to_string(m)) + fmt(" rate=%.3f ", worst);
  }
  return out;
}

Outcome algebraic_identities() {
  RngStream rng(7, 0);
  double li_ffd = 0.0, li_linear = 0.0, cfd_quad = 0.0, gsg_li = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + k % 19;
    Vec x(n), a(n);
    for (Index i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1.0, 1.0);
      a[i] = rng.uniform(-2.0, 2.0);
    }
    const double sigma = std::pow(10.0, rng.uniform(-6.0, -1.0));

    // sincos needs an even dimension.
    const Index even = 2 * ((n + 1) / 2);
    NoisyOracle<double> sc(make_sincos<double>(even, 1.0, 2.0));
    const Vec xs = Vec::Constant(even, 0.3);
    li_ffd = std::max(li_ffd, (linear_interp(sc, xs, coordinate_directions<double>(xs.size()), sigma).g -
                               ffd(sc, xs, sigma).g)
                                  .cwiseAbs()
                                  .maxCoeff());

    NoisyOracle<double> lin(make_linear<double>(a));
    const auto q = interpolation_directions<double>(n, rng);
    li_linear = std::max(li_linear, (linear_interp(lin, x, q, 0.1).g - a).norm());

    Mat B(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) B(i, j) = rng.normal();
    const Mat A = B * B.transpose();
    NoisyOracle<double> quad(make_quadratic<double>(A, a));
    cfd_quad = std::max(cfd_quad, (cfd(quad, x, 0.1).g - (A * x - a)).norm());

    const auto gq = gaussian_directions<double>(xs.size(), xs.size(), rng);
    const auto lhs = gsg(sc, xs, 1e-2, gq).g;
    const Vec rhs = gq.matrix().transpose() * gq.matrix() * linear_interp(sc, xs, gq, 1e-2).g /
                    static_cast<double>(xs.size());
    gsg_li = std::max(gsg_li, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
  }
  const bool pass = li_ffd <= 1e-12 && li_linear <= 1e-10 && cfd_quad <= 1e-10 && gsg_li <= 1e-10;
  return {pass, fmt("LI-FFD=%.2e LI-linear=%.2e CFD-quadratic=%.2e", li_ffd, li_linear, cfd_quad) +
                    fmt(" GSG-LI=%.2e", gsg_li)};
}

Outcome noise_u_shape() {
  const double eps = 1e-2, L = 2.0;
  SweepSpec spec;
  spec.methods = {Method::FFD};
  spec.eps_f = {eps};
  spec.sigma = {1e-4, 2.0 * std::sqrt(eps / L), 1.0};
  spec.trials = 100;
  spec.seed = 8;
  spec.threads = worker_count();
  const auto cells = run_relative_error_sweep(spec, nullptr, nullptr);
  const double lo = cells[0].stats.mean, mid = cells[1].stats.mean, hi = cells[2].stats.mean;
  return {mid < lo && mid < hi,
          fmt("mean theta sigma=1e-4: %.4g, balanced: %.4g, sigma=1: %.4g", lo, mid, hi)};
}

Outcome optimizer_sanity() {
  const auto rosen = find_problem("rosenbrock");
  NoisyOracle<double> oracle(rosen->objective);
  EstimatorConfig<double> ffd_cfg;
  ffd_cfg.method = Method::FFD;
  ffd_cfg.sigma = 1.4901161193847656e-8;
  LineSearchConfig ls;
  ls.eval_budget = 10000;
  RngStream rng(9, 0);
  const auto t1 = run_dfo(oracle, ffd_cfg, ls, rosen->x0, rng);
  const double gap = t1.final().phi - *rosen->f_star;

  const Index n = 20;
  const double L = 2.0, eps = 1e-4;
  NoisyOracle<double> noisy(make_sincos<double>(n, 1.0, L), NoiseModel<double>::uniform(eps, 9));
  ffd_cfg.sigma = 2.0 * std::sqrt(eps / L);
  ls.eval_budget = 20000;
  const auto t2 = run_dfo(noisy, ffd_cfg, ls, Vec::Zero(n), rng);
  const double grad = *t2.final().true_grad_norm;
  const double limit = 10.0 * std::sqrt(n * L * eps);
  return {gap <= 1e-5 && t1.total_evals <= 10000 && grad <= limit,
          fmt("rosenbrock gap=%.2e in %.0f evals; sincos grad=%.3g", gap, static_cast<double>(t1.total_evals),
              grad) +
              fmt(" limit=%.3g", limit)};
}

Outcome benchmark_ordering() {
  BenchSpec spec;
  spec.solvers = default_solvers();
  spec.budget_units = 200.0;
  spec.seed = 10;
  spec.threads = worker_count();
  const auto result = run_optimizer_benchmark(spec, nullptr, nullptr);
  for (const auto& pd : result.profiles) {
    if (pd.tau != 1e-3) continue;
    const auto& ffd_curve = pd.data[0];
    const auto& gsg_curve = pd.data[1];
    int violations = 0;
    for (std::size_t i = 0; i < ffd_curve.y.size(); ++i)
      violations += ffd_curve.y[i] < gsg_curve.y[i] ? 1 : 0;
    return {violations == 0,
            fmt("%.0f problems; final solved FFD+LBFGS=%.3f GSG+SD=%.3f",
                static_cast<double>(result.problems.size()), ffd_curve.y.back(), gsg_curve.y.back()) +
                fmt(" violations=%.0f", violations)};
  }
  return {false, "no tau=1e-3 profile"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"theta distribution", theta_distribution},
      {"second moment law", [] { return moment_law(2); }},
      {"fourth moment law", [] { return moment_law(4); }},
      {"moment identities", moment_identities},
      {"deterministic bound dominance", deterministic_dominance},
      {"probabilistic bound validity", probabilistic_validity},
      {"algebraic identities", algebraic_identities},
      {"noise U-shape", noise_u_shape},
      {"optimizer sanity", optimizer_sanity},
      {"benchmark ordering", benchmark_ordering},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", index++, name, out.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
