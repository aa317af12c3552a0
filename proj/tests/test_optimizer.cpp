#include "gradest/bounds.hpp"
#include "gradest/dfo.hpp"
#include "gradest/lbfgs.hpp"
#include "gradest/line_search.hpp"
#include "gradest/problems.hpp"

#include <doctest.h>

#include <cmath>

using namespace gradest;
using Vec = Vector<double>;
using Mat = Matrix<double>;

namespace {

ObjectiveFunction<double> half_norm(Index n) {
  return make_quadratic<double>(Mat::Identity(n, n), Vec::Zero(n));
}

EstimatorConfig<double> config(Method m, double sigma, Index N = 0) {
  EstimatorConfig<double> c;
  c.method = m;
  c.sigma = sigma;
  c.N = N;
  return c;
}

Mat random_spd(Index n, RngStream& rng) {
  Mat a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ();
  Vec ev(n);
  for (Index i = 0; i < n; ++i) ev[i] = rng.uniform(1.0, 10.0);
  return q * ev.asDiagonal() * q.transpose();
}

}  // namespace

TEST_CASE("armijo search examples") {
  NoisyOracle<double> oracle(half_norm(2));
  LineSearchConfig cfg;
  const Vec x = Vec::Unit(2, 0);
  const auto r = armijo_search(oracle, x, Vec(-x), x, 0.5, cfg);
  CHECK(r.alpha == 1.0);
  CHECK(r.backtracks == 0);
  CHECK(r.f_new == 0.0);
  CHECK(r.x_new.norm() == 0.0);
  CHECK(oracle.eval_count() == 1);

  CHECK_THROWS_AS(armijo_search(oracle, x, Vec(x), x, 0.5, cfg), NotDescent);

  Vec a = Vec::Zero(2);
  NoisyOracle<double> flat(make_linear<double>(a), NoiseModel<double>::uniform(0.1, 3));
  for (int k = 0; k < 200; ++k) {
    const Vec g = Vec::Unit(2, 1);
    const auto s = armijo_search(flat, x, Vec(-g), g, flat.evaluate(x), cfg, 1e-8);
    CHECK(s.backtracks == 0);
  }
}

TEST_CASE("armijo search backtracks and fails") {
  NoisyOracle<double> oracle(half_norm(1));
  LineSearchConfig cfg;
  const Vec x = Vec::Constant(1, 1.0);
  // alpha = 1 and 0.3 overshoot by 10x; alpha = 0.09 is accepted.
  const auto r = armijo_search(oracle, x, Vec(-10.0 * x), x, 0.5, cfg);
  CHECK(r.backtracks == 2);
  CHECK(r.alpha == doctest::Approx(0.09));

  cfg.max_backtracks = 0;
  cfg.noise_relaxation = 0.0;
  CHECK_THROWS_AS(armijo_search(oracle, x, Vec(-10.0 * x), x, 0.5, cfg), StepFailure);
}

TEST_CASE("lbfgs direction") {
  LbfgsHistory<double> empty;
  const Vec g(Vec::LinSpaced(3, 1.0, 3.0));
  CHECK(empty.direction(g) == -g);
  CHECK(lbfgs_direction(empty, g) == -g);

  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 7.0;
  LbfgsHistory<double> h;
  Vec x(2);
  x << 1.0, -1.5;
  const Vec steps[] = {Vec::Unit(2, 0) * 0.4, Vec::Unit(2, 1) * -0.25};
  for (const Vec& s : steps) {
    CHECK(h.push(s, A * s));
    x += s;
  }
  const Vec gx = A * x;
  const Vec newton = -A.inverse() * gx;
  CHECK((h.direction(gx) - newton).norm() <= 1e-6);

  CHECK_FALSE(h.push(Vec::Unit(2, 0), Vec::Unit(2, 1)));
  CHECK(h.size() == 2);
  CHECK_THROWS_AS(LbfgsHistory<double>(0), std::invalid_argument);
}

TEST_CASE("lbfgs directions descend for random positive-curvature histories") {
  RngStream rng(3, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 6);
    LbfgsHistory<double> h(4);
    const Mat A = random_spd(n, rng);
    for (int k = 0; k < 7; ++k) {
      Vec s(n);
      for (Index i = 0; i < n; ++i) s[i] = rng.normal();
      h.push(s, A * s);
    }
    Vec g(n);
    for (Index i = 0; i < n; ++i) g[i] = rng.normal();
    CHECK(g.dot(h.direction(g)) < 0.0);
  }
}

TEST_CASE("run_dfo reaches the rosenbrock minimum") {
  const auto p = find_problem("rosenbrock");
  REQUIRE(p.has_value());
  NoisyOracle<double> oracle(p->objective);
  LineSearchConfig ls;
  ls.eval_budget = 10000;
  RngStream rng(1, 0);
  const auto trace = run_dfo(oracle, config(Method::FFD, 1.49e-8), ls, p->x0, rng);
  CHECK(trace.final().phi - *p->f_star <= 1e-5);
  CHECK(trace.total_evals <= ls.eval_budget + static_cast<std::uint64_t>(ls.max_backtracks));
}

TEST_CASE("run_dfo on a linear function stops on the budget") {
  NoisyOracle<double> oracle(make_linear<double>(Vec::LinSpaced(4, -1.0, 2.0)));
  LineSearchConfig ls;
  ls.eval_budget = 500;
  // Rounding-level curvature pairs send L-BFGS to |f| ~ 1e15, where differences vanish.
  ls.direction = DirectionRule::steepest_descent;
  RngStream rng(2, 0);
  const auto trace = run_dfo(oracle, config(Method::FFD, 1e-2), ls, Vec::Zero(4), rng);
  CHECK(trace.termination == Termination::eval_budget);
  for (std::size_t k = 1; k < trace.records.size(); ++k) CHECK(trace.records[k].f < trace.records[k - 1].f);
}

TEST_CASE("run_dfo stagnates in the noise neighborhood on sincos") {
  const Index n = 20;
  const double L = 2.0, eps = 1e-4;
  NoisyOracle<double> oracle(make_sincos<double>(n, 1.0, L), NoiseModel<double>::uniform(eps, 4));
  LineSearchConfig ls;
  ls.eval_budget = 20000;
  RngStream rng(4, 0);
  const auto trace = run_dfo(oracle, config(Method::FFD, 2.0 * std::sqrt(eps / L)), ls, Vec::Zero(n), rng);
  CHECK(*trace.final().true_grad_norm <= 10.0 * std::sqrt(n * L * eps));
}

TEST_CASE("run_dfo trace invariants") {
  RngStream rng(5, 0);
  const auto problems = benchmark_problems();
  for (const auto& p : problems) {
    for (Method m : {Method::FFD, Method::CFD, Method::GSG, Method::cBSG}) {
      for (double eps : {0.0, 1e-3}) {
        CAPTURE(p.name);
        CAPTURE(to_string(m));
        CAPTURE(eps);
        NoisyOracle<double> oracle(p.objective, NoiseModel<double>::uniform(eps, 6));
        LineSearchConfig ls;
        ls.eval_budget = 3000;
        const double relax = 2.0 * eps;
        if (eps == 0.0) ls.noise_relaxation = 0.0;
        const Index n = p.x0.size();
        const auto trace = run_dfo(oracle, config(m, eps > 0.0 ? 1e-2 : 1e-6, n), ls, p.x0, rng);
        CHECK(trace.total_evals == oracle.eval_count());
        CHECK(trace.final().evals <= trace.total_evals);
        CHECK(static_cast<std::int64_t>(trace.records.size()) <= ls.max_iters + 1);
        for (std::size_t k = 1; k < trace.records.size(); ++k) {
          const auto& r = trace.records[k];
          CHECK(r.evals >= trace.records[k - 1].evals);
          CHECK(r.f_prev == trace.records[k - 1].f);
          CHECK(r.f - r.f_prev <= ls.c1 * r.alpha * r.slope + relax);
          if (eps == 0.0) CHECK(r.f < r.f_prev);
        }
      }
    }
  }
}

TEST_CASE("lbfgs line search solves convex quadratics in at most 2n + 5 iterations") {
  RngStream rng(7, 0);
  for (Index n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      CAPTURE(n);
      const Mat A = random_spd(n, rng);
      Vec x0(n);
      for (Index i = 0; i < n; ++i) x0[i] = rng.normal();
      // phi* = 0 keeps function differences resolvable down to ||grad|| = 1e-8.
      NoisyOracle<double> oracle(make_quadratic<double>(A, Vec::Zero(n)));
      LineSearchConfig ls;
      ls.grad_norm_stop = 1e-8;
      ls.eval_budget = 1000000;
      // Central differences are exact on quadratics up to rounding.
      const auto trace = run_dfo(oracle, config(Method::CFD, 1e-2), ls, x0, rng);
      CHECK(trace.termination == Termination::grad_norm_stop);
      CHECK(trace.final().iter <= 2 * n + 5);
      CHECK(*trace.final().true_grad_norm <= 1e-8 * 1.01);
    }
  }
}

TEST_CASE("run_dfo argument checks") {
  NoisyOracle<double> oracle(half_norm(2));
  RngStream rng(8, 0);
  LineSearchConfig ls;
  ls.eval_budget = 0;
  CHECK_THROWS_AS(run_dfo(oracle, config(Method::FFD, 1e-6), ls, Vec::Ones(2), rng), std::invalid_argument);
  ls = {};
  ls.c1 = 1.0;
  CHECK_THROWS_AS(run_dfo(oracle, config(Method::FFD, 1e-6), ls, Vec::Ones(2), rng), std::invalid_argument);
  ls = {};
  ls.tau = 0.0;
  CHECK_THROWS_AS(run_dfo(oracle, config(Method::FFD, 1e-6), ls, Vec::Ones(2), rng), std::invalid_argument);
}

TEST_CASE("fixed step examples") {
  RngStream rng(9, 0);
  NoisyOracle<double> oracle(half_norm(3));
  const Vec x0 = Vec::LinSpaced(3, 1.0, 3.0);
  const auto halving = fixed_step_dfo(oracle, config(Method::CFD, 1e-3), 0.5, x0, 10000, rng, 20);
  REQUIRE(halving.records.size() == 20);
  for (std::size_t k = 1; k < halving.records.size(); ++k) {
    CHECK((halving.records[k].x - 0.5 * halving.records[k - 1].x).norm() <= 1e-12 * x0.norm());
  }
  CHECK_FALSE(halving.diverged);
  CHECK(halving.total_evals == oracle.eval_count());

  NoisyOracle<double> blowup(half_norm(3));
  const auto div = fixed_step_dfo(blowup, config(Method::CFD, 1e-3), 2.5, x0, 10000, rng);
  CHECK(div.diverged);
  CHECK(div.termination == Termination::diverged);
  CHECK(div.records.size() == 6);

  CHECK_THROWS_AS(fixed_step_dfo(oracle, config(Method::CFD, 1e-3), 0.0, x0, 100, rng),
                  std::invalid_argument);
}

TEST_CASE("fixed step GSG on rosenbrock stays finite") {
  const auto p = find_problem("rosenbrock");
  REQUIRE(p.has_value());
  NoisyOracle<double> oracle(p->objective);
  RngStream rng(10, 0);
  const auto trace = fixed_step_dfo(oracle, config(Method::GSG, 1e-6, 2), 1e-3, p->x0, 100000, rng);
  for (const auto& r : trace.records) CHECK(std::isfinite(r.f));
  CHECK(trace.total_evals == oracle.eval_count());
  CHECK(trace.total_evals <= 100000);
}

TEST_CASE("condition table settings meet the norm condition at the stated rate") {
  const Index n = 4;
  const double L = 2.0, eps = 1e-6, theta = 0.5, delta = 0.1;
  const auto f = make_sincos<double>(n, 1.0, L);
  for (Method m : {Method::GSG, Method::cGSG, Method::BSG, Method::cBSG}) {
    CAPTURE(to_string(m));
    NoisyOracle<double> oracle(f, NoiseModel<double>::uniform(eps, 11));
    // Evaluation points are the iterates of a short noisy descent run from random starts.
    RngStream rng(12, static_cast<std::uint64_t>(m));
    int sampled = 0, satisfied = 0;
    while (sampled < 1000) {
      Vec x(n);
      for (Index i = 0; i < n; ++i) x[i] = rng.uniform(-2.0, 2.0);
      NoisyOracle<double> path_oracle(f);
      LineSearchConfig ls;
      ls.max_iters = 10;
      const auto trace = run_dfo(path_oracle, config(Method::FFD, 1e-6), ls, x, rng);
      for (const auto& r : trace.records) {
        if (sampled == 1000) break;
        BoundQuery q;
        q.method = m;
        q.n = n;
        q.L = L;
        q.M = 1.0;
        q.eps_f = eps;
        q.theta = theta;
        q.delta = delta;
        q.grad_norm = *r.true_grad_norm;
        const auto row = condition_table(q);
        if (row.interval_empty) continue;
        const auto est =
            estimate(oracle, r.x,
                     config(m, std::sqrt(*row.sigma_lo * *row.sigma_hi), static_cast<Index>(row.n_min)), rng);
        satisfied += (est.g - f.gradient(r.x)).norm() <= theta * *r.true_grad_norm ? 1 : 0;
        ++sampled;
      }
    }
    CHECK(static_cast<double>(satisfied) / sampled >= 1.0 - delta - 0.05);
  }
}
