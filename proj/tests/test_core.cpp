#include "gradest/noise.hpp"
#include "gradest/objective.hpp"
#include "gradest/oracle.hpp"
#include "gradest/problems.hpp"
#include "gradest/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace gradest;
using Vec = Vector<double>;

TEST_CASE("eval_noisy on a linear function") {
  NoisyOracle<double> exact(make_linear<double>(Vec::Ones(3)));
  CHECK(eval_noisy(exact, Vec::Ones(3)) == 3.0);
  CHECK(exact.eval_count() == 1);

  NoisyOracle<double> noisy(make_linear<double>(Vec::Ones(3)), NoiseModel<double>::uniform(0.1, 7));
  for (int i = 0; i < 100; ++i) {
    const double f = eval_noisy(noisy, Vec::Ones(3));
    CHECK(f >= 2.9);
    CHECK(f <= 3.1);
  }
  CHECK(noisy.eval_count() == 100);
}

TEST_CASE("eval_noisy rejects a wrong dimension") {
  NoisyOracle<double> oracle(make_linear<double>(Vec::Ones(3)));
  CHECK_THROWS_AS(oracle.evaluate(Vec::Ones(2)), std::invalid_argument);
}

TEST_CASE("sincos at the origin") {
  const auto f2 = make_sincos<double>(2, 1.0, 2.0);
  CHECK(f2.value_at(Vec::Zero(2)) == doctest::Approx(1.0));
  const Vec g2 = f2.gradient_at(Vec::Zero(2));
  CHECK(g2[0] == doctest::Approx(1.0));
  CHECK(g2[1] == doctest::Approx(0.0));

  CHECK(make_sincos<double>(20, 1.0, 2.0).gradient_at(Vec::Zero(20)).norm() ==
        doctest::Approx(std::sqrt(10.0)));
  CHECK(make_sincos<double>(4, 100.0, 101.0).gradient_at(Vec::Zero(4)).norm() ==
        doctest::Approx(std::sqrt(2.0) * 100.0));
}

TEST_CASE("sincos argument checks") {
  CHECK_THROWS_AS(make_sincos<double>(3, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_sincos<double>(4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_sincos<double>(4, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_sincos<double>(4, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("sincos constants") {
  const auto f = make_sincos<double>(20, 1.0, 2.0);
  CHECK(f.lipschitz_gradient == 2.0);
  CHECK(*f.lipschitz_hessian == 1.0);
  CHECK(*make_sincos<double>(4, 3.0, 5.0).lipschitz_hessian == 3.0);
}

TEST_CASE("sincos gradient Lipschitz ratio stays below L") {
  for (auto [M, L] : {std::pair{1.0, 2.0}, std::pair{3.0, 4.5}, std::pair{0.5, 2.0}}) {
    const auto f = make_sincos<double>(20, M, L);
    RngStream rng(3, 0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      Vec x(20), y(20);
      for (Index i = 0; i < 20; ++i) {
        x[i] = rng.uniform(-1.0, 1.0);
        y[i] = rng.uniform(-1.0, 1.0);
      }
      worst = std::max(worst, (f.gradient(x) - f.gradient(y)).norm() / (x - y).norm());
    }
    CHECK(worst <= f.lipschitz_gradient + 1e-9);
  }
}

TEST_CASE("standard problems") {
  const auto quadratic = find_problem("quadratic");
  REQUIRE(quadratic);
  CHECK((quadratic->objective.gradient(quadratic->x0) - quadratic->x0).norm() == 0.0);

  const auto rosen = find_problem("rosenbrock");
  REQUIRE(rosen);
  CHECK(rosen->x0.size() == 2);
  CHECK(rosen->objective.value(rosen->x0) == doctest::Approx(24.2));

  const auto linear = find_problem("linear");
  REQUIRE(linear);
  CHECK(linear->objective.gradient(Vec::Constant(3, -5.0)) == Vec::Ones(3));

  for (const char* name : {"rosenbrock10", "powell_singular", "trigonometric"}) {
    CAPTURE(name);
    CHECK(find_problem(name).has_value());
  }
  CHECK_FALSE(find_problem("no_such_problem").has_value());
  CHECK(problem_names().size() >= 6);
}

TEST_CASE("standard problems have their documented minima") {
  for (const auto& p : make_standard_problems()) {
    if (!p.f_star || p.name == "quadratic_illcond") continue;
    CAPTURE(p.name);
    CHECK(p.f_star.value() == 0.0);
  }
  const auto q = find_problem("quadratic_illcond");
  // The minimizer solves A x = 1.
  Vec diag(10);
  for (Index i = 0; i < 10; ++i) diag[i] = std::pow(10.0, 2.0 * static_cast<double>(i) / 9.0);
  const Vec xstar = diag.cwiseInverse();
  CHECK(q->objective.value(xstar) == doctest::Approx(*q->f_star).epsilon(1e-12));
  CHECK(q->objective.gradient(xstar).norm() < 1e-12);
  const auto rosen = find_problem("rosenbrock10");
  CHECK(rosen->objective.value(Vec::Ones(10)) == 0.0);
  const auto wood = find_problem("wood");
  CHECK(wood->objective.value(Vec::Ones(4)) == doctest::Approx(0.0));
  CHECK(wood->objective.gradient(Vec::Ones(4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("analytic gradients agree with central differences") {
  RngStream rng(17, 0);
  for (const auto& p : make_standard_problems()) {
    CAPTURE(p.name);
    const Index n = p.x0.size();
    for (int k = 0; k < 5; ++k) {
      Vec x = p.x0;
      if (k > 0) {
        for (Index i = 0; i < n; ++i) x[i] += rng.uniform(-0.5, 0.5);
      }
      const Vec g = p.objective.gradient(x);
      Vec fd(n);
      const double h = 1e-6;
      for (Index i = 0; i < n; ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        fd[i] = (p.objective.value(a) - p.objective.value(b)) / (2.0 * h);
      }
      const double scale = std::max(g.norm(), 1.0);
      CHECK((fd - g).norm() / scale <= 1e-4);
    }
  }
}

TEST_CASE("central-difference error falls by four per halving") {
  const auto f = make_sincos<double>(4, 1.0, 2.0);
  Vec x(4);
  x << 0.3, -0.7, 0.9, 0.1;
  const Vec g = f.gradient(x);
  auto cfd_error = [&](double h) {
    Vec fd(4);
    for (Index i = 0; i < 4; ++i) {
      Vec a = x, b = x;
      a[i] += h;
      b[i] -= h;
      fd[i] = (f.value(a) - f.value(b)) / (2.0 * h);
    }
    return (fd - g).norm();
  };
  for (double h : {1e-1, 5e-2, 2.5e-2}) {
    const double ratio = cfd_error(h) / cfd_error(h / 2.0);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("local Lipschitz constants bound sampled gradient ratios") {
  RngStream rng(29, 0);
  for (const auto& p : make_standard_problems()) {
    CAPTURE(p.name);
    const Index n = p.x0.size();
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      Vec x(n), y(n);
      for (Index i = 0; i < n; ++i) {
        x[i] = p.x0[i] + rng.uniform(-1.0, 1.0);
        y[i] = p.x0[i] + rng.uniform(-1.0, 1.0);
      }
      worst = std::max(worst, (p.objective.gradient(x) - p.objective.gradient(y)).norm() / (x - y).norm());
    }
    CHECK(worst <= p.objective.lipschitz_gradient * (1.0 + 1e-6));
  }
}

TEST_CASE("noise stays within its level exactly") {
  const auto f = make_sincos<double>(6, 1.0, 2.0);
  for (const auto& noise : {NoiseModel<double>::uniform(1e-3, 5), NoiseModel<double>::sinusoidal(1e-3),
                            NoiseModel<double>::uniform(0.37, 9), NoiseModel<double>::sinusoidal(1e-12)}) {
    NoisyOracle<double> oracle(f, noise);
    RngStream rng(41, 0);
    bool ok = true;
    for (int k = 0; k < 10000; ++k) {
      Vec x(6);
      for (Index i = 0; i < 6; ++i) x[i] = rng.uniform(-100.0, 100.0);
      const double diff = std::abs(oracle.evaluate(x) - oracle.true_value(x));
      ok = ok && diff <= noise.level;
    }
    CHECK(ok);
  }
}

TEST_CASE("noise kinds") {
  const Vec x = Vec::Constant(3, 0.25);
  NoisyOracle<double> none(make_linear<double>(Vec::Ones(3)), NoiseModel<double>::none());
  CHECK(none.evaluate(x) == none.true_value(x));
  CHECK(NoiseModel<double>::uniform(0.0, 1).kind == NoiseKind::none);
  CHECK_THROWS_AS(NoiseModel<double>::uniform(-1.0, 1), std::invalid_argument);

  NoisyOracle<double> iid(make_linear<double>(Vec::Ones(3)), NoiseModel<double>::uniform(0.1, 1));
  std::set<double> values;
  for (int i = 0; i < 10; ++i) values.insert(iid.evaluate(x));
  CHECK(values.size() == 10);

  NoisyOracle<double> sinus(make_linear<double>(Vec::Ones(3)), NoiseModel<double>::sinusoidal(0.1));
  const double first = sinus.evaluate(x);
  CHECK(sinus.evaluate(x) == first);
  CHECK(first != sinus.true_value(x));
}

TEST_CASE("oracle clones count separately and merge") {
  NoisyOracle<double> base(make_linear<double>(Vec::Ones(2)), NoiseModel<double>::uniform(0.5, 3));
  base.evaluate(Vec::Zero(2));
  auto a = base.clone(0);
  auto b = base.clone(1);
  CHECK(a.eval_count() == 0);
  const double fa = a.evaluate(Vec::Zero(2));
  const double fb = b.evaluate(Vec::Zero(2));
  CHECK(fa != fb);
  CHECK(base.clone(0).evaluate(Vec::Zero(2)) == fa);
  base.merge_count(a);
  base.merge_count(b);
  CHECK(base.eval_count() == 3);
  base.true_value(Vec::Zero(2));
  base.true_gradient(Vec::Zero(2));
  CHECK(base.eval_count() == 3);
}

TEST_CASE("rng matches the SplitMix64 reference sequence") {
  // Reference generator written out independently: state += gamma, then mix.
  auto reference = [](std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t state = 0;
  CHECK(reference(state) == 0xE220A8397B1DCDAFULL);

  RngStream rng(1234, 5);
  // Stream start state is the keyed offset; recover it from the definition.
  std::uint64_t keyed = detail::mix64(1234 ^ detail::mix64(5 + detail::kGoldenGamma));
  for (int i = 0; i < 100; ++i) CHECK(rng.next_u64() == reference(keyed));
}

TEST_CASE("rng determinism and substreams") {
  RngStream a(42, 0), b(42, 0), c(43, 0);
  bool same = true, differ = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    same = same && x == b.next_u64();
    differ = differ || x != c.next_u64();
  }
  CHECK(same);
  CHECK(differ);

  const RngStream root(42, 0);
  auto s1 = root.substream(1);
  auto s1_again = root.substream(1);
  auto s2 = root.substream(2);
  CHECK(s1.next_u64() == s1_again.next_u64());
  CHECK(s1.next_u64() != s2.next_u64());
  CHECK(root.position() == 0);

  RngStream u(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}
