#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qrecycle/distributions.hpp"
#include "qrecycle/errors.hpp"
#include "qrecycle/oracle.hpp"
#include "qrecycle/recycling_ode.hpp"
#include "qrecycle/student_map.hpp"

using namespace qrecycle;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

long double ident(long double x) { return x; }

// Max relative error of a right half-map against the exact exponential-normal map.
double exp_normal_error(const QuantileMap& m, double v_max) {
  double worst = 0.0;
  for (double v = 0.5; v <= v_max + 1e-12; v += 0.5) {
    worst = std::max(worst, rel(m(v), oracle_normal_from_exponential(v)));
  }
  return worst;
}

}  // namespace

TEST_CASE("rode_rhs") {
  const HFunction n = ident;
  const HFunction one = [](long double) { return 1.0L; };
  CHECK(rode_rhs(2.5L, 2.5L, 1.0L, n, n) == 0.0L);
  CHECK(rode_rhs(7.0L, 7.0L, 1.0L, one, one) == 0.0L);
  const HFunction t4 = [](long double q) { return static_cast<long double>(student_h(q, 4.0)); };
  const long double expected = student_h(1.14, 4.0) * 1.44L - 1.2L;
  CHECK(std::fabs(static_cast<double>(rode_rhs(1.0L, 1.14L, 1.2L, n, t4) - expected)) < 1e-15);
}

TEST_CASE("problem validation") {
  RecyclingProblem p;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.base_h = ident;
  p.target_h = ident;
  CHECK_NOTHROW(p.validate());
  p.slope0 = 0.0L;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.slope0 = 1.0L;
  p.v_max = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p.v_max = 1.0;
  CHECK_THROWS_AS(solve_rode(p, 0.0), DomainError);
  auto pair = build_gaussian_identity_problems(1.0);
  std::swap(pair.left, pair.right);
  CHECK_THROWS_AS(solve_two_sided(pair), DomainError);
}

TEST_CASE("QuantileMap") {
  const QuantileMap m({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}, {0.0, 2.0, 4.0});
  CHECK(m(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m(1.5) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(m.derivative(1.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(m.v_min() == 0.0);
  CHECK(m.v_max() == 2.0);
  CHECK_THROWS_AS(m(2.1), DomainError);
  CHECK_THROWS_AS(m(-0.1), DomainError);
  CHECK_THROWS_AS(QuantileMap({0.0, 1.0}, {1.0, 0.5}, {1.0, 1.0}), MonotonicityError);
  // Fritsch-Carlson violation: slopes far steeper than the secant.
  CHECK_THROWS_AS(QuantileMap({0.0, 1.0}, {0.0, 1.0}, {5.0, 5.0}), MonotonicityError);
  CHECK_THROWS_AS(QuantileMap({0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}), DomainError);
}

TEST_CASE("Gaussian identity map") {
  const auto map = solve_two_sided(build_gaussian_identity_problems(6.0));
  double worst = 0.0;
  for (double v = -6.0; v <= 6.0; v += 0.01) worst = std::max(worst, std::fabs(map(v) - v));
  CHECK(worst <= 1e-10);
  CHECK(map.v_min() == -6.0);
  CHECK(map.v_max() == 6.0);
}

TEST_CASE("exponential base to exponential target is the identity") {
  RecyclingProblem p;
  p.base_h = [](long double) { return 1.0L; };
  p.target_h = [](long double) { return 1.0L; };
  p.v_max = 5.0;
  const auto m = solve_rode(p);
  for (double v : {0.0, 1.0, 2.5, 5.0}) CHECK(std::fabs(m(v) - v) < 1e-13);
}

TEST_CASE("Gaussian to Student(4)") {
  const auto map = solve_two_sided(build_gaussian_student_problems(4.0, 6.0));
  CHECK(rel(map.right.grid_dq()[0], 1.06384608107048714) < 1e-15);
  double worst = 0.0;
  for (double v = -6.0; v <= 6.0; v += 0.05) {
    if (v == 0.0) continue;
    worst = std::max(worst, rel(map(v), oracle_student_from_gaussian(v, 4.0)));
  }
  CHECK(worst <= 5e-8);
  // Odd symmetry of the two half-maps.
  for (double v : {0.3, 2.0, 5.5}) CHECK(std::fabs(map(-v) + map(v)) < 1e-14 * std::fabs(map(v)));
  // Composition consistency with the series/tail map on |v| <= 4.
  const StudentMap series;
  for (double v = 0.1; v <= 4.0; v += 0.1) CHECK(rel(series(v), map(v)) <= 2e-5);
}

TEST_CASE("exponential to normal") {
  const auto map = solve_two_sided(build_exponential_normal_problems(10.0));
  double worst = 0.0;
  for (double v = 0.01; v <= 10.0; v += 0.01) {
    worst = std::max(worst, rel(map(v), oracle_normal_from_exponential(v)));
  }
  CHECK(worst <= 1e-8);
  CHECK(std::fabs(map(-3.0) + map(3.0)) < 1e-14);
}

TEST_CASE("RK4 step halving gains at least 2^4") {
  const auto p = build_exponential_normal_problems(6.0).right;
  const double coarse = exp_normal_error(solve_rode(p, 0.1, RkOrder::rk4), 6.0);
  const double fine = exp_normal_error(solve_rode(p, 0.05, RkOrder::rk4), 6.0);
  CHECK(coarse / fine >= 16.0);
  const double coarse6 = exp_normal_error(solve_rode(p, 0.1, RkOrder::rk6), 6.0);
  const double fine6 = exp_normal_error(solve_rode(p, 0.05, RkOrder::rk6), 6.0);
  CHECK(coarse6 / fine6 >= 32.0);
  CHECK(coarse6 < coarse);
}

TEST_CASE("hyperbolic problems") {
  const HyperbolicParams p{1.0, 0.0, 1.0};
  const auto split = hyperbolic_split(p);
  const auto problems = build_hyperbolic_problems(p, split, 5.0);
  const double slope = bessel_k(1.0, 1.0) * std::numbers::e;
  CHECK(rel(static_cast<double>(problems.right.slope0), slope) < 1e-12);
  CHECK(rel(static_cast<double>(problems.left.slope0), slope) < 1e-12);
  CHECK(rel(slope, 1.63615) < 1e-5);
  const auto map = solve_two_sided(problems);
  const Hyperbolic target(p);
  const TwoSidedExponential base = split;
  for (double v = -5.0; v <= 5.0; v += 0.5) {
    CHECK(std::fabs(map(-v) + map(v)) < 1e-13);
    const double o = oracle_cdf_inverse(target, base.cdf(v));
    CHECK(std::fabs(map(v) - o) <= 1e-6);
  }
  // Fig. 1 shape: for large |v| the map falls back toward the diagonal.
  CHECK(map(5.0) - 5.0 < map(2.0) - 2.0 + 1.0);
  CHECK_THROWS_AS(build_hyperbolic_problems(HyperbolicParams{1.0, 2.0, 1.0}, split), DomainError);
}

TEST_CASE("asymmetric hyperbolic problems match the oracle") {
  const HyperbolicParams p{1.0, 0.5, 1.0};
  const auto split = hyperbolic_split(p);
  const auto map = solve_two_sided(build_hyperbolic_problems(p, split, 5.0));
  const Hyperbolic target(p);
  for (double v : {-4.0, -1.0, -0.2, 0.3, 1.5, 4.5}) {
    const double mass = v < 0 ? split.cdf(v) : 1.0 - split.cdf(v);
    const double o = oracle_cdf_inverse_tail(target, mass, v > 0);
    CHECK(std::fabs(map(v) - o) <= 1e-6 * std::max(1.0, std::fabs(o)));
  }
}

TEST_CASE("VG problems") {
  const VGParams one{1.0, 1.0, 0.0};
  const auto id = solve_two_sided(build_vg_problems(one, vg_split(one), 5.0));
  for (double v = -5.0; v <= 5.0; v += 0.25) CHECK(std::fabs(id(v) - v) < 1e-12);

  const VGParams two{2.0, 1.0, 0.0};
  const auto split = vg_split(two);
  const auto map = solve_two_sided(build_vg_problems(two, split, 5.0));
  const VarianceGamma target(two);
  double prev = map(-5.0);
  for (double v = -4.9; v <= 5.0; v += 0.1) {
    const double q = map(v);
    CHECK(q > prev);
    prev = q;
  }
  for (double v : {-3.0, -1.0, 0.5, 2.0, 4.0}) {
    CHECK(std::fabs(map(-v) + map(v)) < 1e-12);
    const double mass = v < 0 ? split.cdf(v) : 1.0 - split.cdf(v);
    const double o = oracle_cdf_inverse_tail(target, mass, v > 0);
    CHECK(std::fabs(map(v) - o) <= 1e-6 * std::max(1.0, std::fabs(o)));
  }
  CHECK_THROWS_AS(build_vg_problems(VGParams{0.5, 1.0, 0.0}, split), UnsupportedError);
}

TEST_CASE("blow-up and monotonicity guards") {
  RecyclingProblem p;
  p.base_h = [](long double) { return 0.0L; };
  p.target_h = [](long double) { return 1.0L; };  // Q' = 1/(1 - v): blows up at v = 1
  p.v_max = 2.0;
  CHECK_THROWS_AS(solve_rode(p, 1e-3), OverflowError);
  RecyclingProblem q;
  q.base_h = [](long double) { return 0.0L; };
  q.target_h = [](long double) { return -1.0L; };  // Q'' = -Q'^2 with Q'(0) = 1: fine
  q.base_h = [](long double) { return 50.0L; };   // strong damping drives Q' to 0
  q.v_max = 20.0;
  CHECK_THROWS_AS(solve_rode(q, 0.5, RkOrder::rk4), MonotonicityError);
}
