#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qrecycle/distributions.hpp"
#include "qrecycle/errors.hpp"
#include "qrecycle/quadrature.hpp"

using namespace qrecycle;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Total mass of a density by quadrature on both half-lines.
double mass(const Distribution& d) {
  auto f = [&d](double x) { return d.density(x); };
  return quad::integrate_upper<double>(f, 0.0, 1e-12).value +
         quad::integrate_lower<double>(f, 0.0, 1e-12).value;
}

double upper_mass(const Distribution& d) {
  auto f = [&d](double x) { return d.density(x); };
  return quad::integrate_upper<double>(f, 0.0, 1e-13).value;
}

}  // namespace

TEST_CASE("H-functions") {
  CHECK(normal_h(2.5) == 2.5);
  CHECK(normal_h(-3.0) == -3.0);
  CHECK(exponential_h(0.0) == 1.0);
  CHECK(exponential_h(5.0) == 1.0);
  CHECK(student_h(0.0, 7.0) == 0.0);
  CHECK(student_h(1.0, 1.0) == 1.0);
  CHECK(rel(student_h(3.0, 4.0), 15.0 / 13.0) < 1e-15);
  const HyperbolicParams hp{1.0, 0.0, 1.0};
  CHECK(hyperbolic_h(0.0, HyperbolicParams{2.0, 0.7, 1.5}) == doctest::Approx(-0.7));
  CHECK(rel(hyperbolic_h(1.0, hp), 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::fabs(hyperbolic_h(1e9, HyperbolicParams{2.0, 0.5, 1.0}) - 1.5) < 1e-12);
  CHECK(std::fabs(hyperbolic_h(-1e9, HyperbolicParams{2.0, 0.5, 1.0}) + 2.5) < 1e-12);
}

TEST_CASE("H-function is -d/dx log density") {
  const StudentT t(4.0);
  const Hyperbolic hyp(HyperbolicParams{1.5, 0.4, 0.8});
  const VarianceGamma vg(VGParams{2.5, 1.2, -0.3});
  const Distribution* dists[] = {&t, &hyp, &vg};
  for (const auto* d : dists) {
    for (double x : {-2.5, -0.7, 0.4, 1.9}) {
      const double h = 1e-5;
      const double fd = -(std::log(d->density(x + h)) - std::log(d->density(x - h))) / (2 * h);
      CHECK(std::fabs(fd - d->h(x)) < 1e-7 * std::max(1.0, std::fabs(d->h(x))));
    }
  }
}

TEST_CASE("VG H-function") {
  const VGParams one{1.0, 1.3, 0.4};
  CHECK(vg_h(2.0, one) == 1.3 - 0.4);
  CHECK(vg_h(-2.0, one) == -(1.3 + 0.4));
  const VGParams two{2.0, 1.0, 0.0};
  CHECK(rel(vg_h(1.0, two), 0.5) < 1e-13);
  CHECK(std::fabs(vg_h(10.0, two) - 0.9) < 0.02 * 0.9);
  CHECK_THROWS_AS(vg_h(0.0, two), DomainError);
  // One-sided limits at the origin.
  CHECK(std::fabs(vg_h_at_origin(two, true) - vg_h(1e-7, two)) < 1e-6);
  CHECK(std::fabs(vg_h_at_origin(two, false) - vg_h(-1e-7, two)) < 1e-6);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((HyperbolicParams{1.0, 1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((HyperbolicParams{0.0, 0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((HyperbolicParams{1.0, 0.0, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((VGParams{0.0, 1.0, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS((VGParams{2.0, 1.0, -1.5}.validate()), DomainError);
  CHECK_NOTHROW((VGParams{0.5, 1.0, 0.0}.validate()));
  CHECK_THROWS_AS((VGParams{0.5, 1.0, 0.0}.require_supported()), UnsupportedError);
  CHECK_THROWS_AS((TwoSidedExponential{0.3, 0.3, 1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS(StudentT(0.0), DomainError);
}

TEST_CASE("hyperbolic split") {
  const auto sym = hyperbolic_split(HyperbolicParams{1.0, 0.0, 1.0});
  CHECK(std::fabs(sym.p_plus - 0.5) < 1e-12);
  CHECK(std::fabs(sym.p_minus - 0.5) < 1e-12);
  const auto s = hyperbolic_split(HyperbolicParams{1.0, 0.5, 1.0});
  CHECK(rel(s.p_plus, 0.7917060623765228799) < 1e-11);
  CHECK(std::fabs(s.p_plus + s.p_minus - 1.0) < 1e-10);
  CHECK(s.rate_right == 0.5);
  CHECK(s.rate_left == 1.5);
}

TEST_CASE("VG split: closed form vs quadrature") {
  const VGParams cases[] = {{1.5, 1.0, 0.3}, {2.0, 2.0, 0.5}, {3.0, 1.0, -0.4}, {2.0, 1.0, 0.0}};
  for (const auto& p : cases) {
    const auto s = vg_split(p);
    const VarianceGamma d(p);
    CHECK(std::fabs(s.p_plus - upper_mass(d)) < 1e-8);
    CHECK(std::fabs(s.p_plus + s.p_minus - 1.0) < 1e-12);
  }
  CHECK(std::fabs(vg_split(VGParams{2.0, 1.0, 0.0}).p_plus - 0.5) < 1e-14);
  const auto one = vg_split(VGParams{1.0, 2.0, 0.5});
  CHECK(std::fabs(one.p_plus - (2.0 + 0.5) / 4.0) < 1e-14);
}

TEST_CASE("densities integrate to one") {
  CHECK(std::fabs(mass(StandardNormal{}) - 1.0) < 1e-11);
  CHECK(std::fabs(mass(StudentT(4.0)) - 1.0) < 1e-11);
  CHECK(std::fabs(mass(StudentT(1.0)) - 1.0) < 1e-9);
  CHECK(std::fabs(mass(Hyperbolic(HyperbolicParams{1.0, 0.5, 1.0})) - 1.0) < 1e-11);
  CHECK(std::fabs(mass(VarianceGamma(VGParams{2.0, 2.0, 0.5})) - 1.0) < 1e-10);
  CHECK(std::fabs(mass(TwoSidedExponentialDist(TwoSidedExponential{0.3, 0.7, 2.0, 0.5})) - 1.0) <
        1e-11);
}

TEST_CASE("VG lambda = 1 density is the two-sided exponential") {
  const VGParams p{1.0, 1.5, 0.5};
  const VarianceGamma vg(p);
  const auto split = vg_split(p);
  for (double x : {-2.0, -0.3, 0.2, 1.7}) {
    CHECK(rel(vg.density(x), split.density(x)) < 1e-12);
  }
}

TEST_CASE("two-sided exponential quantile") {
  const TwoSidedExponential t{0.5, 0.5, 1.0, 1.0};
  CHECK(rel(two_sided_exp_quantile(0.75, t), std::log(2.0)) < 1e-15);
  CHECK(rel(two_sided_exp_quantile(0.25, t), -std::log(2.0)) < 1e-15);
  CHECK(two_sided_exp_quantile(0.5, t) == 0.0);
  const TwoSidedExponential a{0.3, 0.7, 2.0, 0.5};
  CHECK(two_sided_exp_quantile(0.3, a) == 0.0);
  for (double u : {0.01, 0.2, 0.29, 0.31, 0.6, 0.999}) {
    CHECK(std::fabs(a.cdf(two_sided_exp_quantile(u, a)) - u) < 1e-15);
  }
  CHECK_THROWS_AS(two_sided_exp_quantile(0.0, t), DomainError);
  CHECK_THROWS_AS(two_sided_exp_quantile(1.0, t), DomainError);
}

TEST_CASE("elementary distributions") {
  const UnitExponential e;
  CHECK(e.density(-1.0) == 0.0);
  CHECK(rel(*e.cdf(1.0), 1.0 - std::exp(-1.0)) < 1e-15);
  CHECK(rel(*e.base_quantile(0.5), std::log(2.0)) < 1e-15);
  const StandardNormal n;
  CHECK(rel(n.density(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-15);
  CHECK(*n.cdf(0.0) == 0.5);
  CHECK(!StudentT(3.0).cdf(1.0).has_value());
  CHECK(n.support() == Support::full_line);
  CHECK(e.support() == Support::half_line);
}
