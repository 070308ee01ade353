#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qrecycle/errors.hpp"
#include "qrecycle/quadrature.hpp"
#include "qrecycle/special_functions.hpp"

using namespace qrecycle;
using doctest::Approx;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("Accuracy validation") {
  CHECK_NOTHROW(Accuracy{}.validate());
  CHECK_THROWS_AS((Accuracy{0.0, 500}.validate()), DomainError);
  CHECK_THROWS_AS((Accuracy{1e-3, 500}.validate()), DomainError);
  CHECK_THROWS_AS((Accuracy{1e-12, 8}.validate()), DomainError);
}

TEST_CASE("gamma_ratio_half") {
  CHECK(rel(gamma_ratio_half(4.0), 4.0 / (3.0 * std::sqrt(std::numbers::pi))) < 1e-15);
  CHECK(rel(gamma_ratio_half(1.0), std::sqrt(std::numbers::pi)) < 1e-15);
  CHECK(rel(gamma_ratio_half(100.0), 0.1417753460315585492) < 1e-14);
  // Large n: sqrt(n/2) * ratio = 1 + 1/(4n) + ...
  const double n = 1e6;
  CHECK(std::fabs(std::sqrt(n / 2) * gamma_ratio_half(n) - 1.0 - 2.5e-7) < 1e-12);
  CHECK_THROWS_AS(gamma_ratio_half(0.0), DomainError);
  CHECK_THROWS_AS(gamma_ratio_half(-1.0), DomainError);
}

TEST_CASE("bessel_k values") {
  const double pi = std::numbers::pi;
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(pi / 2) * std::exp(-1.0)) < 1e-13);
  CHECK(rel(bessel_k(1.0, 1.0), 0.60190723019723457474) < 1e-13);
  CHECK(rel(bessel_k(1.5, 2.0), std::sqrt(pi / 4) * std::exp(-2.0) * 1.5) < 1e-13);
  CHECK(rel(bessel_k(1.5, 2.0), 0.17990665795209217105) < 1e-13);
  CHECK(rel(bessel_k(2.3, 0.7), 5.9759617612105811462) < 1e-12);
  CHECK(rel(bessel_k(0.0, 5.0), 0.0036910983340425942747) < 1e-12);
  CHECK(rel(bessel_k(3.0, 30.0), 2.4713310636589929359e-14) < 1e-12);
}

TEST_CASE("bessel_k properties") {
  for (double x : {0.1, 0.9, 2.0, 7.5, 25.0}) {
    CHECK(rel(bessel_k(-1.3, x), bessel_k(1.3, x)) < 1e-14);
    CHECK(rel(bessel_k_scaled(1.0, x), std::exp(x) * bessel_k(1.0, x)) < 1e-12);
    // K_{3/2} closed form everywhere tested.
    const double k32 = std::sqrt(std::numbers::pi / (2 * x)) * std::exp(-x) * (1 + 1 / x);
    CHECK(rel(bessel_k(1.5, x), k32) < 1e-12);
  }
  // Scaled variant stays finite where K underflows.
  CHECK(std::isfinite(bessel_k_scaled(1.0, 800.0)));
  CHECK(bessel_k_scaled(1.0, 800.0) > 0.0);
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(1.0, -2.0), DomainError);
}

TEST_CASE("hyp2f1") {
  CHECK(rel(hyp2f1(1, 1, 2, 0.5), 2 * std::log(2.0)) < 1e-14);
  CHECK(rel(hyp2f1(4, 2, 3, -0.6), 0.29296875000000001039) < 1e-13);
  CHECK(rel(hyp2f1(0.5, 1.5, 2.5, 0.9), 1.6673034691845802148) < 1e-11);
  CHECK(hyp2f1(1.5, 2.5, 3.0, 0.0) == 1.0);
  // z <= -1 goes through the Pfaff transformation.
  CHECK(rel(hyp2f1(1, 1, 2, -3.0), std::log(4.0) / 3.0) < 1e-13);
  CHECK_THROWS_AS(hyp2f1(1, 1, 0, 0.5), DomainError);
  CHECK_THROWS_AS(hyp2f1(1, 1, -2, 0.5), DomainError);
  CHECK_THROWS_AS(hyp2f1(1, 1, 2, 1.0), DomainError);
}

TEST_CASE("erfc and normal tails") {
  CHECK(rel(qrecycle::erfc(1.0), 0.15729920705028513066) < 1e-15);
  CHECK(rel(qrecycle::erfc(5.0), 1.5374597944280348502e-12) < 1e-15);
  CHECK(rel(qrecycle::erfc(-1.0), 1.8427007929497148693) < 1e-15);
  CHECK(rel(qrecycle::erfc(0.3), 0.67137324054087258381) < 1e-15);
  CHECK(rel(qrecycle::erfc(26.0), 5.6631924088561428465e-296) < 1e-14);
  CHECK(qrecycle::erfc(0.0) == 1.0);
  CHECK(qrecycle::erfc(30.0) == 0.0);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(rel(normal_upper_tail(2.0), 0.5 * std::erfc(std::sqrt(2.0))) < 1e-15);
  CHECK(rel(log_normal_upper_tail(40.0), -804.60844201375378817) < 1e-15);
  CHECK(rel(log_normal_upper_tail(1.0), std::log(normal_upper_tail(1.0))) < 1e-15);
  for (double x = -6; x <= 26.5; x += 0.37) {
    CHECK(rel(qrecycle::erfc(x), std::erfc(x)) < 1e-15);
  }
}

TEST_CASE("quadrature") {
  const auto r = quad::integrate<double>([](double x) { return std::exp(-x * x); }, -1.0, 2.0,
                                         1e-13);
  CHECK(rel(r.value, 0.5 * std::sqrt(std::numbers::pi) * (std::erf(2.0) + std::erf(1.0))) <
        1e-13);
  const auto u = quad::integrate_upper<double>([](double x) { return std::exp(-x); }, 1.0,
                                               1e-13);
  CHECK(rel(u.value, std::exp(-1.0)) < 1e-12);
  const auto l = quad::integrate_lower<long double>(
      [](long double x) { return 1.0L / (1.0L + x * x); }, 0.0L, 1e-15L);
  CHECK(std::fabs(static_cast<double>(l.value) - std::numbers::pi / 2) < 1e-13);
  CHECK(quad::integrate<double>([](double) { return 1.0; }, 3.0, 3.0, 1e-12).value == 0.0);
}
