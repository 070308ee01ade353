#include "qrecycle/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qrecycle/errors.hpp"

namespace qrecycle {

void Accuracy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-6)) {
    throw DomainError("Accuracy: rel_tol must lie in (0, 1e-6]");
  }
  if (max_terms < 16) {
    throw DomainError("Accuracy: max_terms must be at least 16");
  }
}

// ---------------------------------------------------------------------------
// Gamma ratio
// ---------------------------------------------------------------------------

namespace {

// Above this half-argument the Stirling route is used. Below it tgammal is
// exact to a few ulps of long double and cannot overflow.
constexpr long double kStirlingThreshold = 20.0L;

// B_{2k} / (2k (2k-1)) for k = 1..8.
constexpr std::array<long double, 8> kStirlingCoeffs = {
    1.0L / 12.0L,        -1.0L / 360.0L,       1.0L / 1260.0L,
    -1.0L / 1680.0L,     1.0L / 1188.0L,       -691.0L / 360360.0L,
    1.0L / 156.0L,       -3617.0L / 122400.0L,
};

long double stirling_tail(long double y) {
  const long double inv = 1.0L / y;
  const long double inv2 = inv * inv;
  long double sum = 0.0L;
  long double power = inv;
  for (long double c : kStirlingCoeffs) {
    sum += c * power;
    power *= inv2;
  }
  return sum;
}

// 1/2 - x log(1 + 1/(2x)) summed as sum_{k>=2} (-1)^k h^{k-1} / (2k), h = 1/(2x).
long double half_minus_xlog1p(long double x) {
  const long double h = 0.5L / x;
  long double sum = 0.0L;
  long double power = h;
  for (int k = 2; k < 60; ++k) {
    const long double term = power / (2.0L * k);
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-22L * std::fabs(sum)) break;
    power *= h;
  }
  return sum;
}

}  // namespace

long double gamma_ratio_half_ld(long double n) {
  if (!(n > 0.0L) || !std::isfinite(n)) {
    throw DomainError("gamma_ratio_half: n must be positive and finite, got " +
                      std::to_string(static_cast<double>(n)));
  }
  const long double x = 0.5L * n;
  if (x <= kStirlingThreshold) {
    return std::tgamma(x) / std::tgamma(x + 0.5L);
  }
  // log[Gamma(x)/Gamma(x+1/2)] = -1/2 log x + [1/2 - x log1p(1/(2x))]
  //                              + s(x) - s(x+1/2),
  // with s the Stirling correction series. Every bracket is O(1/x).
  const long double log_ratio = -0.5L * std::log(x) + half_minus_xlog1p(x) +
                                stirling_tail(x) - stirling_tail(x + 0.5L);
  return std::exp(log_ratio);
}

double gamma_ratio_half(double n) {
  return static_cast<double>(gamma_ratio_half_ld(static_cast<long double>(n)));
}

// ---------------------------------------------------------------------------
// Modified Bessel K
// ---------------------------------------------------------------------------

namespace {

constexpr long double kEulerGamma = 0.57721566490153286060651209008240243L;

struct Gam12 {
  long double gam1;  // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  long double gam2;  // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  long double gampl; // 1/Gamma(1+mu)
  long double gammi; // 1/Gamma(1-mu)
};

Gam12 temme_gammas(long double mu) {
  Gam12 g{};
  g.gampl = 1.0L / std::tgamma(1.0L + mu);
  g.gammi = 1.0L / std::tgamma(1.0L - mu);
  g.gam2 = 0.5L * (g.gammi + g.gampl);
  if (std::fabs(mu) < 1e-3L) {
    // Taylor coefficients of 1/Gamma(1+z).
    const long double mu2 = mu * mu;
    g.gam1 = -(kEulerGamma - 0.0420026350340952355L * mu2 -
               0.0421977345555443367L * mu2 * mu2);
  } else {
    g.gam1 = (g.gammi - g.gampl) / (2.0L * mu);
  }
  return g;
}

struct KPair {
  long double k_nu;
  long double k_nu1;
};

// Returns e^x K_nu(x), e^x K_{nu+1}(x) for nu >= 0, x > 0 (Temme's method).
KPair bessel_k_scaled_pair(long double nu, long double x, int max_terms) {
  constexpr long double eps = std::numeric_limits<long double>::epsilon();
  constexpr long double pi = std::numbers::pi_v<long double>;

  const int nl = static_cast<int>(nu + 0.5L);
  const long double mu = nu - nl;
  const long double mu2 = mu * mu;
  const long double xi = 1.0L / x;
  const long double xi2 = 2.0L * xi;

  long double kmu = 0.0L;
  long double k1 = 0.0L;

  if (x < 2.0L) {
    // Temme's series.
    const long double x2 = 0.5L * x;
    const long double pimu = pi * mu;
    const long double fact = std::fabs(pimu) < eps ? 1.0L : pimu / std::sin(pimu);
    long double d = -std::log(x2);
    long double e = mu * d;
    const long double fact2 = std::fabs(e) < eps ? 1.0L : std::sinh(e) / e;
    const Gam12 g = temme_gammas(mu);
    long double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    long double sum = ff;
    e = std::exp(e);
    long double p = 0.5L * e / g.gampl;
    long double q = 0.5L / (e * g.gammi);
    long double c = 1.0L;
    d = x2 * x2;
    long double sum1 = p;
    int i = 1;
    for (; i <= max_terms; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const long double del = c * ff;
      sum += del;
      const long double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    if (i > max_terms) {
      throw AccuracyError("bessel_k: Temme series did not converge");
    }
    const long double scale = std::exp(x);
    kmu = sum * scale;
    k1 = sum1 * xi2 * scale;
  } else {
    // Steed's continued fraction (Temme's CF2 form).
    long double b = 2.0L * (1.0L + x);
    long double d = 1.0L / b;
    long double h = d;
    long double delh = d;
    long double q1 = 0.0L;
    long double q2 = 1.0L;
    const long double a1 = 0.25L - mu2;
    long double q = a1;
    long double c = a1;
    long double a = -a1;
    long double s = 1.0L + q * delh;
    int i = 1;
    for (; i <= max_terms; ++i) {
      a -= 2 * i;
      c = -a * c / (i + 1.0L);
      const long double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0L;
      d = 1.0L / (b + a * d);
      delh = (b * d - 1.0L) * delh;
      h += delh;
      const long double dels = q * delh;
      s += dels;
      if (std::fabs(dels / s) < eps) break;
    }
    if (i > max_terms) {
      throw AccuracyError("bessel_k: continued fraction did not converge");
    }
    h = a1 * h;
    kmu = std::sqrt(pi / (2.0L * x)) / s;
    k1 = kmu * (mu + x + 0.5L - h) * xi;
  }

  // Forward recurrence K_{m+1} = (2m/x) K_m + K_{m-1}; stable upward.
  for (int i = 1; i <= nl; ++i) {
    const long double next = (mu + i) * xi2 * k1 + kmu;
    kmu = k1;
    k1 = next;
  }
  return {kmu, k1};
}

void check_bessel_args(double nu, double x, const Accuracy& acc) {
  acc.validate();
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("bessel_k: x must be positive and finite");
  }
  if (!std::isfinite(nu)) {
    throw DomainError("bessel_k: order must be finite");
  }
}

}  // namespace

double bessel_k_scaled(double nu, double x, const Accuracy& acc) {
  check_bessel_args(nu, x, acc);
  const KPair k = bessel_k_scaled_pair(std::fabs(static_cast<long double>(nu)), x,
                                       acc.max_terms);
  const double result = static_cast<double>(k.k_nu);
  if (!std::isfinite(result)) {
    throw OverflowError("bessel_k: result overflows");
  }
  return result;
}

double bessel_k(double nu, double x, const Accuracy& acc) {
  check_bessel_args(nu, x, acc);
  const KPair k = bessel_k_scaled_pair(std::fabs(static_cast<long double>(nu)), x,
                                       acc.max_terms);
  const long double value = k.k_nu * std::exp(-static_cast<long double>(x));
  const double result = static_cast<double>(value);
  if (!std::isfinite(result)) {
    throw OverflowError("bessel_k: result overflows");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric 2F1
// ---------------------------------------------------------------------------

namespace {

bool is_nonpositive_integer(double c) {
  return c <= 0.0 && c == std::floor(c);
}

// Plain Gauss series for 0 <= z < 1.
long double gauss_series(long double a, long double b, long double c, long double z,
                         const Accuracy& acc) {
  constexpr long double eps = std::numeric_limits<long double>::epsilon();
  long double sum = 1.0L;
  long double term = 1.0L;
  for (int k = 0; k < acc.max_terms; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0L)) * z;
    sum += term;
    if (term == 0.0L) return sum;
    if (std::fabs(term) <= eps * std::fabs(sum)) return sum;
  }
  if (std::fabs(term) > acc.rel_tol * std::fabs(sum)) {
    throw AccuracyError("hyp2f1: series did not reach rel_tol within max_terms");
  }
  return sum;
}

}  // namespace

double hyp2f1(double a, double b, double c, double z, const Accuracy& acc) {
  acc.validate();
  if (is_nonpositive_integer(c)) {
    throw DomainError("hyp2f1: c must not be a non-positive integer");
  }
  if (!(z < 1.0) || !std::isfinite(z)) {
    throw DomainError("hyp2f1: z must be finite and below 1");
  }
  if (z == 0.0) return 1.0;

  long double result = 0.0L;
  if (z > 0.0) {
    result = gauss_series(a, b, c, z, acc);
  } else {
    // Pfaff: 2F1(a,b;c;z) = (1-z)^{-b} 2F1(c-a, b; c; z/(z-1))
    //                     = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1)).
    // Pick the form whose terms decay faster (smaller a'+b'-c').
    const long double w = static_cast<long double>(z) / (static_cast<long double>(z) - 1.0L);
    const long double one_minus_z = 1.0L - static_cast<long double>(z);
    if (a >= b) {
      result = std::pow(one_minus_z, -static_cast<long double>(b)) *
               gauss_series(static_cast<long double>(c) - a, b, c, w, acc);
    } else {
      result = std::pow(one_minus_z, -static_cast<long double>(a)) *
               gauss_series(a, static_cast<long double>(c) - b, c, w, acc);
    }
  }
  const double out = static_cast<double>(result);
  if (!std::isfinite(out)) {
    throw AccuracyError("hyp2f1: non-finite result");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complementary error function (Cody's rational Chebyshev approximations)
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 5> kErfA = {
    3.16112374387056560e00, 1.13864154151050156e02, 3.77485237685302021e02,
    3.20937758913846947e03, 1.85777706184603153e-1};
constexpr std::array<double, 4> kErfB = {
    2.36012909523441209e01, 2.44024637934444173e02, 1.28261652607737228e03,
    2.84423683343917062e03};
constexpr std::array<double, 9> kErfcC = {
    5.64188496988670089e-1, 8.88314979438837594e00, 6.61191906371416295e01,
    2.98635138197400131e02, 8.81952221241769090e02, 1.71204761263407058e03,
    2.05107837782607147e03, 1.23033935479799725e03, 2.15311535474403846e-8};
constexpr std::array<double, 8> kErfcD = {
    1.57449261107098347e01, 1.17693950891312499e02, 5.37181101862009858e02,
    1.62138957456669019e03, 3.29079923573345963e03, 4.36261909014324716e03,
    3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kErfcP = {
    3.05326634961232344e-1, 3.60344899949804439e-1, 1.25781726111229246e-1,
    1.60837851487422766e-2, 6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kErfcQ = {
    2.56852019228982242e00, 1.87295284992346047e00, 5.27905102951428412e-1,
    6.05183413124413191e-2, 2.33520497626869185e-3};

constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kErfcUnderflow = 26.543;

// exp(-y^2 * scale) with y split so the leading square is exact.
double exp_minus_square(double y, double scale = 1.0) {
  const double yh = std::trunc(y * 16.0) / 16.0;
  const double del = (y - yh) * (y + yh);
  return std::exp(-yh * yh * scale) * std::exp(-del * scale);
}

// erf(y) for 0 <= y <= 0.46875.
double erf_small(double y) {
  const double ysq = y > 1.11e-16 ? y * y : 0.0;
  double xnum = kErfA[4] * ysq;
  double xden = ysq;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + kErfA[i]) * ysq;
    xden = (xden + kErfB[i]) * ysq;
  }
  return y * (xnum + kErfA[3]) / (xden + kErfB[3]);
}

// erfc(y) * exp(y^2) for y > 0.46875.
double erfc_scaled_large(double y) {
  if (y <= 4.0) {
    double xnum = kErfcC[8] * y;
    double xden = y;
    for (int i = 0; i < 7; ++i) {
      xnum = (xnum + kErfcC[i]) * y;
      xden = (xden + kErfcD[i]) * y;
    }
    return (xnum + kErfcC[7]) / (xden + kErfcD[7]);
  }
  const double ysq = 1.0 / (y * y);
  double xnum = kErfcP[5] * ysq;
  double xden = ysq;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + kErfcP[i]) * ysq;
    xden = (xden + kErfcQ[i]) * ysq;
  }
  const double r = ysq * (xnum + kErfcP[4]) / (xden + kErfcQ[4]);
  return (kInvSqrtPi - r) / y;
}

constexpr double kErfSplit = 0.46875;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// erfc(y) for y >= 0.
double erfc_nonneg(double y) {
  if (y <= kErfSplit) return 1.0 - erf_small(y);
  if (y >= kErfcUnderflow) return 0.0;
  return exp_minus_square(y) * erfc_scaled_large(y);
}

// 2 * (1 - Phi(v)) for v >= 0. The Gaussian factor is formed from v itself so
// that rounding in v/sqrt(2) does not get amplified by exp(-v^2/2).
double twice_normal_tail_nonneg(double v) {
  const double y = v * kInvSqrt2;
  if (y <= kErfSplit) return 1.0 - erf_small(y);
  if (y >= kErfcUnderflow) return 0.0;
  return exp_minus_square(v, 0.5) * erfc_scaled_large(y);
}

}  // namespace

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x >= 0.0) return erfc_nonneg(x);
  return 2.0 - erfc_nonneg(-x);
}

double normal_upper_tail(double v) {
  if (std::isnan(v)) return v;
  if (v >= 0.0) return 0.5 * twice_normal_tail_nonneg(v);
  return 0.5 * (2.0 - twice_normal_tail_nonneg(-v));
}

double normal_cdf(double v) { return normal_upper_tail(-v); }

double log_normal_upper_tail(double v) {
  if (std::isnan(v)) return v;
  const double y = v * kInvSqrt2;
  if (y <= kErfSplit) return std::log(normal_upper_tail(v));
  return -0.5 * v * v + std::log(0.5 * erfc_scaled_large(y));
}

}  // namespace qrecycle
