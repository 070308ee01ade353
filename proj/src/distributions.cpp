#include "qrecycle/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qrecycle/errors.hpp"
#include "qrecycle/quadrature.hpp"

namespace qrecycle {

double student_h(double q, double n) {
  return (1.0 + 1.0 / n) * q / (1.0 + q * q / n);
}

// ---------------------------------------------------------------------------
// Parameter blocks
// ---------------------------------------------------------------------------

double HyperbolicParams::gamma_h() const {
  return std::sqrt((alpha - beta) * (alpha + beta));
}

void HyperbolicParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("hyperbolic: alpha must be positive");
  }
  if (!(std::fabs(beta) < alpha)) {
    throw DomainError("hyperbolic: |beta| must be below alpha");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("hyperbolic: delta must be positive");
  }
}

void VGParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("variance gamma: lambda must be positive");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("variance gamma: alpha must be positive");
  }
  if (!(std::fabs(beta) < alpha)) {
    throw DomainError("variance gamma: |beta| must be below alpha");
  }
}

void VGParams::require_supported() const {
  validate();
  if (lambda < 1.0) {
    throw UnsupportedError("variance gamma: lambda < 1 (singular origin) is not supported");
  }
}

void TwoSidedExponential::validate() const {
  if (!(p_minus > 0.0 && p_minus < 1.0 && p_plus > 0.0 && p_plus < 1.0)) {
    throw DomainError("two-sided exponential: masses must lie in (0, 1)");
  }
  if (std::fabs(p_minus + p_plus - 1.0) > 1e-12) {
    throw DomainError("two-sided exponential: p_minus + p_plus must equal 1");
  }
  if (!(rate_left > 0.0) || !(rate_right > 0.0)) {
    throw DomainError("two-sided exponential: rates must be positive");
  }
}

double TwoSidedExponential::density(double x) const {
  if (x < 0.0) return p_minus * rate_left * std::exp(rate_left * x);
  return p_plus * rate_right * std::exp(-rate_right * x);
}

double TwoSidedExponential::h(double x) const {
  return x < 0.0 ? -rate_left : rate_right;
}

double TwoSidedExponential::cdf(double x) const {
  if (x < 0.0) return p_minus * std::exp(rate_left * x);
  return 1.0 - p_plus * std::exp(-rate_right * x);
}

// ---------------------------------------------------------------------------
// H-functions
// ---------------------------------------------------------------------------

double hyperbolic_h(double x, const HyperbolicParams& p) {
  return p.alpha * x / std::hypot(p.delta, x) - p.beta;
}

double vg_h(double x, const VGParams& p) {
  p.require_supported();
  if (x == 0.0) {
    throw DomainError("vg_h: H is not defined at x = 0");
  }
  if (p.lambda == 1.0) {
    return x > 0.0 ? p.alpha - p.beta : -(p.alpha + p.beta);
  }
  const double ax = p.alpha * std::fabs(x);
  // The exponential scaling cancels in the ratio.
  const double ratio =
      bessel_k_scaled(p.lambda - 1.5, ax) / bessel_k_scaled(p.lambda - 0.5, ax);
  return x > 0.0 ? p.alpha * ratio - p.beta : -p.alpha * ratio - p.beta;
}

double vg_h_at_origin(const VGParams& p, bool positive_side) {
  p.require_supported();
  if (p.lambda == 1.0) {
    return positive_side ? p.alpha - p.beta : -(p.alpha + p.beta);
  }
  // The Bessel ratio vanishes like x^{2 lambda - 2} (or x log x at 3/2).
  return -p.beta;
}

// ---------------------------------------------------------------------------
// Probability splits
// ---------------------------------------------------------------------------

TwoSidedExponential hyperbolic_split(const HyperbolicParams& p, const Accuracy& acc) {
  p.validate();
  acc.validate();
  const Hyperbolic dist(p, acc);
  auto f = [&dist](double x) { return dist.density(x); };

  const double slow_rate = p.alpha - std::fabs(p.beta);
  double extent = p.delta + 50.0 / slow_rate;
  // Tail beyond the extent is below density/rate; grow until negligible.
  for (int i = 0; i < 8; ++i) {
    const double tail = std::max(dist.density(extent), dist.density(-extent)) / slow_rate;
    if (tail < 1e-20) break;
    extent *= 2.0;
  }

  const auto plus = quad::integrate<double>(f, 0.0, extent, acc.rel_tol * 1e-2, 0.0);
  const auto minus = quad::integrate<double>(f, -extent, 0.0, acc.rel_tol * 1e-2, 0.0);
  const double total = plus.value + minus.value;
  if (std::fabs(total - 1.0) > 1e-10) {
    throw AccuracyError("hyperbolic_split: density integrates to " + std::to_string(total));
  }

  TwoSidedExponential out;
  out.p_plus = plus.value / total;
  out.p_minus = minus.value / total;
  out.rate_right = p.alpha - p.beta;
  out.rate_left = p.alpha + p.beta;
  out.validate();
  return out;
}

TwoSidedExponential vg_split(const VGParams& p, const Accuracy& acc) {
  p.require_supported();
  acc.validate();
  const double lam = p.lambda;
  const double a = p.alpha;
  const double b = p.beta;
  // Common factor 2^{2 lambda - 1} Gamma(lambda + 1/2) / (sqrt(pi) Gamma(lambda + 1)).
  const double log_common = (2.0 * lam - 1.0) * std::numbers::ln2 +
                            std::lgamma(lam + 0.5) - 0.5 * std::log(std::numbers::pi) -
                            std::lgamma(lam + 1.0);
  const double ratio = (a + b) / (a - b);
  const double plus = std::exp(log_common + lam * std::log(ratio)) *
                      hyp2f1(2.0 * lam, lam, lam + 1.0, (a + b) / (b - a), acc);
  const double minus = std::exp(log_common - lam * std::log(ratio)) *
                       hyp2f1(2.0 * lam, lam, lam + 1.0, (b - a) / (a + b), acc);
  const double total = plus + minus;
  if (std::fabs(total - 1.0) > 1e-10) {
    throw AccuracyError("vg_split: closed-form masses sum to " + std::to_string(total));
  }

  TwoSidedExponential out;
  out.p_plus = plus / total;
  out.p_minus = minus / total;
  out.rate_right = a - b;
  out.rate_left = a + b;
  out.validate();
  return out;
}

double two_sided_exp_quantile(double u, const TwoSidedExponential& t) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("two_sided_exp_quantile: u must lie in (0, 1)");
  }
  if (u < t.p_minus) return std::log(u / t.p_minus) / t.rate_left;
  if (u > t.p_minus) return -std::log((1.0 - u) / t.p_plus) / t.rate_right;
  return 0.0;
}

// ---------------------------------------------------------------------------
// Distribution instances
// ---------------------------------------------------------------------------

double StandardNormal::density(double x) const {
  return std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
}

std::optional<double> StandardNormal::cdf(double x) const { return normal_cdf(x); }

double UnitExponential::density(double x) const { return x < 0.0 ? 0.0 : std::exp(-x); }

std::optional<double> UnitExponential::cdf(double x) const {
  return x < 0.0 ? 0.0 : -std::expm1(-x);
}

std::optional<double> UnitExponential::base_quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) {
    throw DomainError("exponential quantile: u must lie in [0, 1)");
  }
  return -std::log1p(-u);
}

TwoSidedExponentialDist::TwoSidedExponentialDist(TwoSidedExponential params)
    : params_(params) {
  params_.validate();
}

std::optional<double> TwoSidedExponentialDist::base_quantile(double u) const {
  return two_sided_exp_quantile(u, params_);
}

StudentT::StudentT(double n) : n_(n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("Student t: degrees of freedom must be positive");
  }
  norm_ = 1.0 / (std::sqrt(n * std::numbers::pi) * gamma_ratio_half(n));
}

double StudentT::density(double x) const {
  return norm_ * std::pow(1.0 + x * x / n_, -0.5 * (n_ + 1.0));
}

Hyperbolic::Hyperbolic(HyperbolicParams p, const Accuracy& acc) : p_(p) {
  p_.validate();
  const double g = p_.gamma_h();
  const double dg = p_.delta * g;
  // K_1(dg) = scaled * e^{-dg}.
  log_norm_ = std::log(g) - std::log(2.0 * p_.alpha * p_.delta) -
              std::log(bessel_k_scaled(1.0, dg, acc)) + dg;
}

double Hyperbolic::density(double x) const {
  return std::exp(log_norm_ - p_.alpha * std::hypot(p_.delta, x) + p_.beta * x);
}

VarianceGamma::VarianceGamma(VGParams p, const Accuracy& acc) : p_(p), acc_(acc) {
  p_.validate();
  const double lam = p_.lambda;
  log_norm_ = lam * std::log((p_.alpha - p_.beta) * (p_.alpha + p_.beta)) -
              (lam - 0.5) * std::log(2.0 * p_.alpha) - 0.5 * std::log(std::numbers::pi) -
              std::lgamma(lam);
}

double VarianceGamma::density(double x) const {
  const double nu = p_.lambda - 0.5;
  if (x == 0.0) {
    if (nu <= 0.0) return std::numeric_limits<double>::infinity();
    // |x|^nu K_nu(alpha |x|) -> Gamma(nu) 2^{nu-1} alpha^{-nu}.
    return std::exp(log_norm_ + std::lgamma(nu) + (nu - 1.0) * std::numbers::ln2 -
                    nu * std::log(p_.alpha));
  }
  const double ax = p_.alpha * std::fabs(x);
  return std::exp(log_norm_ + p_.beta * x + nu * std::log(std::fabs(x)) +
                  std::log(bessel_k_scaled(nu, ax, acc_)) - ax);
}

}  // namespace qrecycle
