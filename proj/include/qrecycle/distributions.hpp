#pragma once

// Base and target distributions for quantile recycling.
//
// Each distribution exposes its density and its H-function
// H(x) = -d/dx log f(x), which is all the recycling ODE needs. CDFs and
// quantiles are provided only where they are elementary; everything else is
// the oracle's job.

#include <optional>

#include "qrecycle/special_functions.hpp"

namespace qrecycle {

enum class Support { full_line, half_line, split_at_zero };

class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual double density(double x) const = 0;
  /// -d/dx log density(x).
  virtual double h(double x) const = 0;
  virtual std::optional<double> cdf(double /*x*/) const { return std::nullopt; }
  virtual std::optional<double> base_quantile(double /*u*/) const { return std::nullopt; }
  virtual Support support() const = 0;
};

// ---------------------------------------------------------------------------
// H-functions as free functions
// ---------------------------------------------------------------------------

/// Gaussian H-function: H(v) = v.
inline double normal_h(double v) { return v; }

/// Unit exponential H-function: H(v) = 1.
inline double exponential_h(double /*v*/) { return 1.0; }

/// Student t(n): (1 + 1/n) q / (1 + q^2/n).
double student_h(double q, double n);

struct HyperbolicParams {
  double alpha = 1.0;
  double beta = 0.0;
  double delta = 1.0;

  /// sqrt(alpha^2 - beta^2).
  double gamma_h() const;
  /// Throws DomainError unless alpha > 0, |beta| < alpha, delta > 0.
  void validate() const;
};

struct VGParams {
  double lambda = 1.0;
  double alpha = 1.0;
  double beta = 0.0;

  /// Throws DomainError unless lambda > 0, alpha > 0, |beta| < alpha.
  void validate() const;
  /// validate() plus UnsupportedError for lambda < 1.
  void require_supported() const;
};

/// Two-sided exponential base with mass p_minus on x < 0 and p_plus on x > 0.
struct TwoSidedExponential {
  double p_minus = 0.5;
  double p_plus = 0.5;
  double rate_right = 1.0;  // alpha - beta
  double rate_left = 1.0;   // alpha + beta

  void validate() const;
  double density(double x) const;
  double h(double x) const;
  double cdf(double x) const;
};

/// H(x) = alpha x / sqrt(delta^2 + x^2) - beta.
double hyperbolic_h(double x, const HyperbolicParams& p);

/// Bessel-ratio H-function of the variance gamma law. x must be non-zero
/// and lambda >= 1; at lambda = 1 returns the exact constants alpha - beta
/// (x > 0) and -(alpha + beta) (x < 0).
double vg_h(double x, const VGParams& p);

/// One-sided limit of vg_h at 0 from the side given by `positive_side`.
double vg_h_at_origin(const VGParams& p, bool positive_side);

/// Positive/negative masses of the hyperbolic law by adaptive quadrature.
TwoSidedExponential hyperbolic_split(const HyperbolicParams& p, const Accuracy& acc = {});

/// Positive/negative masses of the VG law from the 2F1 closed forms.
TwoSidedExponential vg_split(const VGParams& p, const Accuracy& acc = {});

/// Inverse CDF of the two-sided exponential.
double two_sided_exp_quantile(double u, const TwoSidedExponential& t);

// ---------------------------------------------------------------------------
// Distribution instances
// ---------------------------------------------------------------------------

class StandardNormal final : public Distribution {
 public:
  double density(double x) const override;
  double h(double x) const override { return normal_h(x); }
  std::optional<double> cdf(double x) const override;
  Support support() const override { return Support::full_line; }
};

class UnitExponential final : public Distribution {
 public:
  double density(double x) const override;
  double h(double x) const override { return exponential_h(x); }
  std::optional<double> cdf(double x) const override;
  std::optional<double> base_quantile(double u) const override;
  Support support() const override { return Support::half_line; }
};

class TwoSidedExponentialDist final : public Distribution {
 public:
  explicit TwoSidedExponentialDist(TwoSidedExponential params);

  double density(double x) const override { return params_.density(x); }
  double h(double x) const override { return params_.h(x); }
  std::optional<double> cdf(double x) const override { return params_.cdf(x); }
  std::optional<double> base_quantile(double u) const override;
  Support support() const override { return Support::split_at_zero; }
  const TwoSidedExponential& params() const { return params_; }

 private:
  TwoSidedExponential params_;
};

class StudentT final : public Distribution {
 public:
  explicit StudentT(double n);

  double density(double x) const override;
  double h(double x) const override { return student_h(x, n_); }
  Support support() const override { return Support::full_line; }
  double dof() const { return n_; }

 private:
  double n_;
  double norm_;
};

class Hyperbolic final : public Distribution {
 public:
  explicit Hyperbolic(HyperbolicParams p, const Accuracy& acc = {});

  double density(double x) const override;
  double h(double x) const override { return hyperbolic_h(x, p_); }
  Support support() const override { return Support::full_line; }
  const HyperbolicParams& params() const { return p_; }
  /// log of gamma / (2 alpha delta K_1(delta gamma)), computed via scaled K_1.
  double log_norm() const { return log_norm_; }

 private:
  HyperbolicParams p_;
  double log_norm_;
};

class VarianceGamma final : public Distribution {
 public:
  explicit VarianceGamma(VGParams p, const Accuracy& acc = {});

  /// Density; at x = 0 the finite limit for lambda > 1/2, +inf otherwise.
  double density(double x) const override;
  double h(double x) const override { return vg_h(x, p_); }
  Support support() const override { return Support::full_line; }
  const VGParams& params() const { return p_; }

 private:
  VGParams p_;
  Accuracy acc_;
  double log_norm_;
};

}  // namespace qrecycle
