#pragma once

// Reference quantiles for accuracy tests.
//
// Independent of every kernel under test: the normal oracle works in long
// double on std::erfcl / std::erfl, the Student oracle uses the exact
// n = 1, 2, 4 quantiles or long-double quadrature of the density, and the
// generic oracle inverts a quadrature CDF.

#include "qrecycle/distributions.hpp"

namespace qrecycle {

struct OracleConfig {
  /// Target accuracy on the probability scale, relative to the probability
  /// being matched (min(u, 1-u) or the supplied tail mass).
  double abs_tol = 1e-16;
  int max_iter = 200;
  double quad_tol = 1e-12;

  void validate() const;
};

/// Phi^{-1}(u) for 0 < u < 1.
double oracle_normal_quantile(double u, const OracleConfig& cfg = {});

/// Phi^{-1}(1 - q): the upper quantile for a small tail mass q, without
/// forming 1 - q.
double oracle_normal_upper_quantile(double q, const OracleConfig& cfg = {});

/// Phi^{-1}(1 - e^{-v}/2) for v >= 0: the exact exponential-coordinate map.
double oracle_normal_from_exponential(double v, const OracleConfig& cfg = {});

/// Long-double core: z <= 0 with Phi(z) = exp(log_p), log_p <= log(1/2).
long double oracle_normal_lower_from_log(long double log_p, const OracleConfig& cfg = {});

/// Phi^{-1}(u) by the inverse-error-function power series. Converges on all
/// of (0, 1) but is only cheap near the centre; used to cross-check.
double probit_series(double u);

/// Student t(n) quantile. Closed forms for n = 1, 2, 4, quadrature otherwise.
double oracle_student_quantile(double u, double n, const OracleConfig& cfg = {});

/// Student t(n) quantile by quadrature inversion for any n (no closed forms).
double oracle_student_quantile_quadrature(double u, double n, const OracleConfig& cfg = {});

/// F_n^{-1}(Phi(v)) with both probabilities kept in tail-precise form.
double oracle_student_from_gaussian(double v, double n, const OracleConfig& cfg = {});

/// Student CDF by quadrature, long double.
double oracle_student_cdf(double t, double n, const OracleConfig& cfg = {});

/// Inverse CDF of an arbitrary density by quadrature from the anchor x = 0
/// plus safeguarded Newton. Throws OracleFailure when the bracket would have
/// to grow beyond 1e3.
double oracle_cdf_inverse(const Distribution& dist, double u, const OracleConfig& cfg = {});

/// Tail-precise variant: solves P(X > x) = mass (upper) or P(X < x) = mass.
double oracle_cdf_inverse_tail(const Distribution& dist, double mass, bool upper,
                               const OracleConfig& cfg = {});

}  // namespace qrecycle
