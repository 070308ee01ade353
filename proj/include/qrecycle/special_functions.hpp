#pragma once

// Special functions used by the distribution, ODE and oracle layers.
//
// Everything here is a pure function of its arguments and may be called
// concurrently from any number of threads.

namespace qrecycle {

/// Tolerance settings for iterative special-function evaluation.
struct Accuracy {
  double rel_tol = 1e-12;
  int max_terms = 500;

  /// Throws DomainError unless rel_tol is in (0, 1e-6] and max_terms >= 16.
  void validate() const;
};

/// Gamma(n/2) / Gamma((n+1)/2) for n > 0, without overflow for large n.
double gamma_ratio_half(double n);

/// Extended-precision variant of gamma_ratio_half, used by series generation.
long double gamma_ratio_half_ld(long double n);

/// Modified Bessel function of the second kind K_nu(x), real order, x > 0.
double bessel_k(double nu, double x, const Accuracy& acc = {});

/// Exponentially scaled e^x K_nu(x); finite where K_nu itself underflows.
double bessel_k_scaled(double nu, double x, const Accuracy& acc = {});

/// Gauss hypergeometric 2F1(a, b; c; z) for real z < 1.
///
/// Negative arguments go through the Pfaff transformation z -> z/(z-1), so
/// z <= -1 is accepted as well; the series itself is only ever summed on
/// [0, 1). Throws DomainError for c in {0, -1, -2, ...} or z >= 1 and
/// AccuracyError when max_terms are exhausted above rel_tol.
double hyp2f1(double a, double b, double c, double z, const Accuracy& acc = {});

/// Complementary error function, relative error about 1e-16 wherever the
/// result is a normal double.
double erfc(double x);

/// Upper Gaussian tail 1 - Phi(v), computed as erfc(v / sqrt 2) / 2.
double normal_upper_tail(double v);

/// Gaussian CDF Phi(v).
double normal_cdf(double v);

/// log(1 - Phi(v)); stays finite long after the tail itself underflows.
double log_normal_upper_tail(double v);

}  // namespace qrecycle
