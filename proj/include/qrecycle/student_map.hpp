#pragma once

// Gaussian -> Student t(n) map v -> F_n^{-1}(Phi(v)) built from a central
// odd power series in v and a two-term tail model, glued at a crossover.

#include <array>
#include <optional>
#include <vector>

namespace qrecycle {

/// Q'(0) = sqrt(n/2) Gamma(n/2) / Gamma((n+1)/2).
double student_gamma(double n);

/// Odd-power coefficients of Q(v) = sum_k c_k v^{2k+1}.
struct StudentCentralSeries {
  double n = 4.0;
  std::vector<double> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Coefficients c_0..c_K from the exact recurrence, run in 50-digit arithmetic.
/// Throws DomainError for n <= 0 or K outside [0, 64] and OverflowError on a
/// non-finite coefficient.
StudentCentralSeries central_coefficients(double n, int K);

/// Horner evaluation in y = v^2, times v. Exactly odd in v.
double central_eval(const StudentCentralSeries& s, double v);

enum class TailTerms { one, two };

struct StudentTailModel {
  double n = 4.0;
  /// sqrt(n) [n sqrt(pi) Gamma(n/2) / Gamma((n+1)/2)]^{-1/n}.
  double d = 0.0;
  TailTerms terms = TailTerms::two;
};

StudentTailModel make_tail_model(double n, TailTerms terms = TailTerms::two);

/// Tail model t = sqrt(n) w^{-1/n} (1 - (n+1)/(2(n+2)) w^{2/n}) with
/// w = (1 - Phi(v)) n sqrt(pi) Gamma(n/2)/Gamma((n+1)/2). Negative v by odd
/// reflection. Works in logs so the deep tail does not underflow.
double tail_eval(const StudentTailModel& m, double v);

/// The eleven n = 4 central coefficients as printed in the reference listing.
extern const std::array<double, 11> kStudent4Coefficients;
inline constexpr double kStudent4Crossover = 3.93473;

/// Branch-light n = 4 map using the printed coefficients and crossover.
double student4_fast(double v);

struct StudentMapConfig {
  double n = 4.0;
  int order = 10;
  /// Unset: 3.93473 for (n = 4, K = 10), otherwise calibrated against the
  /// oracle once per (n, K) and cached.
  std::optional<double> crossover;
  TailTerms tail_terms = TailTerms::two;
};

class StudentMap {
 public:
  explicit StudentMap(const StudentMapConfig& config = {});

  double operator()(double v) const;
  double crossover() const { return crossover_; }
  const StudentCentralSeries& series() const { return series_; }
  const StudentTailModel& tail() const { return tail_; }

 private:
  StudentCentralSeries series_;
  StudentTailModel tail_;
  double crossover_;
};

/// Crossover minimising the larger of the central and tail branch errors
/// against the oracle on a coarse grid. Cached per (n, K); thread-safe.
double calibrate_crossover(double n, int order, TailTerms terms = TailTerms::two);

/// Convenience wrapper: StudentMap(config)(v). Builds the map each call, so
/// bulk users should hold a StudentMap instead.
double student_quantile_from_gaussian(double v, const StudentMapConfig& config = {});

}  // namespace qrecycle
