#pragma once

// Numerical solution of the recycling ODE
//
//     Q'' + Hb(v) Q' = Ht(Q) (Q')^2
//
// where Hb is the H-function of the base distribution and Ht that of the
// target. The solution Q maps base samples v to target samples Q(v).

#include <functional>
#include <span>
#include <vector>

#include "qrecycle/distributions.hpp"

namespace qrecycle {

/// H-functions are evaluated in long double. Gaussian-base solves amplify a
/// perturbation of size eps near v by roughly 1/f(Q(v)), so double rounding
/// alone would cost ~1e-8 at |v| = 6. Plain double callables convert fine.
using HFunction = std::function<long double(long double)>;

enum class Direction { left, right };
enum class RkOrder { rk4, rk6 };

/// One half-line initial value problem for the recycling ODE.
struct RecyclingProblem {
  HFunction base_h;
  HFunction target_h;
  double v0 = 0.0;
  double q0 = 0.0;
  long double slope0 = 1.0L;
  Direction direction = Direction::right;
  /// Length of the solve interval measured from v0.
  double v_max = 1.0;

  void validate() const;
};

/// Piecewise cubic Hermite interpolant through solver nodes (v, Q, Q').
class QuantileMap {
 public:
  QuantileMap() = default;
  /// Throws MonotonicityError if v or q is not strictly increasing, or if an
  /// interval's Hermite cubic would fail the Fritsch-Carlson monotonicity test.
  QuantileMap(std::vector<double> v, std::vector<double> q, std::vector<double> dq);

  /// Evaluates the interpolant. v must lie inside [v_min(), v_max()].
  double operator()(double v) const;
  double derivative(double v) const;

  double v_min() const { return v_.front(); }
  double v_max() const { return v_.back(); }
  std::span<const double> grid_v() const { return v_; }
  std::span<const double> grid_q() const { return q_; }
  std::span<const double> grid_dq() const { return dq_; }
  bool empty() const { return v_.empty(); }

 private:
  std::size_t interval(double v) const;

  std::vector<double> v_;
  std::vector<double> q_;
  std::vector<double> dq_;
};

/// Left and right half-maps glued at the origin. Q' may jump at v = 0.
struct TwoSidedQuantileMap {
  QuantileMap left;
  QuantileMap right;

  double operator()(double v) const { return v < 0.0 ? left(v) : right(v); }
  double v_min() const { return left.v_min(); }
  double v_max() const { return right.v_max(); }
};

struct ProblemPair {
  RecyclingProblem left;
  RecyclingProblem right;
};

/// Second derivative Q'' = Ht(q) qp^2 - Hb(v) qp.
long double rode_rhs(long double v, long double q, long double qp, const HFunction& base_h,
                     const HFunction& target_h);

/// Fixed-step explicit Runge-Kutta solve. The step is shrunk slightly so the
/// grid lands exactly on the end of the interval.
///
/// Throws MonotonicityError when Q' <= 0 and OverflowError on non-finite
/// state or |Q| > 1e12.
QuantileMap solve_rode(const RecyclingProblem& problem, double step = 1e-3,
                       RkOrder order = RkOrder::rk6);

TwoSidedQuantileMap solve_two_sided(const ProblemPair& problems, double step = 1e-3,
                                    RkOrder order = RkOrder::rk6);

/// Exponential -> hyperbolic, two-sided exponential base with the given split.
ProblemPair build_hyperbolic_problems(const HyperbolicParams& p,
                                      const TwoSidedExponential& split, double v_max = 10.0);

/// Exponential -> variance gamma (lambda >= 1).
ProblemPair build_vg_problems(const VGParams& p, const TwoSidedExponential& split,
                              double v_max = 10.0);

/// Gaussian -> Student t(n), both halves starting at Q(0) = 0, Q'(0) = gamma(n).
ProblemPair build_gaussian_student_problems(double n, double v_max = 6.0);

/// Symmetric exponential (Laplace) -> standard normal, Q'(0) = sqrt(pi/2).
ProblemPair build_exponential_normal_problems(double v_max = 10.0);

/// Gaussian -> Gaussian; the exact solution is Q(v) = v.
ProblemPair build_gaussian_identity_problems(double v_max = 6.0);

}  // namespace qrecycle
