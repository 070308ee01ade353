#include "qrecycle/recycling_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qrecycle/errors.hpp"

namespace qrecycle {

void RecyclingProblem::validate() const {
  if (!base_h || !target_h) {
    throw DomainError("RecyclingProblem: base and target H-functions are required");
  }
  if (!(slope0 > 0.0) || !std::isfinite(slope0)) {
    throw DomainError("RecyclingProblem: initial slope must be positive");
  }
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw DomainError("RecyclingProblem: v_max must be positive");
  }
  if (!std::isfinite(v0) || !std::isfinite(q0)) {
    throw DomainError("RecyclingProblem: initial point must be finite");
  }
}

// ---------------------------------------------------------------------------
// QuantileMap
// ---------------------------------------------------------------------------

QuantileMap::QuantileMap(std::vector<double> v, std::vector<double> q, std::vector<double> dq)
    : v_(std::move(v)), q_(std::move(q)), dq_(std::move(dq)) {
  if (v_.size() < 2 || q_.size() != v_.size() || dq_.size() != v_.size()) {
    throw DomainError("QuantileMap: need at least two nodes with matching arrays");
  }
  for (std::size_t i = 0; i + 1 < v_.size(); ++i) {
    if (!(v_[i + 1] > v_[i])) {
      throw DomainError("QuantileMap: grid_v must be strictly increasing");
    }
    if (!(q_[i + 1] > q_[i])) {
      throw MonotonicityError("QuantileMap: grid_q is not strictly increasing at v = " +
                              std::to_string(v_[i]));
    }
    // Fritsch-Carlson: alpha^2 + beta^2 <= 9 keeps the cubic monotone.
    const double secant = (q_[i + 1] - q_[i]) / (v_[i + 1] - v_[i]);
    const double a = dq_[i] / secant;
    const double b = dq_[i + 1] / secant;
    if (a < 0.0 || b < 0.0 || a * a + b * b > 9.0) {
      throw MonotonicityError("QuantileMap: Hermite interval not monotone at v = " +
                              std::to_string(v_[i]));
    }
  }
}

std::size_t QuantileMap::interval(double v) const {
  const double span = v_.back() - v_.front();
  const double slack = 1e-12 * std::max(1.0, span);
  if (!(v >= v_.front() - slack && v <= v_.back() + slack)) {
    throw DomainError("QuantileMap: v = " + std::to_string(v) + " outside [" +
                      std::to_string(v_.front()) + ", " + std::to_string(v_.back()) + "]");
  }
  const auto it = std::upper_bound(v_.begin(), v_.end(), v);
  std::size_t i = static_cast<std::size_t>(it - v_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, v_.size() - 2);
}

double QuantileMap::operator()(double v) const {
  const std::size_t i = interval(v);
  const double h = v_[i + 1] - v_[i];
  // Factored Hermite basis in t and s = 1 - t: no cancellation next to a node.
  const double t = (v - v_[i]) / h;
  const double s = (v_[i + 1] - v) / h;
  const double h00 = (1.0 + 2.0 * t) * s * s;
  const double h01 = (1.0 + 2.0 * s) * t * t;
  const double h10 = t * s * s;
  const double h11 = -t * t * s;
  return h00 * q_[i] + h10 * h * dq_[i] + h01 * q_[i + 1] + h11 * h * dq_[i + 1];
}

double QuantileMap::derivative(double v) const {
  const std::size_t i = interval(v);
  const double h = v_[i + 1] - v_[i];
  const double t = (v - v_[i]) / h;
  const double s = (v_[i + 1] - v) / h;
  const double d01 = 6.0 * t * s / h;
  const double d10 = s * (s - 2.0 * t);
  const double d11 = t * (t - 2.0 * s);
  return d01 * (q_[i + 1] - q_[i]) + d10 * dq_[i] + d11 * dq_[i + 1];
}

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

long double rode_rhs(long double v, long double q, long double qp, const HFunction& base_h,
                     const HFunction& target_h) {
  return target_h(q) * qp * qp - base_h(v) * qp;
}

namespace {

struct State {
  long double q;
  long double p;
};

template <std::size_t S>
struct Tableau {
  std::array<long double, S> c;
  std::array<std::array<long double, S>, S> a;
  std::array<long double, S> b;
};

// Classical fourth-order Runge-Kutta.
constexpr Tableau<4> kRk4{
    {0.0L, 0.5L, 0.5L, 1.0L},
    {{{0.0L, 0.0L, 0.0L, 0.0L}, {0.5L, 0.0L, 0.0L, 0.0L}, {0.0L, 0.5L, 0.0L, 0.0L}, {0.0L, 0.0L, 1.0L, 0.0L}}},
    {1.0L / 6.0L, 1.0L / 3.0L, 1.0L / 3.0L, 1.0L / 6.0L}};

// Butcher's seven-stage sixth-order method.
constexpr Tableau<7> kRk6{
    {0.0L, 1.0L / 3.0L, 2.0L / 3.0L, 1.0L / 3.0L, 0.5L, 0.5L, 1.0L},
    {{{0.0L, 0.0L, 0.0L, 0.0L, 0.0L, 0.0L, 0.0L},
      {1.0L / 3.0L, 0.0L, 0.0L, 0.0L, 0.0L, 0.0L, 0.0L},
      {0.0L, 2.0L / 3.0L, 0.0L, 0.0L, 0.0L, 0.0L, 0.0L},
      {1.0L / 12.0L, 1.0L / 3.0L, -1.0L / 12.0L, 0.0L, 0.0L, 0.0L, 0.0L},
      {-1.0L / 16.0L, 9.0L / 8.0L, -3.0L / 16.0L, -3.0L / 8.0L, 0.0L, 0.0L, 0.0L},
      {0.0L, 9.0L / 8.0L, -3.0L / 8.0L, -3.0L / 4.0L, 0.5L, 0.0L, 0.0L},
      {9.0L / 44.0L, -9.0L / 11.0L, 63.0L / 44.0L, 18.0L / 11.0L, 0.0L, -16.0L / 11.0L, 0.0L}}},
    {11.0L / 120.0L, 0.0L, 27.0L / 40.0L, 27.0L / 40.0L, -4.0L / 15.0L, -4.0L / 15.0L, 11.0L / 120.0L}};

// Compensation terms for the running state (Kahan summation).
struct Carry {
  long double q = 0.0L;
  long double p = 0.0L;
};

void kahan_add(long double& sum, long double& carry, long double increment) {
  const long double y = increment - carry;
  const long double t = sum + y;
  carry = (t - sum) - y;
  sum = t;
}

template <std::size_t S>
State rk_step(const Tableau<S>& tab, long double v, State y, Carry& carry, long double h,
              const HFunction& base_h, const HFunction& target_h) {
  std::array<State, S> k{};
  for (std::size_t i = 0; i < S; ++i) {
    State yi = y;
    for (std::size_t j = 0; j < i; ++j) {
      if (tab.a[i][j] == 0.0) continue;
      yi.q += h * tab.a[i][j] * k[j].q;
      yi.p += h * tab.a[i][j] * k[j].p;
    }
    k[i] = {yi.p, rode_rhs(v + tab.c[i] * h, yi.q, yi.p, base_h, target_h)};
  }
  long double dq = 0.0L;
  long double dp = 0.0L;
  for (std::size_t i = 0; i < S; ++i) {
    dq += tab.b[i] * k[i].q;
    dp += tab.b[i] * k[i].p;
  }
  // Gaussian-base solves amplify drift near the origin by ~e^{v^2/2}, so the
  // running state is summed with compensation.
  State out = y;
  kahan_add(out.q, carry.q, h * dq);
  kahan_add(out.p, carry.p, h * dp);
  return out;
}

constexpr double kBlowUpGuard = 1e12;

struct Trajectory {
  std::vector<double> v;
  std::vector<double> q;
  std::vector<double> p;
};

// Integrates forward in v from (v0, q0, slope0) over length `extent`.
Trajectory integrate_forward(const HFunction& base_h, const HFunction& target_h, double v0,
                             double q0, long double slope0, double extent, double step,
                             RkOrder order) {
  const auto steps = static_cast<std::size_t>(std::ceil(extent / step - 1e-9));
  const std::size_t n = std::max<std::size_t>(steps, 1);
  const long double h = static_cast<long double>(extent) / static_cast<long double>(n);

  Trajectory out;
  out.v.reserve(n + 1);
  out.q.reserve(n + 1);
  out.p.reserve(n + 1);
  State y{q0, slope0};
  Carry carry;
  out.v.push_back(v0);
  out.q.push_back(static_cast<double>(y.q));
  out.p.push_back(static_cast<double>(y.p));
  for (std::size_t k = 0; k < n; ++k) {
    const long double v = v0 + static_cast<long double>(k) * h;
    y = order == RkOrder::rk6 ? rk_step(kRk6, v, y, carry, h, base_h, target_h)
                              : rk_step(kRk4, v, y, carry, h, base_h, target_h);
    const long double v_next = v0 + static_cast<long double>(k + 1) * h;
    if (!std::isfinite(y.q) || !std::isfinite(y.p)) {
      throw OverflowError("solve_rode: non-finite state at v = " + std::to_string(static_cast<double>(v_next)));
    }
    if (std::fabs(y.q) > kBlowUpGuard) {
      throw OverflowError("solve_rode: |Q| exceeded 1e12 at v = " + std::to_string(static_cast<double>(v_next)));
    }
    if (!(y.p > 0.0)) {
      throw MonotonicityError("solve_rode: Q' <= 0 at v = " + std::to_string(static_cast<double>(v_next)));
    }
    out.v.push_back(static_cast<double>(v_next));
    out.q.push_back(static_cast<double>(y.q));
    out.p.push_back(static_cast<double>(y.p));
  }
  return out;
}

}  // namespace

QuantileMap solve_rode(const RecyclingProblem& problem, double step, RkOrder order) {
  problem.validate();
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError("solve_rode: step must be positive");
  }

  if (problem.direction == Direction::right) {
    Trajectory t = integrate_forward(problem.base_h, problem.target_h, problem.v0, problem.q0,
                                     problem.slope0, problem.v_max, step, order);
    return QuantileMap(std::move(t.v), std::move(t.q), std::move(t.p));
  }

  // Left problems: with s = -v and R(s) = -Q(-s) the ODE keeps its form,
  //   R'' + [-Hb(-s)] R' = [-Ht(-R)] (R')^2,
  // so the mirrored H-functions are integrated forward in s and mapped back.
  const HFunction& base = problem.base_h;
  const HFunction& target = problem.target_h;
  HFunction mirrored_base = [&base](long double s) { return -base(-s); };
  HFunction mirrored_target = [&target](long double r) { return -target(-r); };
  Trajectory t = integrate_forward(mirrored_base, mirrored_target, -problem.v0, -problem.q0,
                                   problem.slope0, problem.v_max, step, order);
  const std::size_t n = t.v.size();
  std::vector<double> v(n);
  std::vector<double> q(n);
  std::vector<double> dq(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[n - 1 - i] = -t.v[i];
    q[n - 1 - i] = -t.q[i];
    dq[n - 1 - i] = t.p[i];
  }
  return QuantileMap(std::move(v), std::move(q), std::move(dq));
}

TwoSidedQuantileMap solve_two_sided(const ProblemPair& problems, double step, RkOrder order) {
  if (problems.left.direction != Direction::left ||
      problems.right.direction != Direction::right) {
    throw DomainError("solve_two_sided: problem directions must be (left, right)");
  }
  return {solve_rode(problems.left, step, order), solve_rode(problems.right, step, order)};
}

// ---------------------------------------------------------------------------
// Problem builders
// ---------------------------------------------------------------------------

ProblemPair build_hyperbolic_problems(const HyperbolicParams& p,
                                      const TwoSidedExponential& split, double v_max) {
  p.validate();
  split.validate();
  const double g = p.gamma_h();
  const double dg = p.delta * g;
  // 1/f(0) = 2 alpha delta K_1(delta gamma) e^{alpha delta} / gamma.
  const long double inv_f0 = 2.0L * p.alpha * p.delta * bessel_k_scaled(1.0, dg) *
                             std::exp(static_cast<long double>(p.alpha * p.delta - dg)) / g;

  const long double alpha = p.alpha;
  const long double beta = p.beta;
  const long double delta = p.delta;
  HFunction target = [alpha, beta, delta](long double q) {
    return alpha * q / std::hypot(delta, q) - beta;
  };

  ProblemPair out;
  out.right.base_h = [rate = alpha - beta](long double) { return rate; };
  out.right.target_h = target;
  out.right.slope0 = split.p_plus * (alpha - beta) * inv_f0;
  out.right.direction = Direction::right;
  out.right.v_max = v_max;

  out.left.base_h = [rate = alpha + beta](long double) { return -rate; };
  out.left.target_h = target;
  out.left.slope0 = split.p_minus * (alpha + beta) * inv_f0;
  out.left.direction = Direction::left;
  out.left.v_max = v_max;
  return out;
}

ProblemPair build_vg_problems(const VGParams& p, const TwoSidedExponential& split,
                              double v_max) {
  p.require_supported();
  split.validate();
  const long double f0 = VarianceGamma(p).density(0.0);

  const VGParams params = p;
  const double h_plus = vg_h_at_origin(p, true);
  const double h_minus = vg_h_at_origin(p, false);
  const long double alpha = p.alpha;
  const long double beta = p.beta;

  ProblemPair out;
  out.right.base_h = [rate = alpha - beta](long double) { return rate; };
  out.right.target_h = [params, h_plus](long double q) -> long double {
    return q > 0 ? vg_h(static_cast<double>(q), params) : h_plus;
  };
  out.right.slope0 = split.p_plus * (alpha - beta) / f0;
  out.right.direction = Direction::right;
  out.right.v_max = v_max;

  out.left.base_h = [rate = alpha + beta](long double) { return -rate; };
  out.left.target_h = [params, h_minus](long double q) -> long double {
    return q < 0 ? vg_h(static_cast<double>(q), params) : h_minus;
  };
  out.left.slope0 = split.p_minus * (alpha + beta) / f0;
  out.left.direction = Direction::left;
  out.left.v_max = v_max;
  return out;
}

namespace {

long double gaussian_h(long double v) { return v; }

}  // namespace

ProblemPair build_gaussian_student_problems(double n, double v_max) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("build_gaussian_student_problems: n must be positive");
  }
  const long double nl = n;
  const long double gamma = std::sqrt(nl / 2) * gamma_ratio_half_ld(nl);
  ProblemPair out;
  for (RecyclingProblem* prob : {&out.left, &out.right}) {
    prob->base_h = gaussian_h;
    prob->target_h = [nl](long double q) { return (1 + 1 / nl) * q / (1 + q * q / nl); };
    prob->slope0 = gamma;
    prob->v_max = v_max;
  }
  out.left.direction = Direction::left;
  out.right.direction = Direction::right;
  return out;
}

ProblemPair build_exponential_normal_problems(double v_max) {
  // sqrt(pi/2) to long double precision.
  const long double slope = 1.253314137315500251207882642405522627L;
  ProblemPair out;
  out.right.base_h = [](long double) { return 1.0L; };
  out.left.base_h = [](long double) { return -1.0L; };
  for (RecyclingProblem* prob : {&out.left, &out.right}) {
    prob->target_h = gaussian_h;
    prob->slope0 = slope;
    prob->v_max = v_max;
  }
  out.left.direction = Direction::left;
  out.right.direction = Direction::right;
  return out;
}

ProblemPair build_gaussian_identity_problems(double v_max) {
  ProblemPair out;
  for (RecyclingProblem* prob : {&out.left, &out.right}) {
    prob->base_h = gaussian_h;
    prob->target_h = gaussian_h;
    prob->slope0 = 1.0L;
    prob->v_max = v_max;
  }
  out.left.direction = Direction::left;
  out.right.direction = Direction::right;
  return out;
}

}  // namespace qrecycle
