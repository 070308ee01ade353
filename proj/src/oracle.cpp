#include "qrecycle/oracle.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "qrecycle/errors.hpp"
#include "qrecycle/quadrature.hpp"
#include "qrecycle/special_functions.hpp"

namespace qrecycle {

using ld = long double;

namespace {

constexpr ld kPi = 3.141592653589793238462643383279502884L;
constexpr ld kSqrt2 = 1.414213562373095048801688724209698079L;
constexpr ld kLn2 = 0.693147180559945309417232121458176568L;
constexpr ld kLogSqrt2Pi = 0.918938533204672741780329736405617640L;
constexpr ld kEps = LDBL_EPSILON;

void check_probability(double u, const char* where) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError(std::string(where) + ": probability must lie in (0, 1)");
  }
}

// A probability handed around as its tail mass p <= 1/2 and its distance
// c = 1/2 - p from the centre, each carried at full relative precision.
struct SplitProbability {
  ld p;
  ld c;
};

// Safeguarded Newton on an increasing function g on [lo, hi] with
// g(lo) < 0 < g(hi). step(x) returns {g(x), g'(x)}.
template <class Step>
ld newton_bracketed(Step step, ld lo, ld hi, ld x, const OracleConfig& cfg, ld rel_step,
                    const char* where) {
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const auto [g, dg] = step(x);
    if (g == 0) return x;
    if (g < 0) lo = x; else hi = x;
    ld next = x - g / dg;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = (lo + hi) / 2;
    if (std::fabs(next - x) <= rel_step * std::max<ld>(std::fabs(next), 1e-300L)) return next;
    if (hi - lo <= rel_step * std::max<ld>(std::fabs(lo), std::fabs(hi))) return next;
    x = next;
  }
  throw OracleFailure(std::string(where) + ": Newton iteration did not converge");
}

// ---------------------------------------------------------------------------
// Normal
// ---------------------------------------------------------------------------

// log Phi(-y) for y >= 0.
ld log_lower_tail(ld y) { return std::log(0.5L * std::erfc(y / kSqrt2)); }

// |z| for a split probability: Phi(-|z|) = p, i.e. Phi(|z|) - 1/2 = c.
ld normal_magnitude(const SplitProbability& sp, const OracleConfig& cfg) {
  if (sp.c == 0) return 0;
  if (sp.c < 0.25L) {
    // Central: (1/2) erf(y / sqrt 2) = c.
    auto step = [&](ld y) {
      const ld g = 0.5L * std::erf(y / kSqrt2) - sp.c;
      const ld dg = std::exp(-0.5L * y * y - kLogSqrt2Pi);
      return std::pair{g, dg};
    };
    const ld guess = sp.c * 2.5066282746310002416L;
    const ld y = newton_bracketed(step, 0.0L, 1.0L, guess, cfg, 4 * kEps, "oracle normal");
    const ld resid = std::fabs(0.5L * std::erf(y / kSqrt2) - sp.c);
    if (resid > std::max<ld>(cfg.abs_tol, 8 * kEps) * sp.c) {
      throw OracleFailure("oracle normal: central residual too large");
    }
    return y;
  }
  const ld log_p = std::log(sp.p);
  return -oracle_normal_lower_from_log(log_p, cfg);
}

// ---------------------------------------------------------------------------
// Student
// ---------------------------------------------------------------------------

struct StudentDensity {
  ld n;
  ld log_norm;

  explicit StudentDensity(ld dof)
      : n(dof), log_norm(-0.5L * std::log(dof * kPi) - std::log(gamma_ratio_half_ld(dof))) {}

  ld operator()(ld x) const { return std::exp(log_norm - 0.5L * (n + 1) * std::log1p(x * x / n)); }
};

ld student_quad_tol(const OracleConfig& cfg) {
  return std::max<ld>(static_cast<ld>(cfg.quad_tol) * 1e-3L, 1e-17L);
}

// P(T > t) for t >= 0.
ld student_upper(const StudentDensity& f, ld t, const OracleConfig& cfg) {
  const ld tol = student_quad_tol(cfg);
  if (t < 1) {
    const ld inner = quad::integrate<ld>(f, t, 1.0L, tol).value;
    return inner + student_upper(f, 1.0L, cfg);
  }
  // x = t/s maps [t, inf) onto (0, 1].
  auto g = [&f, t](ld s) -> ld {
    if (s <= 0) return 0;
    return f(t / s) * t / (s * s);
  };
  return quad::integrate<ld>(g, 0.0L, 1.0L, tol, 0.0L, 8000).value;
}

// P(0 < T < t) for t >= 0.
ld student_central(const StudentDensity& f, ld t, const OracleConfig& cfg) {
  if (t == 0) return 0;
  return quad::integrate<ld>(f, 0.0L, t, student_quad_tol(cfg)).value;
}

ld student_magnitude_quadrature(ld n, const SplitProbability& sp, const OracleConfig& cfg) {
  if (sp.c == 0) return 0;
  const StudentDensity f(n);
  const bool central = sp.c < 0.25L;
  auto residual = [&](ld t) {
    return central ? student_central(f, t, cfg) - sp.c : std::log(sp.p) - std::log(student_upper(f, t, cfg));
  };
  ld hi = 1;
  while (residual(hi) < 0) {
    hi *= 4;
    if (hi > 1e300L) throw OracleFailure("oracle student: bracket overflow");
  }
  auto step = [&](ld t) {
    if (central) return std::pair{student_central(f, t, cfg) - sp.c, f(t)};
    const ld upper = student_upper(f, t, cfg);
    return std::pair{std::log(sp.p) - std::log(upper), f(t) / upper};
  };
  return newton_bracketed(step, 0.0L, hi, hi / 2, cfg, 1e3L * kEps, "oracle student");
}

// Exact quantile magnitudes for n = 1, 2, 4.
ld student_magnitude_closed(int n, const SplitProbability& sp) {
  const ld p = sp.p;
  const ld c = sp.c;
  switch (n) {
    case 1:
      return p < 0.25L ? 1 / std::tan(kPi * p) : std::tan(kPi * c);
    case 2:
      return 2 * c / std::sqrt(2 * p * (0.5L + c));
    case 4: {
      // With alpha = 4p(1-p) and cos(theta) = sqrt(alpha):
      //   t^2 = 4 (cos(theta/3)/cos(theta) - 1)
      //       = 8 sin(2 theta/3) sin(theta/3) / cos(theta).
      const ld root_alpha = 2 * std::sqrt(p * (0.5L + c));
      const ld theta = std::atan2(2 * c, root_alpha);
      return 2 * std::sqrt(2 * std::sin(2 * theta / 3) * std::sin(theta / 3) / root_alpha);
    }
    default:
      throw DomainError("student_magnitude_closed: no closed form");
  }
}

bool has_closed_form(double n) { return n == 1.0 || n == 2.0 || n == 4.0; }

SplitProbability split_of(double u) {
  if (u < 0.5) return {static_cast<ld>(u), 0.5L - static_cast<ld>(u)};
  return {1.0L - static_cast<ld>(u), static_cast<ld>(u) - 0.5L};
}

// ---------------------------------------------------------------------------
// Generic CDF inversion
// ---------------------------------------------------------------------------

struct CdfTails {
  const Distribution& dist;
  const OracleConfig& cfg;

  double density(double x) const { return dist.density(x); }
  double upper(double x) const {
    auto f = [this](double t) { return dist.density(t); };
    return quad::integrate_upper<double>(f, x, cfg.quad_tol, 0.0, 8000).value;
  }
  double lower(double x) const {
    auto f = [this](double t) { return dist.density(t); };
    return quad::integrate_lower<double>(f, x, cfg.quad_tol, 0.0, 8000).value;
  }
};

// x >= 0 with P(X > x) = mass, given P(X > 0) >= mass.
double solve_upper(const CdfTails& tails, double mass) {
  const OracleConfig& cfg = tails.cfg;
  double hi = 1.0;
  while (tails.upper(hi) > mass) {
    hi *= 2.0;
    if (hi > 1e3) throw OracleFailure("oracle_cdf_inverse: bracket exceeded 1e3");
  }
  const double log_mass = std::log(mass);
  auto step = [&](ld x) {
    const double up = tails.upper(static_cast<double>(x));
    const ld g = log_mass - std::log(static_cast<ld>(up));
    const ld dg = tails.density(static_cast<double>(x)) / static_cast<ld>(up);
    return std::pair{g, dg};
  };
  const ld x = newton_bracketed(step, 0.0L, static_cast<ld>(hi), static_cast<ld>(hi) / 2, cfg,
                                1e-14L, "oracle_cdf_inverse");
  const double root = static_cast<double>(x);
  const double resid = std::fabs(tails.upper(root) / mass - 1.0);
  if (resid > std::max(1e3 * cfg.quad_tol, cfg.abs_tol)) {
    throw OracleFailure("oracle_cdf_inverse: residual " + std::to_string(resid));
  }
  return root;
}

// Mirror of solve_upper on the negative half-line.
double solve_lower(const CdfTails& tails, double mass) {
  class Mirror final : public Distribution {
   public:
    explicit Mirror(const Distribution& d) : d_(d) {}
    double density(double x) const override { return d_.density(-x); }
    double h(double x) const override { return -d_.h(-x); }
    Support support() const override { return d_.support(); }

   private:
    const Distribution& d_;
  };
  const Mirror mirror(tails.dist);
  return -solve_upper(CdfTails{mirror, tails.cfg}, mass);
}

}  // namespace

void OracleConfig::validate() const {
  if (!(abs_tol > 0.0) || !(quad_tol > 0.0) || max_iter < 1) {
    throw DomainError("OracleConfig: tolerances must be positive and max_iter >= 1");
  }
}

long double oracle_normal_lower_from_log(long double log_p, const OracleConfig& cfg) {
  cfg.validate();
  if (!(log_p <= -kLn2)) {
    throw DomainError("oracle_normal_lower_from_log: log p must be <= log(1/2)");
  }
  if (log_p == -kLn2) return 0;
  // Solve for y = -z >= 0 in the increasing residual log p - log Phi(-y).
  auto step = [&](ld y) {
    const ld lt = log_lower_tail(y);
    const ld g = log_p - lt;
    const ld dg = std::exp(-0.5L * y * y - kLogSqrt2Pi - lt);
    return std::pair{g, dg};
  };
  ld hi = std::sqrt(-2 * log_p) + 1;
  while (step(hi).first < 0) hi *= 2;
  const ld y = newton_bracketed(step, 0.0L, hi, std::sqrt(-2 * log_p), cfg, 4 * kEps,
                                "oracle normal");
  const ld resid = std::fabs(step(y).first);
  if (resid > std::max<ld>(cfg.abs_tol, 16 * kEps * (1 + y * y))) {
    throw OracleFailure("oracle normal: tail residual too large");
  }
  return -y;
}

double oracle_normal_quantile(double u, const OracleConfig& cfg) {
  check_probability(u, "oracle_normal_quantile");
  cfg.validate();
  if (u == 0.5) return 0.0;
  const ld y = normal_magnitude(split_of(u), cfg);
  return static_cast<double>(u < 0.5 ? -y : y);
}

double oracle_normal_upper_quantile(double q, const OracleConfig& cfg) {
  return -oracle_normal_quantile(q, cfg);
}

double oracle_normal_from_exponential(double v, const OracleConfig& cfg) {
  if (!(v >= 0.0) || std::isinf(v)) {
    throw DomainError("oracle_normal_from_exponential: v must be finite and >= 0");
  }
  cfg.validate();
  if (v == 0.0) return 0.0;
  const ld vl = v;
  if (vl < kLn2) {
    const SplitProbability sp{0.5L * std::exp(-vl), -0.5L * std::expm1(-vl)};
    return static_cast<double>(normal_magnitude(sp, cfg));
  }
  return static_cast<double>(-oracle_normal_lower_from_log(-vl - kLn2, cfg));
}

double probit_series(double u) {
  check_probability(u, "probit_series");
  // erfinv(x) = sum_k c_k / (2k+1) (sqrt(pi) x / 2)^{2k+1},
  // c_0 = 1, c_k = sum_{m<k} c_m c_{k-1-m} / ((m+1)(2m+1)).
  constexpr int kMaxTerms = 4000;
  static std::once_flag once;
  static std::vector<ld> coeffs;
  std::call_once(once, [] {
    coeffs.assign(kMaxTerms, 0.0L);
    coeffs[0] = 1;
    for (int k = 1; k < kMaxTerms; ++k) {
      ld s = 0;
      for (int m = 0; m < k; ++m) s += coeffs[m] * coeffs[k - 1 - m] / ((m + 1.0L) * (2 * m + 1.0L));
      coeffs[k] = s;
    }
  });
  const ld x = 2.0L * static_cast<ld>(u) - 1.0L;
  const ld w = std::sqrt(kPi) * x / 2;
  const ld w2 = w * w;
  ld power = w;
  ld sum = 0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const ld term = coeffs[k] / (2 * k + 1) * power;
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum)) return static_cast<double>(kSqrt2 * sum);
    power *= w2;
  }
  throw OracleFailure("probit_series: series did not converge (u too close to 0 or 1)");
}

double oracle_student_quantile(double u, double n, const OracleConfig& cfg) {
  check_probability(u, "oracle_student_quantile");
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("oracle_student_quantile: n > 0");
  cfg.validate();
  if (u == 0.5) return 0.0;
  const SplitProbability sp = split_of(u);
  const ld t = has_closed_form(n) ? student_magnitude_closed(static_cast<int>(n), sp)
                                  : student_magnitude_quadrature(n, sp, cfg);
  return static_cast<double>(u < 0.5 ? -t : t);
}

double oracle_student_quantile_quadrature(double u, double n, const OracleConfig& cfg) {
  check_probability(u, "oracle_student_quantile_quadrature");
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("oracle_student_quantile_quadrature: n > 0");
  }
  cfg.validate();
  if (u == 0.5) return 0.0;
  const ld t = student_magnitude_quadrature(n, split_of(u), cfg);
  return static_cast<double>(u < 0.5 ? -t : t);
}

double oracle_student_from_gaussian(double v, double n, const OracleConfig& cfg) {
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("oracle_student_from_gaussian: n > 0");
  if (!std::isfinite(v)) throw DomainError("oracle_student_from_gaussian: v must be finite");
  cfg.validate();
  if (v == 0.0) return 0.0;
  const ld y = std::fabs(static_cast<ld>(v)) / kSqrt2;
  const SplitProbability sp{0.5L * std::erfc(y), 0.5L * std::erf(y)};
  if (sp.p == 0) throw OracleFailure("oracle_student_from_gaussian: tail mass underflowed");
  const ld t = has_closed_form(n) ? student_magnitude_closed(static_cast<int>(n), sp)
                                  : student_magnitude_quadrature(n, sp, cfg);
  return static_cast<double>(v < 0.0 ? -t : t);
}

double oracle_student_cdf(double t, double n, const OracleConfig& cfg) {
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("oracle_student_cdf: n > 0");
  cfg.validate();
  const StudentDensity f(n);
  if (t < 0.0) return static_cast<double>(student_upper(f, -static_cast<ld>(t), cfg));
  return static_cast<double>(0.5L + student_central(f, t, cfg));
}

double oracle_cdf_inverse(const Distribution& dist, double u, const OracleConfig& cfg) {
  check_probability(u, "oracle_cdf_inverse");
  cfg.validate();
  const CdfTails tails{dist, cfg};
  const double below_zero = tails.lower(0.0);
  if (u == below_zero) return 0.0;
  if (u < below_zero) return solve_lower(tails, u);
  return solve_upper(tails, 1.0 - u);
}

double oracle_cdf_inverse_tail(const Distribution& dist, double mass, bool upper,
                               const OracleConfig& cfg) {
  check_probability(mass, "oracle_cdf_inverse_tail");
  cfg.validate();
  const CdfTails tails{dist, cfg};
  if (upper) {
    const double above_zero = tails.upper(0.0);
    if (mass == above_zero) return 0.0;
    return mass < above_zero ? solve_upper(tails, mass) : solve_lower(tails, 1.0 - mass);
  }
  const double below_zero = tails.lower(0.0);
  if (mass == below_zero) return 0.0;
  return mass < below_zero ? solve_lower(tails, mass) : solve_upper(tails, 1.0 - mass);
}

}  // namespace qrecycle
