#include "qrecycle/student_map.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "qrecycle/errors.hpp"
#include "qrecycle/oracle.hpp"
#include "qrecycle/special_functions.hpp"

namespace qrecycle {

namespace {

void check_dof(double n, const char* where) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError(std::string(where) + ": degrees of freedom must be positive");
  }
}

}  // namespace

double student_gamma(double n) {
  check_dof(n, "student_gamma");
  return std::sqrt(0.5 * n) * gamma_ratio_half(n);
}

StudentCentralSeries central_coefficients(double n, int K) {
  check_dof(n, "central_coefficients");
  if (K < 0 || K > 64) {
    throw DomainError("central_coefficients: order must lie in [0, 64]");
  }
  // The recurrence cancels heavily (c_10 ~ 1e-16 against O(1e-2) terms), so
  // it runs in 50 significant digits; long double leaves ~1e-13 on c_10.
  using mp = boost::multiprecision::cpp_bin_float_50;
  const mp nl = n;
  std::vector<mp> c(static_cast<std::size_t>(K) + 1, mp(0));
  c[0] = sqrt(nl / 2) * exp(lgamma(nl / 2) - lgamma((nl + 1) / 2));

  auto a = [&nl](int l, int m) {
    return (1 + 1 / nl) * ((2 * l + 1) * (2 * m + 1)) - (2 / nl) * (m * (2 * m + 1));
  };

  for (int i = 0; i < K; ++i) {
    mp rhs = -(2 * i + 1) * c[i];
    for (int l = 0; l <= i; ++l) {
      for (int m = 0; m <= i - l; ++m) {
        rhs += a(l, m) * c[i - l - m] * c[l] * c[m];
      }
    }
    if (i >= 1) {
      mp second = 0;
      for (int l = 0; l <= i - 1; ++l) {
        for (int m = 0; m <= i - 1 - l; ++m) {
          second += (2 * m + 1) * c[i - 1 - l - m] * c[l] * c[m];
        }
      }
      rhs -= second / nl;
    }
    c[i + 1] = rhs / ((2 * i + 3) * (2 * i + 2));
    if (!std::isfinite(c[i + 1].convert_to<double>())) {
      throw OverflowError("central_coefficients: c_" + std::to_string(i + 1) +
                          " is not finite");
    }
  }

  StudentCentralSeries out;
  out.n = n;
  out.coeffs.reserve(c.size());
  for (const auto& ck : c) out.coeffs.push_back(ck.convert_to<double>());
  return out;
}

double central_eval(const StudentCentralSeries& s, double v) {
  const double y = v * v;
  double acc = 0.0;
  for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it) acc = acc * y + *it;
  return v * acc;
}

StudentTailModel make_tail_model(double n, TailTerms terms) {
  check_dof(n, "make_tail_model");
  StudentTailModel m;
  m.n = n;
  m.terms = terms;
  const double k = n * std::sqrt(std::numbers::pi) * gamma_ratio_half(n);
  m.d = std::sqrt(n) * std::pow(k, -1.0 / n);
  return m;
}

double tail_eval(const StudentTailModel& m, double v) {
  if (v < 0.0) return -tail_eval(m, -v);
  const double n = m.n;
  const double log_k = std::log(n * std::sqrt(std::numbers::pi) * gamma_ratio_half(n));
  const double log_w = log_normal_upper_tail(v) + log_k;
  const double lead = std::sqrt(n) * std::exp(-log_w / n);
  if (m.terms == TailTerms::one) return lead;
  return lead * (1.0 - (n + 1.0) / (2.0 * (n + 2.0)) * std::exp(2.0 * log_w / n));
}

const std::array<double, 11> kStudent4Coefficients = {
    1.06384608107048714,    0.0735313753642658509,  0.00408737916150927847,
    0.000157376276663230562, 4.31939824140363509e-6, 9.56881464639227278e-8,
    2.09256881803614446e-9, 3.87962938209093352e-11, 2.72326084541915671e-13,
    2.90528930162373328e-15, 4.59490133995901375e-16};

double student4_fast(double v) {
  const double z = std::fabs(v);
  const double sgn = v < 0.0 ? -1.0 : 1.0;
  if (z < kStudent4Crossover) {
    const auto& c = kStudent4Coefficients;
    const double y = v * v;
    return v * (c[0] + y * (c[1] + y * (c[2] + y * (c[3] + y * (c[4] + y * (c[5] +
                y * (c[6] + y * (c[7] + y * (c[8] + (c[9] + c[10] * y) * y)))))))));
  }
  const double w = normal_upper_tail(z) * (16.0 / 3.0);
  return sgn * 2.0 * std::pow(w, -0.25) * (1.0 - (5.0 / 12.0) * std::sqrt(w));
}

// ---------------------------------------------------------------------------
// Crossover calibration
// ---------------------------------------------------------------------------

double calibrate_crossover(double n, int order, TailTerms terms) {
  check_dof(n, "calibrate_crossover");
  static std::mutex mutex;
  static std::map<std::tuple<double, int, int>, double> cache;
  const auto key = std::make_tuple(n, order, static_cast<int>(terms));
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const StudentCentralSeries series = central_coefficients(n, order);
  const StudentTailModel tail = make_tail_model(n, terms);
  constexpr double kLo = 0.25;
  constexpr double kHi = 10.0;
  constexpr int kPoints = 391;
  std::vector<double> grid(kPoints);
  std::vector<double> err_central(kPoints);
  std::vector<double> err_tail(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double v = kLo + (kHi - kLo) * i / (kPoints - 1);
    const double exact = oracle_student_from_gaussian(v, n);
    grid[i] = v;
    const double ce = std::fabs(central_eval(series, v) / exact - 1.0);
    const double te = std::fabs(tail_eval(tail, v) / exact - 1.0);
    err_central[i] = std::isfinite(ce) ? ce : HUGE_VAL;
    err_tail[i] = std::isfinite(te) ? te : HUGE_VAL;
  }
  // Central branch covers grid[0..j), tail covers grid[j..).
  std::vector<double> suffix_tail(kPoints + 1, 0.0);
  for (int i = kPoints - 1; i >= 0; --i) suffix_tail[i] = std::max(suffix_tail[i + 1], err_tail[i]);
  double prefix_central = 0.0;
  double best = HUGE_VAL;
  double best_v = kHi;
  for (int j = 0; j < kPoints; ++j) {
    const double worst = std::max(prefix_central, suffix_tail[j]);
    if (worst < best) {
      best = worst;
      best_v = grid[j];
    }
    prefix_central = std::max(prefix_central, err_central[j]);
  }

  std::lock_guard lock(mutex);
  cache.emplace(key, best_v);
  return best_v;
}

// ---------------------------------------------------------------------------
// Composite map
// ---------------------------------------------------------------------------

StudentMap::StudentMap(const StudentMapConfig& config)
    : series_(central_coefficients(config.n, config.order)),
      tail_(make_tail_model(config.n, config.tail_terms)) {
  if (config.crossover) {
    if (!(*config.crossover > 0.0) || !std::isfinite(*config.crossover)) {
      throw DomainError("StudentMap: crossover must be positive");
    }
    crossover_ = *config.crossover;
  } else if (config.n == 4.0 && config.order == 10 && config.tail_terms == TailTerms::two) {
    crossover_ = kStudent4Crossover;
  } else {
    crossover_ = calibrate_crossover(config.n, config.order, config.tail_terms);
  }
}

double StudentMap::operator()(double v) const {
  if (std::fabs(v) < crossover_) return central_eval(series_, v);
  return tail_eval(tail_, v);
}

double student_quantile_from_gaussian(double v, const StudentMapConfig& config) {
  return StudentMap(config)(v);
}

}  // namespace qrecycle
