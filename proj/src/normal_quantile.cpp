#include "qrecycle/normal_quantile.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qrecycle/errors.hpp"

namespace qrecycle {

double RationalKernel::numerator(double x) const {
  double acc = p.back();
  for (std::size_t i = p.size() - 1; i-- > 0;) acc = acc * x + p[i];
  return acc;
}

double RationalKernel::denominator(double x) const {
  double acc = q.back();
  for (std::size_t i = q.size() - 1; i-- > 0;) acc = acc * x + q[i];
  return acc;
}

const RationalKernel kRationalA{"rational77", coeffs::kRational77_P, coeffs::kRational77_Q,
                                0.0, 37.0, 1.06e-9};
const RationalKernel kRationalC{"rational55", coeffs::kRational55_P, coeffs::kRational55_Q,
                                0.0, 37.0, 4e-7};
const RationalKernel kRationalD{"rational1313", coeffs::kRational1313_P, coeffs::kRational1313_Q,
                                0.0, 74.0, 1e-13};

namespace {

void check_open_unit(double u, const char* where) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError(std::string(where) + ": u must lie in (0, 1)");
  }
}

// Origin-series coefficients, index k for v^k.
struct SeriesTable {
  std::array<double, 11> c{};

  SeriesTable() {
    using std::numbers::pi;
    const double sp = std::sqrt(pi);
    const double p3 = pi * sp;
    const double p5 = pi * p3;
    const double p7 = pi * p5;
    const double p9 = pi * p7;
    const double r2 = std::numbers::sqrt2;
    c[1] = std::sqrt(pi / 2.0);
    c[2] = -0.5 * std::sqrt(pi / 2.0);
    c[3] = (2 * sp + p3) / (12 * r2);
    c[4] = -(sp + 3 * p3) / (24 * r2);
    c[5] = (4 * sp + 50 * p3 + 7 * p5) / (480 * r2);
    c[6] = -(4 * sp + 180 * p3 + 105 * p5) / (2880 * r2);
    c[7] = (8 * sp + 1204 * p3 + 1960 * p5 + 127 * p7) / (40320 * r2);
    c[8] = -(2 * sp + 966 * p3 + 3675 * p5 + 889 * p7) / (80640 * r2);
    c[9] = (16 * sp + 24200 * p3 + 194628 * p5 + 117348 * p7 + 4369 * p9) / (5806080 * r2);
    c[10] = -(16 * sp + 74640 * p3 + 1190700 * p5 + 1493520 * p7 + 196605 * p9) /
            (58060800 * r2);
  }
};

const SeriesTable& series_table() {
  static const SeriesTable table;
  return table;
}

}  // namespace

double q77(double v) {
  if (!(v >= 0.0)) throw DomainError("q77: v must be >= 0");
  return q77_kernel(v);
}

float icnd_single(float u, SingleVariant variant) {
  check_open_unit(u, "icnd_single");
  return variant == SingleVariant::f1 ? icnd_single_kernel<float, SingleVariant::f1>(u)
                                      : icnd_single_kernel<float, SingleVariant::f2>(u);
}

double icnd_single_double(double u, SingleVariant variant) {
  check_open_unit(u, "icnd_single_double");
  return variant == SingleVariant::f1 ? icnd_single_kernel<double, SingleVariant::f1>(u)
                                      : icnd_single_kernel<double, SingleVariant::f2>(u);
}

double icnd_double(double u) {
  check_open_unit(u, "icnd_double");
  return icnd_double_kernel(u);
}

double normal_series_coefficient(int k) {
  if (k < 1 || k > 10) throw DomainError("normal_series_coefficient: k must lie in [1, 10]");
  return series_table().c[k];
}

double normal_series_origin(double v, int terms) {
  if (terms < 1 || terms > 10) throw DomainError("normal_series_origin: terms in [1, 10]");
  const auto& c = series_table().c;
  double acc = 0.0;
  for (int k = terms; k >= 1; --k) acc = (acc + c[k]) * v;
  return acc;
}

double tail_supplement(double v, TailVariant variant, int groups) {
  if (!(v >= 37.0)) throw DomainError("tail_supplement: v must be >= 37");
  if (groups < 1 || groups > 6) throw DomainError("tail_supplement: groups in [1, 6]");
  const double half_log_pi = 0.5 * std::log(std::numbers::pi);
  double a = 0.0;
  switch (variant) {
    case TailVariant::corrected:
      a = v - half_log_pi;
      break;
    case TailVariant::printed:
      a = std::log(v - half_log_pi);
      break;
    case TailVariant::log_two_pi:
      a = std::log(v - 0.5 * std::log(2.0 * std::numbers::pi));
      break;
  }
  const double b = std::log(a);
  const double b2 = b * b;
  const double b3 = b2 * b;
  const double b4 = b3 * b;
  const std::array<double, 6> group = {
      a,
      -b / 2.0,
      (b / 4.0 - 0.5) / a,
      (b2 - 6.0 * b + 14.0) / (16.0 * a * a),
      (2.0 * b3 - 21.0 * b2 + 102.0 * b - 214.0) / (96.0 * a * a * a),
      (3.0 * b4 - 46.0 * b3 + 348.0 * b2 - 1488.0 * b + 2978.0) / (384.0 * a * a * a * a)};
  double q = 0.0;
  for (int i = groups - 1; i >= 0; --i) q += group[i];
  return std::sqrt(2.0 * q);
}

std::pair<double, double> sample_normal_antithetic(double u, AntitheticKernel kernel) {
  check_open_unit(u, "sample_normal_antithetic");
  const double v = -std::log(u);
  const double z = kernel == AntitheticKernel::q77 ? q77_kernel(v) : q_double_kernel(v);
  return {z, -z};
}

}  // namespace qrecycle
