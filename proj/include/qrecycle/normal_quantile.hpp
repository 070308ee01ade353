#pragma once

// Branchless normal quantile kernels in exponential coordinates.
//
// The exponential coordinate of an upper probability u in [1/2, 1) is
// v = -log(2(1-u)); the normal quantile is then the slowly varying map
// Q(v) = Phi^{-1}(1 - e^{-v}/2), approximated by v P(v)/Q(v).
//
// Two layers: the *_kernel functions are unchecked and noexcept, meant for
// bulk loops; the plain-named functions validate their input first.

#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <utility>

namespace qrecycle {

// ---------------------------------------------------------------------------
// Coefficient tables (ascending degree)
// ---------------------------------------------------------------------------

namespace coeffs {

// (7,7) exponential-coordinate fit.
inline constexpr std::array<double, 8> kRational77_P = {
    1.2533141359896652729,   3.0333178251950406994,    2.3884158540184385711,
    0.73176759583280610539,  0.085838533424158257377,  0.0034424140686962222423,
    0.000036313870818023761224, 4.3304513840364031401e-8};
inline constexpr std::array<double, 8> kRational77_Q = {
    1.0,                    2.9202373175993672857,  2.9373357991677046357,
    1.2356513216582148689,  0.2168237095066675527,  0.014494272424798068406,
    0.00030617264753008793976, 1.3141263119543315917e-6};

// Reduced single-precision fit.
inline constexpr std::array<double, 6> kRational55_P = {
    1.2533136835212087879,  1.9797154223229267471,   0.80002295072483916762,
    0.087403248265958578062, 0.0020751409553756572917, 4.744820732427972462e-6};
inline constexpr std::array<double, 6> kRational55_Q = {
    1.0,                   2.0795584360534589311, 1.2499328117341603014,
    0.23668431621373705623, 0.0120098270559197768, 0.00010590620919921025259};

// Double-precision fit.
inline constexpr std::array<double, 14> kRational1313_P = {
    1.2533141373154989811,     5.5870183514814983104,   9.9373788223105148469,
    9.11745910783758368,       4.6865666928347513004,   1.3841649695441184484,
    0.23434950424605615377,    0.022306824510199724768, 0.0011538603964070818722,
    0.000030796620691411567563, 3.9115723028719510263e-7, 2.0589573468131996933e-9,
    3.3944224725087481454e-12, 7.3936480912071325978e-16};
inline constexpr std::array<double, 14> kRational1313_Q = {
    1.00000000000000000000,    4.9577956835689939051,    9.9793129245112074476,
    10.574454910639356539,     6.4247521669505779535,    2.3008904864351121026,
    0.48545999687461771635,    0.059283082737079006352,  0.0040618506206078995821,
    0.00014919732843986856251, 2.7477061392049947066e-6, 2.2815008011613816939e-8,
    7.0445790305953963457e-11, 5.1535907808963289678e-14};

}  // namespace coeffs

/// Horner evaluation of an ascending-degree polynomial, in T arithmetic.
template <class T, std::size_t N>
constexpr T horner(const std::array<double, N>& c, T x) noexcept {
  T acc = static_cast<T>(c[N - 1]);
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + static_cast<T>(c[i]);
  return acc;
}

/// A tabulated rational approximation x P(x)/Q(x) plus its validated domain.
struct RationalKernel {
  std::string_view name;
  std::span<const double> p;
  std::span<const double> q;
  double domain_lo;
  double domain_hi;
  /// Documented maximum relative error on [domain_lo, domain_hi].
  double error_bound;

  double numerator(double x) const;
  double denominator(double x) const;
  /// x * P(x) / Q(x).
  double operator()(double x) const { return x * numerator(x) / denominator(x); }
};

extern const RationalKernel kRationalA;  // (7,7), v in [0, 37]
extern const RationalKernel kRationalC;  // (5,5), v in [0, 37]
extern const RationalKernel kRationalD;  // (13,13), v in [0, 74]

// ---------------------------------------------------------------------------
// Unchecked kernels
// ---------------------------------------------------------------------------

/// v P(v)/Q(v) with the (7,7) coefficients.
inline double q77_kernel(double v) noexcept {
  return v * horner(coeffs::kRational77_P, v) / horner(coeffs::kRational77_Q, v);
}

/// (13,13) rational in the exponential coordinate: Phi^{-1}(1 - e^{-v}/2).
inline double q_double_kernel(double v) noexcept {
  return v * horner(coeffs::kRational1313_P, v) / horner(coeffs::kRational1313_Q, v);
}

enum class SingleVariant { f1, f2 };

/// The single-precision listings, evaluated in T. The sign is formed
/// arithmetically, exactly as in the listings.
template <class T, SingleVariant V>
inline T icnd_single_kernel(T u) noexcept {
  const int up = u >= T(0.5);
  const int sgn = up - !up;
  const T s = static_cast<T>(sgn);
  const T z = -std::log(T(1) - s * ((T(2) * u) - T(1)));
  if constexpr (V == SingleVariant::f1) {
    return s * z * horner<T>(coeffs::kRational77_P, z) / horner<T>(coeffs::kRational77_Q, z);
  } else {
    return s * z * horner<T>(coeffs::kRational55_P, z) / horner<T>(coeffs::kRational55_Q, z);
  }
}

/// (13,13) kernel on u. The tail-mass select compiles to a conditional
/// move, not a branch.
inline double icnd_double_kernel(double u) noexcept {
  const int up = u >= 0.5;
  const int sgn = up - !up;
  const double vv = up ? 1.0 - u : u;
  const double z = -std::log(2.0 * vv);
  return sgn * z * horner(coeffs::kRational1313_P, z) / horner(coeffs::kRational1313_Q, z);
}

// ---------------------------------------------------------------------------
// Checked API
// ---------------------------------------------------------------------------

/// (7,7) kernel. v >= 0; accurate to 1.06e-9 on [0, 37], degrading slowly
/// beyond. Throws DomainError for negative or NaN v.
double q77(double v);

/// Single-precision listings. variant f1 reuses the (7,7) table, f2 the
/// reduced table. Throws DomainError unless 0 < u < 1.
float icnd_single(float u, SingleVariant variant);
/// The same listings evaluated in double arithmetic.
double icnd_single_double(double u, SingleVariant variant);

/// (13,13) double kernel. Throws DomainError unless 0 < u < 1.
///
/// For u close to 1, forming 1 - u costs precision; callers wanting the
/// deep upper tail should pass the complementary probability and negate.
double icnd_double(double u);

/// Taylor series of Q(v) about v = 0 through v^terms (1 <= terms <= 10).
/// Intended for |v| <= 0.5.
double normal_series_origin(double v, int terms = 10);

/// Exact coefficient of v^k in the origin series, k = 1..10.
double normal_series_coefficient(int k);

/// Readings of the tail-model constant a.
///   corrected:   a = v - log(pi)/2            (consistent with the Mills ratio)
///   printed:     a = log(v - log(pi)/2)
///   log_two_pi:  a = log(v - log(2 pi)/2)
enum class TailVariant { corrected, printed, log_two_pi };

/// sqrt(2 q(a, b)) with b = log a and the five-group asymptotic q(a, b).
/// Throws DomainError for v < 37. `groups` (1..6) truncates q after that many
/// groups; 6 keeps every term through a^{-4}.
double tail_supplement(double v, TailVariant variant = TailVariant::corrected, int groups = 6);

enum class AntitheticKernel { q77, q_double };

/// v = -log(u), z = Q(v); returns (z, -z). Throws DomainError unless 0 < u < 1.
std::pair<double, double> sample_normal_antithetic(double u,
                                                   AntitheticKernel kernel = AntitheticKernel::q77);

}  // namespace qrecycle
