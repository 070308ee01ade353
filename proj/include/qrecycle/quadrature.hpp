#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature, global subdivision on the worst
// interval. Header-only so the oracle can instantiate it in long double.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "qrecycle/errors.hpp"

namespace qrecycle::quad {

template <class Real>
struct Result {
  Real value{};
  Real error{};
  int intervals = 0;
};

namespace detail {

// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
inline constexpr long double kXgk[8] = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};
inline constexpr long double kWgk[8] = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
inline constexpr long double kWg[4] = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <class Real>
struct Segment {
  Real a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class Real, class F>
Segment<Real> gk15(F& f, Real a, Real b) {
  const Real center = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = f(center);
  Real kronrod = fc * static_cast<Real>(kWgk[7]);
  Real gauss = fc * static_cast<Real>(kWg[3]);
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * static_cast<Real>(kXgk[j]);
    const Real fsum = f(center - dx) + f(center + dx);
    kronrod += static_cast<Real>(kWgk[j]) * fsum;
    if (j % 2 == 1) gauss += static_cast<Real>(kWg[j / 2]) * fsum;
  }
  return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over the finite interval [a, b].
///
/// Stops once the summed error estimate is below max(abs_tol, rel_tol*|I|).
/// Throws AccuracyError if max_intervals subdivisions are not enough.
template <class Real, class F>
Result<Real> integrate(F f, Real a, Real b, Real rel_tol, Real abs_tol = 0,
                       int max_intervals = 4000) {
  if (a == b) return {};
  using Seg = detail::Segment<Real>;
  std::priority_queue<Seg> heap;
  Seg first = detail::gk15<Real>(f, a, b);
  Real total = first.value;
  Real total_err = first.error;
  heap.push(first);
  int count = 1;
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (count >= max_intervals) {
      throw AccuracyError("quadrature: subdivision limit reached");
    }
    Seg worst = heap.top();
    if (std::fabs(worst.b - worst.a) <= 64 * eps * std::fabs(worst.a)) {
      throw AccuracyError("quadrature: interval too small to bisect further");
    }
    heap.pop();
    const Real mid = (worst.a + worst.b) / 2;
    Seg left = detail::gk15<Real>(f, worst.a, mid);
    Seg right = detail::gk15<Real>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    if (total_err < 0) total_err = 0;
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  Real value = 0;
  Real error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, count};
}

/// Integrates f over [a, +inf) with x = a + t/(1-t), t in [0, 1).
template <class Real, class F>
Result<Real> integrate_upper(F f, Real a, Real rel_tol, Real abs_tol = 0,
                             int max_intervals = 4000) {
  auto g = [&f, a](Real t) -> Real {
    if (t >= 1) return 0;
    const Real s = 1 - t;
    const Real value = f(a + t / s);
    return value == 0 ? Real(0) : value / (s * s);
  };
  return integrate<Real>(g, Real(0), Real(1), rel_tol, abs_tol, max_intervals);
}

/// Integrates f over (-inf, b] by reflection onto integrate_upper.
template <class Real, class F>
Result<Real> integrate_lower(F f, Real b, Real rel_tol, Real abs_tol = 0,
                             int max_intervals = 4000) {
  auto g = [&f](Real x) -> Real { return f(-x); };
  return integrate_upper<Real>(g, -b, rel_tol, abs_tol, max_intervals);
}

}  // namespace qrecycle::quad
