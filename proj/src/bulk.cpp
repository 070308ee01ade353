#include "qrecycle/bulk.hpp"

#include <array>
#include <cstddef>
#include <omp.h>

#include "qrecycle/errors.hpp"
#include "qrecycle/normal_quantile.hpp"
#include "qrecycle/student_map.hpp"

namespace qrecycle {

namespace {

constexpr std::array<KernelInfo, 11> kKernels = {{
    {Kernel::identity, "identity", InputKind::probability, 0.0, 1.0, 0.0},
    {Kernel::q77, "q77", InputKind::exponential, 0.0, 37.0, 1.06e-9},
    {Kernel::q_double, "q_double", InputKind::exponential, 0.0, 74.0, 1e-13},
    {Kernel::icnd_f1, "icnd_f1", InputKind::probability, 1e-3, 1.0 - 1e-3, 2e-6},
    {Kernel::icnd_f2, "icnd_f2", InputKind::probability, 1e-3, 1.0 - 1e-3, 2e-6},
    {Kernel::icnd_f1_double, "icnd_f1_double", InputKind::probability, 1e-6, 1.0 - 1e-6, 1.06e-9},
    {Kernel::icnd_f2_double, "icnd_f2_double", InputKind::probability, 1e-10, 1.0 - 1e-10, 4e-7},
    {Kernel::icnd_double, "icnd_double", InputKind::probability, 1e-30, 1.0 - 1e-16, 1e-13},
    {Kernel::tail_supplement, "tail_supplement", InputKind::exponential, 37.0, 1e4, 1.06e-9},
    {Kernel::series_origin, "series_origin", InputKind::exponential, -0.1, 0.1, 1.9e-10},
    {Kernel::student4, "student4", InputKind::gaussian, -8.0, 8.0, 1.4e-5},
}};

double tail_kernel(double v) noexcept {
  // Same arithmetic as tail_supplement(v, corrected) without the range check.
  return v >= 37.0 ? tail_supplement(v) : q77_kernel(v);
}

template <class F>
void for_kernel(Kernel k, F&& body) {
  switch (k) {
    case Kernel::identity: return body([](double x) noexcept { return x; });
    case Kernel::q77: return body([](double v) noexcept { return q77_kernel(v); });
    case Kernel::q_double: return body([](double v) noexcept { return q_double_kernel(v); });
    case Kernel::icnd_f1:
      return body([](double u) noexcept {
        return static_cast<double>(
            icnd_single_kernel<float, SingleVariant::f1>(static_cast<float>(u)));
      });
    case Kernel::icnd_f2:
      return body([](double u) noexcept {
        return static_cast<double>(
            icnd_single_kernel<float, SingleVariant::f2>(static_cast<float>(u)));
      });
    case Kernel::icnd_f1_double:
      return body([](double u) noexcept { return icnd_single_kernel<double, SingleVariant::f1>(u); });
    case Kernel::icnd_f2_double:
      return body([](double u) noexcept { return icnd_single_kernel<double, SingleVariant::f2>(u); });
    case Kernel::icnd_double: return body([](double u) noexcept { return icnd_double_kernel(u); });
    case Kernel::tail_supplement: return body(tail_kernel);
    case Kernel::series_origin:
      return body([](double v) noexcept { return normal_series_origin(v, 10); });
    case Kernel::student4: return body([](double v) noexcept { return student4_fast(v); });
  }
}

void check_sizes(std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw DomainError("bulk evaluation: size mismatch");
}

}  // namespace

std::span<const KernelInfo> kernel_table() { return kKernels; }

const KernelInfo& kernel_info(Kernel k) {
  for (const auto& info : kKernels) {
    if (info.id == k) return info;
  }
  throw DomainError("kernel_info: unknown kernel");
}

std::optional<Kernel> parse_kernel(std::string_view name) {
  for (const auto& info : kKernels) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

double evaluate_kernel(Kernel k, double x) noexcept {
  double out = 0.0;
  for_kernel(k, [&](auto f) { out = f(x); });
  return out;
}

void evaluate_serial(Kernel k, std::span<const double> in, std::span<double> out) {
  check_sizes(in, out);
  for_kernel(k, [&](auto f) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  });
}

void evaluate_parallel(Kernel k, std::span<const double> in, std::span<double> out,
                       int threads) {
  check_sizes(in, out);
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const double* src = in.data();
  double* dst = out.data();
  for_kernel(k, [&](auto f) {
#pragma omp parallel for schedule(static) num_threads(team)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = f(src[i]);
  });
}

}  // namespace qrecycle
