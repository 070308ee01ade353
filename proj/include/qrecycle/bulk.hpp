#pragma once

// Array evaluation of the quantile kernels: a serial reference loop and an
// OpenMP-parallel loop that must produce bit-identical output.

#include <optional>
#include <span>
#include <string_view>

namespace qrecycle {

enum class Kernel {
  identity,
  q77,
  q_double,
  icnd_f1,
  icnd_f2,
  icnd_f1_double,
  icnd_f2_double,
  icnd_double,
  tail_supplement,
  series_origin,
  student4,
};

/// What a kernel's input means.
enum class InputKind {
  probability,   // u in (0, 1)
  exponential,   // v = -log(2(1-u)) >= 0
  gaussian,      // a standard normal sample v
};

struct KernelInfo {
  Kernel id;
  std::string_view name;
  InputKind input;
  /// Validated input domain.
  double lo;
  double hi;
  /// Documented max relative error on [lo, hi]; 0 for the identity.
  double error_bound;
};

std::span<const KernelInfo> kernel_table();
const KernelInfo& kernel_info(Kernel k);
std::optional<Kernel> parse_kernel(std::string_view name);

/// Unchecked single evaluation (input assumed inside the kernel's domain).
double evaluate_kernel(Kernel k, double x) noexcept;

/// out[i] = kernel(in[i]). Spans must have equal size; in == out is allowed.
void evaluate_serial(Kernel k, std::span<const double> in, std::span<double> out);

/// OpenMP version of evaluate_serial. threads <= 0 uses the OpenMP default.
void evaluate_parallel(Kernel k, std::span<const double> in, std::span<double> out,
                       int threads = 0);

}  // namespace qrecycle
