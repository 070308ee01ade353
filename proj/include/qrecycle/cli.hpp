#pragma once

// Library side of the qrecycle command-line tool: precision sweeps against
// the oracle, QQ-map export from the ODE solver, and kernel micro-benchmarks.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qrecycle/bulk.hpp"
#include "qrecycle/recycling_ode.hpp"

namespace qrecycle::cli {

enum class GridMode { linear, log, random };

/// lo:hi:n[:mode], mode one of lin, log, rand.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;
  GridMode mode = GridMode::linear;

  /// Throws DomainError unless count >= 2, lo < hi and lo > 0 for log grids.
  void validate() const;
};

GridSpec parse_grid(std::string_view text);

/// "k=v,k=v"; values must parse as doubles.
std::map<std::string, double> parse_params(std::string_view text);

/// Grid points in ascending order. random draws log-uniform (lo > 0) or
/// uniform points from mt19937_64(seed) and sorts them.
std::vector<double> make_grid(const GridSpec& spec, std::uint64_t seed = 0);

/// |approx - oracle| / max(|oracle|, 1e-30).
double relative_error(double approx, double oracle);

/// Oracle value for a kernel input, matching the kernel's InputKind.
double kernel_oracle(Kernel k, double x);

struct PrecisionRow {
  double input;
  double approx;
  double oracle;
  double rel_error;
};

struct PrecisionReport {
  Kernel kernel;
  std::vector<PrecisionRow> rows;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  /// Input at which max_rel_error occurs.
  double worst_input = 0.0;

  /// max_rel_error <= 1.2 * documented error bound.
  bool within_bound() const;
};

/// Evaluates kernel and oracle on the grid. Workers fill disjoint slices of
/// one preallocated buffer, so the row order is the grid order.
PrecisionReport run_precision(Kernel k, const std::vector<double>& inputs, int threads = 0);

void write_precision_csv(std::ostream& os, const PrecisionReport& report);

enum class BaseId { exponential, gaussian };
enum class TargetId { hyperbolic, vg, normal, student, gaussian };

BaseId parse_base(std::string_view name);
TargetId parse_target(std::string_view name);

/// Builds and solves the left/right problems for a supported base/target
/// pair. Recognised params: alpha, beta, delta, lambda, n, step, order
/// (4 or 6). v_max is the half-width the map must cover.
TwoSidedQuantileMap solve_pair(BaseId base, TargetId target,
                               const std::map<std::string, double>& params, double v_max);

struct QQRow {
  double v;
  double q;
};

std::vector<QQRow> run_qqmap(const TwoSidedQuantileMap& map, const std::vector<double>& v);

/// Header v,Q,identity.
void write_qqmap_csv(std::ostream& os, const std::vector<QQRow>& rows);

struct BenchConfig {
  std::vector<Kernel> kernels;
  std::uint64_t samples = 100'000'000;
  int repetitions = 3;
  std::uint64_t seed = 1;
};

struct BenchResult {
  Kernel kernel;
  /// Median over repetitions of (kernel time - RNG-only baseline) / samples.
  double net_ns = 0.0;
  double raw_ns = 0.0;
  double baseline_ns = 0.0;
  /// Coefficient of variation of the net per-call time across repetitions.
  double cv = 0.0;
  /// Slowest kernel's net time divided by this kernel's net time; 0 when the
  /// net time is not positive (the identity kernel sits at the noise floor).
  double relative_throughput = 0.0;
  /// Sum of outputs, reported so the work cannot be optimised away.
  double checksum = 0.0;
};

/// Single-threaded timing, inputs uniform on each kernel's domain.
/// Throws DomainError for samples < 1e6 or repetitions < 1.
std::vector<BenchResult> run_bench(const BenchConfig& config);

void write_bench_table(std::ostream& os, const std::vector<BenchResult>& results);
void write_bench_csv(std::ostream& os, const std::vector<BenchResult>& results);

/// Full command line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qrecycle::cli
