#include "qrecycle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <omp.h>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "qrecycle/errors.hpp"
#include "qrecycle/oracle.hpp"
#include "qrecycle/student_map.hpp"

namespace qrecycle::cli {

namespace {

double parse_double(std::string_view text, const char* what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw DomainError(std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string format17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grids and parameters
// ---------------------------------------------------------------------------

void GridSpec::validate() const {
  if (count < 2) throw DomainError("grid: count must be >= 2");
  if (!(lo < hi)) throw DomainError("grid: lo must be < hi");
  if (mode == GridMode::log && !(lo > 0.0)) throw DomainError("grid: log grid needs lo > 0");
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 3 || parts.size() > 4) {
    throw DomainError("grid: expected lo:hi:n[:lin|log|rand]");
  }
  GridSpec spec;
  spec.lo = parse_double(parts[0], "grid lo");
  spec.hi = parse_double(parts[1], "grid hi");
  const double n = parse_double(parts[2], "grid n");
  if (!(n >= 2.0) || n != std::floor(n)) throw DomainError("grid: n must be an integer >= 2");
  spec.count = static_cast<std::size_t>(n);
  if (parts.size() == 4) {
    if (parts[3] == "lin") spec.mode = GridMode::linear;
    else if (parts[3] == "log") spec.mode = GridMode::log;
    else if (parts[3] == "rand") spec.mode = GridMode::random;
    else throw DomainError("grid: unknown mode '" + std::string(parts[3]) + "'");
  }
  spec.validate();
  return spec;
}

std::map<std::string, double> parse_params(std::string_view text) {
  std::map<std::string, double> params;
  if (text.empty()) return params;
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw DomainError("params: expected key=value, got '" + std::string(item) + "'");
    }
    params[std::string(item.substr(0, eq))] = parse_double(item.substr(eq + 1), "params");
  }
  return params;
}

std::vector<double> make_grid(const GridSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> out(spec.count);
  const double last = static_cast<double>(spec.count - 1);
  switch (spec.mode) {
    case GridMode::linear:
      for (std::size_t i = 0; i < spec.count; ++i) {
        out[i] = spec.lo + (spec.hi - spec.lo) * (static_cast<double>(i) / last);
      }
      break;
    case GridMode::log: {
      const double a = std::log(spec.lo);
      const double b = std::log(spec.hi);
      for (std::size_t i = 0; i < spec.count; ++i) {
        out[i] = std::exp(a + (b - a) * (static_cast<double>(i) / last));
      }
      break;
    }
    case GridMode::random: {
      std::mt19937_64 rng(seed);
      const bool logscale = spec.lo > 0.0;
      const double a = logscale ? std::log(spec.lo) : spec.lo;
      const double b = logscale ? std::log(spec.hi) : spec.hi;
      for (auto& x : out) {
        const double t = a + (b - a) * unit_uniform(rng());
        x = logscale ? std::exp(t) : t;
      }
      std::sort(out.begin(), out.end());
      break;
    }
  }
  out.front() = spec.lo;
  if (spec.mode != GridMode::random) out.back() = spec.hi;
  return out;
}

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

double relative_error(double approx, double oracle) {
  return std::fabs(approx - oracle) / std::max(std::fabs(oracle), 1e-30);
}

double kernel_oracle(Kernel k, double x) {
  switch (kernel_info(k).input) {
    case InputKind::probability:
      if (k == Kernel::identity) return x;
      // Float kernels see the rounded input, so the reference must too.
      if (k == Kernel::icnd_f1 || k == Kernel::icnd_f2) {
        return oracle_normal_quantile(static_cast<float>(x));
      }
      return oracle_normal_quantile(x);
    case InputKind::exponential:
      if (x >= 0.0) return oracle_normal_from_exponential(x);
      return oracle_normal_quantile(1.0 - 0.5 * std::exp(-x));
    case InputKind::gaussian:
      return oracle_student_from_gaussian(x, 4.0);
  }
  throw DomainError("kernel_oracle: unknown input kind");
}

bool PrecisionReport::within_bound() const {
  return max_rel_error <= 1.2 * kernel_info(kernel).error_bound;
}

PrecisionReport run_precision(Kernel k, const std::vector<double>& inputs, int threads) {
  PrecisionReport report;
  report.kernel = k;
  const std::size_t n = inputs.size();
  std::vector<double> approx(n);
  evaluate_parallel(k, inputs, approx, threads);
  report.rows.resize(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
  const int team = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 256) num_threads(team)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const double oracle = kernel_oracle(k, inputs[i]);
      report.rows[i] = {inputs[i], approx[i], oracle, relative_error(approx[i], oracle)};
    } catch (...) {
#pragma omp critical(qrecycle_precision_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  double sum = 0.0;
  for (const auto& row : report.rows) {
    sum += row.rel_error;
    if (row.rel_error > report.max_rel_error || std::isnan(row.rel_error)) {
      report.max_rel_error = row.rel_error;
      report.worst_input = row.input;
    }
  }
  report.mean_rel_error = n > 0 ? sum / static_cast<double>(n) : 0.0;
  return report;
}

void write_precision_csv(std::ostream& os, const PrecisionReport& report) {
  os << "input,approx,oracle,rel_error\n";
  for (const auto& r : report.rows) {
    os << format17(r.input) << ',' << format17(r.approx) << ',' << format17(r.oracle) << ','
       << format17(r.rel_error) << '\n';
  }
}

// ---------------------------------------------------------------------------
// QQ maps
// ---------------------------------------------------------------------------

BaseId parse_base(std::string_view name) {
  if (name == "exponential") return BaseId::exponential;
  if (name == "gaussian" || name == "normal") return BaseId::gaussian;
  throw DomainError("unknown base '" + std::string(name) + "'");
}

TargetId parse_target(std::string_view name) {
  if (name == "hyperbolic") return TargetId::hyperbolic;
  if (name == "vg") return TargetId::vg;
  if (name == "normal") return TargetId::normal;
  if (name == "student") return TargetId::student;
  if (name == "gaussian") return TargetId::gaussian;
  throw DomainError("unknown target '" + std::string(name) + "'");
}

TwoSidedQuantileMap solve_pair(BaseId base, TargetId target,
                               const std::map<std::string, double>& params, double v_max) {
  const double step = param_or(params, "step", 1e-3);
  const double order_param = param_or(params, "order", 6.0);
  if (order_param != 4.0 && order_param != 6.0) throw DomainError("order must be 4 or 6");
  const RkOrder order = order_param == 4.0 ? RkOrder::rk4 : RkOrder::rk6;
  ProblemPair problems;
  if (base == BaseId::exponential) {
    switch (target) {
      case TargetId::hyperbolic: {
        HyperbolicParams p{param_or(params, "alpha", 1.0), param_or(params, "beta", 0.0),
                           param_or(params, "delta", 1.0)};
        p.validate();
        problems = build_hyperbolic_problems(p, hyperbolic_split(p), v_max);
        break;
      }
      case TargetId::vg: {
        VGParams p{param_or(params, "lambda", 2.0), param_or(params, "alpha", 1.0),
                   param_or(params, "beta", 0.0)};
        p.require_supported();
        problems = build_vg_problems(p, vg_split(p), v_max);
        break;
      }
      case TargetId::normal:
        problems = build_exponential_normal_problems(v_max);
        break;
      default:
        throw DomainError("unsupported pair: exponential base needs hyperbolic, vg or normal");
    }
  } else {
    switch (target) {
      case TargetId::student:
        problems = build_gaussian_student_problems(param_or(params, "n", 4.0), v_max);
        break;
      case TargetId::gaussian:
        problems = build_gaussian_identity_problems(v_max);
        break;
      default:
        throw DomainError("unsupported pair: gaussian base needs student or gaussian");
    }
  }
  return solve_two_sided(problems, step, order);
}

std::vector<QQRow> run_qqmap(const TwoSidedQuantileMap& map, const std::vector<double>& v) {
  std::vector<QQRow> rows;
  rows.reserve(v.size());
  for (double x : v) rows.push_back({x, map(x)});
  return rows;
}

void write_qqmap_csv(std::ostream& os, const std::vector<QQRow>& rows) {
  os << "v,Q,identity\n";
  for (const auto& r : rows) {
    os << format17(r.v) << ',' << format17(r.q) << ',' << format17(r.v) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kChunk = 4096;

struct Timing {
  double seconds;
  double checksum;
};

// Streams `samples` uniform inputs on [lo, hi) through kernel k in chunks.
// The identity kernel is the RNG-plus-loop baseline.
Timing time_kernel(Kernel k, double lo, double hi, std::uint64_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> in(kChunk);
  std::vector<double> out(kChunk);
  const double width = hi - lo;
  double checksum = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t done = 0; done < samples; done += kChunk) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, samples - done));
    for (std::size_t i = 0; i < m; ++i) in[i] = lo + width * unit_uniform(rng());
    evaluate_serial(k, std::span<const double>(in.data(), m), std::span<double>(out.data(), m));
    for (std::size_t i = 0; i < m; ++i) checksum += out[i];
  }
  const auto stop = std::chrono::steady_clock::now();
  return {std::chrono::duration<double>(stop - start).count(), checksum};
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

double coefficient_of_variation(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return std::fabs(mean) > 0.0 ? sd / std::fabs(mean) : 0.0;
}

}  // namespace

std::vector<BenchResult> run_bench(const BenchConfig& config) {
  if (config.samples < 1'000'000) throw DomainError("bench: samples must be >= 1e6");
  if (config.repetitions < 1) throw DomainError("bench: repetitions must be >= 1");
  const double n = static_cast<double>(config.samples);
  std::vector<BenchResult> results;
  for (Kernel k : config.kernels) {
    const auto& info = kernel_info(k);
    std::vector<double> raw;
    std::vector<double> base;
    std::vector<double> net;
    double checksum = 0.0;
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(rep);
      const Timing b = time_kernel(Kernel::identity, info.lo, info.hi, config.samples, seed);
      const Timing t = time_kernel(k, info.lo, info.hi, config.samples, seed);
      raw.push_back(t.seconds * 1e9 / n);
      base.push_back(b.seconds * 1e9 / n);
      net.push_back(raw.back() - base.back());
      checksum = t.checksum;
    }
    BenchResult r;
    r.kernel = k;
    r.raw_ns = median(raw);
    r.baseline_ns = median(base);
    r.net_ns = median(net);
    r.cv = coefficient_of_variation(net);
    r.checksum = checksum;
    results.push_back(r);
  }
  // Throughput relative to the slowest kernel, so the scale is hardware free.
  double slowest = 0.0;
  for (const auto& r : results) slowest = std::max(slowest, r.net_ns);
  for (auto& r : results) {
    r.relative_throughput = r.net_ns > 0.0 ? slowest / r.net_ns : 0.0;
  }
  return results;
}

void write_bench_table(std::ostream& os, const std::vector<BenchResult>& results) {
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %10s %8s %10s\n", "kernel", "net_ns",
                "raw_ns", "base_ns", "cv", "rel_thru");
  os << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-16s %10.3f %10.3f %10.3f %8.3f %10.2f\n",
                  std::string(kernel_info(r.kernel).name).c_str(), r.net_ns, r.raw_ns,
                  r.baseline_ns, r.cv, r.relative_throughput);
    os << line;
  }
}

void write_bench_csv(std::ostream& os, const std::vector<BenchResult>& results) {
  os << "kernel,net_ns,raw_ns,baseline_ns,cv,relative_throughput\n";
  for (const auto& r : results) {
    os << kernel_info(r.kernel).name << ',' << format17(r.net_ns) << ',' << format17(r.raw_ns)
       << ',' << format17(r.baseline_ns) << ',' << format17(r.cv) << ','
       << format17(r.relative_throughput) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

namespace {

constexpr int kExitViolation = 1;
constexpr int kExitIo = 2;

// Opens --out, "-" meaning the caller's stream. Returns nullptr on failure.
std::ostream* open_output(const std::string& path, std::ostream& fallback,
                          std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return &fallback;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  return holder->is_open() ? holder.get() : nullptr;
}

GridSpec default_grid(const KernelInfo& info) {
  GridSpec g;
  g.lo = info.lo;
  g.hi = info.hi;
  g.count = 100'000;
  g.mode = info.input == InputKind::gaussian || info.lo <= 0.0 ? GridMode::linear : GridMode::log;
  if (g.mode == GridMode::linear && info.input == InputKind::exponential && info.lo == 0.0) {
    g.lo = 1e-6;
    g.mode = GridMode::log;
  }
  return g;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantile recycling: precision sweeps, QQ maps and kernel benchmarks"};
  app.require_subcommand(1);

  std::string kernel_name;
  std::string grid_text;
  std::string params_text;
  std::string out_path;
  std::string base_name = "exponential";
  std::string target_name = "normal";
  std::uint64_t seed = 1;
  int threads = 0;
  std::uint64_t samples = 10'000'000;
  int reps = 3;
  std::string csv_path;

  auto* precision = app.add_subcommand("precision", "Kernel vs oracle sweep as CSV");
  precision->add_option("--kernel", kernel_name, "Kernel id")->required();
  precision->add_option("--grid", grid_text, "lo:hi:n[:lin|log|rand]");
  precision->add_option("--params", params_text, "Unused; accepted for symmetry");
  precision->add_option("--out", out_path, "CSV path, - for stdout");
  precision->add_option("--seed", seed, "Seed for rand grids");
  precision->add_option("--threads", threads, "Worker threads, 0 = OpenMP default");

  auto* qqmap = app.add_subcommand("qqmap", "Solved recycling map as CSV");
  qqmap->add_option("--base", base_name, "exponential or gaussian");
  qqmap->add_option("--target", target_name, "hyperbolic, vg, normal, student or gaussian");
  qqmap->add_option("--params", params_text, "alpha,beta,delta,lambda,n,step,order");
  qqmap->add_option("--grid", grid_text, "lo:hi:n[:lin]");
  qqmap->add_option("--out", out_path, "CSV path, - for stdout");
  qqmap->add_option("--seed", seed, "Seed for rand grids");

  auto* bench = app.add_subcommand("bench", "Overhead-subtracted kernel timings");
  bench->add_option("--kernel", kernel_name, "Comma-separated kernel ids, default all");
  bench->add_option("--samples", samples, "Calls per repetition (>= 1e6)");
  bench->add_option("--reps", reps, "Repetitions");
  bench->add_option("--params", params_text, "Unused; accepted for symmetry");
  bench->add_option("--out", csv_path, "CSV path for the timing table");
  bench->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*precision) {
      const auto k = parse_kernel(kernel_name);
      if (!k) {
        err << "unknown kernel '" << kernel_name << "'\n";
        return kExitViolation;
      }
      const auto& info = kernel_info(*k);
      const GridSpec grid = grid_text.empty() ? default_grid(info) : parse_grid(grid_text);
      const auto report = run_precision(*k, make_grid(grid, seed), threads);
      std::unique_ptr<std::ofstream> holder;
      std::ostream* os = open_output(out_path, out, holder);
      if (os == nullptr) {
        err << "cannot open '" << out_path << "' for writing\n";
        return kExitIo;
      }
      write_precision_csv(*os, report);
      os->flush();
      if (!*os) {
        err << "write failed for '" << out_path << "'\n";
        return kExitIo;
      }
      err << info.name << ": max rel error " << format17(report.max_rel_error) << " at "
          << format17(report.worst_input) << ", mean " << format17(report.mean_rel_error)
          << ", bound " << format17(info.error_bound) << " x 1.2\n";
      return report.within_bound() ? 0 : kExitViolation;
    }

    if (*qqmap) {
      const auto params = parse_params(params_text);
      const GridSpec grid = grid_text.empty() ? GridSpec{-5.0, 5.0, 1001, GridMode::linear}
                                              : parse_grid(grid_text);
      const auto v = make_grid(grid, seed);
      const double v_max = std::max(std::fabs(v.front()), std::fabs(v.back()));
      std::vector<QQRow> rows;
      try {
        const auto map = solve_pair(parse_base(base_name), parse_target(target_name), params,
                                    v_max);
        rows = run_qqmap(map, v);
      } catch (const MonotonicityError& e) {
        err << "ODE failure: " << e.what() << '\n';
        return kExitViolation;
      } catch (const OverflowError& e) {
        err << "ODE failure: " << e.what() << '\n';
        return kExitViolation;
      }
      std::unique_ptr<std::ofstream> holder;
      std::ostream* os = open_output(out_path, out, holder);
      if (os == nullptr) {
        err << "cannot open '" << out_path << "' for writing\n";
        return kExitIo;
      }
      write_qqmap_csv(*os, rows);
      os->flush();
      return *os ? 0 : kExitIo;
    }

    if (*bench) {
      BenchConfig cfg;
      cfg.samples = samples;
      cfg.repetitions = reps;
      cfg.seed = seed;
      if (kernel_name.empty() || kernel_name == "all") {
        for (const auto& info : kernel_table()) cfg.kernels.push_back(info.id);
      } else {
        for (auto name : split(kernel_name, ',')) {
          const auto k = parse_kernel(name);
          if (!k) {
            err << "unknown kernel '" << name << "'\n";
            return kExitViolation;
          }
          cfg.kernels.push_back(*k);
        }
      }
      const auto results = run_bench(cfg);
      write_bench_table(out, results);
      for (const auto& r : results) {
        if (r.cv > 0.10) {
          err << "warning: " << kernel_info(r.kernel).name << " timing CV "
              << format17(r.cv) << " exceeds 10%\n";
        }
      }
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) {
          err << "cannot open '" << csv_path << "' for writing\n";
          return kExitIo;
        }
        write_bench_csv(csv, results);
        if (!csv) return kExitIo;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitViolation;
  }
  return 0;
}

}  // namespace qrecycle::cli
