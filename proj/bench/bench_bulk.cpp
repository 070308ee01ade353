// Serial vs OpenMP bulk evaluation: wall time per element and a bitwise
// comparison of the two output arrays for every kernel.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "qrecycle/bulk.hpp"

using namespace qrecycle;

namespace {

template <class F>
double best_seconds(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel bulk kernel evaluation"};
  std::size_t size = 10'000'000;
  int reps = 3;
  int threads = 0;
  app.add_option("--size", size, "Elements per array")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "Repetitions, best time kept")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (0 = default)");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads %d, %zu elements, best of %d\n",
              threads > 0 ? threads : omp_get_max_threads(), size, reps);
  std::printf("%-16s %12s %12s %8s %10s\n", "kernel", "serial_ns", "parallel_ns", "speedup",
              "identical");

  std::mt19937_64 rng(1);
  std::vector<double> in(size);
  std::vector<double> serial(size);
  std::vector<double> parallel(size);
  bool all_identical = true;
  for (const auto& info : kernel_table()) {
    std::uniform_real_distribution<double> unif(info.lo, info.hi);
    for (auto& x : in) x = unif(rng);
    const double ts = best_seconds(reps, [&] { evaluate_serial(info.id, in, serial); });
    const double tp = best_seconds(reps, [&] { evaluate_parallel(info.id, in, parallel, threads); });
    const bool identical =
        std::memcmp(serial.data(), parallel.data(), size * sizeof(double)) == 0;
    all_identical = all_identical && identical;
    const double n = static_cast<double>(size);
    std::printf("%-16.*s %12.3f %12.3f %8.2f %10s\n", static_cast<int>(info.name.size()),
                info.name.data(), ts / n * 1e9, tp / n * 1e9, ts / tp, identical ? "yes" : "NO");
  }
  return all_identical ? 0 : 1;
}
