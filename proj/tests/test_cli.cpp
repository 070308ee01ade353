#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qrecycle/cli.hpp"
#include "qrecycle/errors.hpp"
#include "qrecycle/oracle.hpp"

using namespace qrecycle;
using namespace qrecycle::cli;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qrecycle");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qrecycle_test_" + name);
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = parse_grid("1e-6:37:1000:log");
  CHECK(g.lo == 1e-6);
  CHECK(g.hi == 37.0);
  CHECK(g.count == 1000);
  CHECK(g.mode == GridMode::log);
  CHECK(parse_grid("-5:5:11").mode == GridMode::linear);
  CHECK(parse_grid("0:1:5:rand").mode == GridMode::random);
  CHECK_THROWS_AS(parse_grid("1:2"), DomainError);
  CHECK_THROWS_AS(parse_grid("1:2:1"), DomainError);
  CHECK_THROWS_AS(parse_grid("2:1:10"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:10:log"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:10:cubic"), DomainError);
  CHECK_THROWS_AS(parse_grid("a:1:10"), DomainError);
  CHECK_THROWS_AS(parse_grid("0:1:2.5"), DomainError);
}

TEST_CASE("grids") {
  const auto lin = make_grid(parse_grid("-1:1:5"));
  CHECK(lin == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  const auto lg = make_grid(parse_grid("1e-3:10:5:log"));
  CHECK(lg.front() == 1e-3);
  CHECK(lg.back() == 10.0);
  CHECK(std::fabs(lg[2] - 0.1) < 1e-15);
  const auto r1 = make_grid(parse_grid("1e-6:1:100:rand"), 7);
  const auto r2 = make_grid(parse_grid("1e-6:1:100:rand"), 7);
  const auto r3 = make_grid(parse_grid("1e-6:1:100:rand"), 8);
  CHECK(r1 == r2);
  CHECK(r1 != r3);
  CHECK(std::is_sorted(r1.begin(), r1.end()));
  CHECK(r1.back() < 1.0);
}

TEST_CASE("params") {
  const auto p = parse_params("alpha=1.5,beta=-0.25,n=4");
  CHECK(p.at("alpha") == 1.5);
  CHECK(p.at("beta") == -0.25);
  CHECK(p.at("n") == 4.0);
  CHECK(parse_params("").empty());
  CHECK_THROWS_AS(parse_params("alpha"), DomainError);
  CHECK_THROWS_AS(parse_params("=3"), DomainError);
  CHECK_THROWS_AS(parse_params("alpha=x"), DomainError);
}

TEST_CASE("relative error") {
  CHECK(relative_error(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1e-31, 0.0) == doctest::Approx(0.1));
}

TEST_CASE("precision report") {
  const auto grid = make_grid(parse_grid("1e-6:37:2000:log"));
  const auto one = run_precision(Kernel::q77, grid, 1);
  const auto many = run_precision(Kernel::q77, grid, 4);
  REQUIRE(one.rows.size() == grid.size());
  CHECK(one.within_bound());
  CHECK(one.max_rel_error <= 1.06e-9 * 1.2);
  CHECK(one.mean_rel_error <= one.max_rel_error);
  std::ostringstream a;
  std::ostringstream b;
  write_precision_csv(a, one);
  write_precision_csv(b, many);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("input,approx,oracle,rel_error\n", 0) == 0);
  CHECK(kernel_oracle(Kernel::identity, 0.3) == 0.3);
}

TEST_CASE("precision command exit codes") {
  const auto path = temp_path("precision.csv");
  auto ok = invoke({"precision", "--kernel", "q77", "--grid", "1e-6:37:5000:log", "--out",
                    path.string()});
  CHECK(ok.code == 0);
  const auto csv = read_file(path);
  CHECK(csv.rfind("input,approx,oracle,rel_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5001);
  // Deterministic.
  invoke({"precision", "--kernel", "q77", "--grid", "1e-6:37:5000:log", "--out", path.string()});
  CHECK(read_file(path) == csv);
  std::filesystem::remove(path);

  // f2 run outside its validated domain violates the bound.
  auto bad = invoke({"precision", "--kernel", "icnd_f2", "--grid", "1e-12:0.5:200:log", "--out",
                     "-"});
  CHECK(bad.code == 1);
  auto io = invoke({"precision", "--kernel", "q77", "--grid", "1:2:10", "--out",
                    "/nonexistent-dir/x.csv"});
  CHECK(io.code == 2);
  CHECK(invoke({"precision", "--kernel", "bogus"}).code == 1);
  CHECK(invoke({"precision", "--kernel", "q77", "--grid", "bad"}).code == 1);
  CHECK(invoke({"precision", "--kernel", "student4", "--grid", "-8:8:2001"}).code == 0);
  CHECK(invoke({"precision", "--kernel", "icnd_f2_double", "--grid", "0.001:0.999:4001"}).code ==
        0);
}

TEST_CASE("qqmap command") {
  auto r = invoke({"qqmap", "--base", "exponential", "--target", "hyperbolic", "--params",
                   "alpha=1,beta=0,delta=1", "--grid", "-5:5:11"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("v,Q,identity\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 12);
  CHECK(r.out.find("\n0,0,0\n") != std::string::npos);

  const auto normal = solve_pair(BaseId::exponential, TargetId::normal, {}, 10.0);
  CHECK(std::fabs(normal(3.0) - oracle_normal_from_exponential(3.0)) < 1e-8);
  const auto student = solve_pair(BaseId::gaussian, TargetId::student, {{"n", 4.0}}, 6.0);
  CHECK(std::fabs(student(1.0) - 1.1416266) < 2e-5);
  const auto rk4 = solve_pair(BaseId::gaussian, TargetId::gaussian, {{"order", 4.0}}, 2.0);
  CHECK(std::fabs(rk4(1.5) - 1.5) < 1e-10);

  CHECK(invoke({"qqmap", "--base", "gaussian", "--target", "vg"}).code == 1);
  CHECK(invoke({"qqmap", "--base", "exponential", "--target", "vg", "--params", "lambda=0.5"})
            .code == 1);
  CHECK(invoke({"qqmap", "--base", "exponential", "--target", "normal", "--out",
                "/nonexistent-dir/q.csv"})
            .code == 2);
  CHECK_THROWS_AS(parse_base("cauchy"), DomainError);
  CHECK_THROWS_AS(parse_target("cauchy"), DomainError);
}

TEST_CASE("bench command") {
  BenchConfig cfg;
  cfg.kernels = {Kernel::identity, Kernel::q77};
  cfg.samples = 1'000'000;
  cfg.repetitions = 2;
  const auto results = run_bench(cfg);
  REQUIRE(results.size() == 2);
  CHECK(results[1].raw_ns > 0.0);
  CHECK(std::isfinite(results[1].net_ns));
  CHECK(std::isfinite(results[1].checksum));
  cfg.samples = 1000;
  CHECK_THROWS_AS(run_bench(cfg), DomainError);

  const auto path = temp_path("bench.csv");
  auto r = invoke({"bench", "--kernel", "identity,icnd_double", "--samples", "1000000", "--reps",
                   "1", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("icnd_double") != std::string::npos);
  const auto csv = read_file(path);
  CHECK(csv.rfind("kernel,net_ns,raw_ns,baseline_ns,cv,relative_throughput\n", 0) == 0);
  std::filesystem::remove(path);
  CHECK(invoke({"bench", "--kernel", "nope", "--samples", "1000000"}).code == 1);
  CHECK(invoke({"bench", "--samples", "10"}).code == 1);
}

TEST_CASE("argument errors") {
  CHECK(invoke({}).code != 0);
  CHECK(invoke({"precision"}).code != 0);
  CHECK(invoke({"--help"}).code == 0);
}
