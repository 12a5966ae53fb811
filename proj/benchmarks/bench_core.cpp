#include <benchmark/benchmark.h>

#include <string>

#include "squish/cispace.hpp"
#include "squish/eigensolver.hpp"
#include "squish/rdm.hpp"
#include "squish/squish.hpp"

namespace {

const squish::IntegralTable& lih() {
  static const auto t = squish::read_fcidump(std::string(SQUISH_FIXTURE_DIR) + "/lih_sto3g.fcidump");
  return t;
}

const squish::CiBasis& lih_basis() {
  static const auto b = squish::enumerate_basis(squish::Sector::from_header(lih().header()));
  return b;
}

void BM_BuildMatrix(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(squish::build_matrix(lih_basis(), lih()));
}
BENCHMARK(BM_BuildMatrix)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& state) {
  const auto mat = squish::build_matrix(lih_basis(), lih());
  squish::EigenOptions opts;
  opts.dense_threshold = state.range(0) ? 0 : 1500;
  for (auto _ : state) benchmark::DoNotOptimize(squish::lowest_eigenpairs(mat, 1, 1e-9, opts));
}
BENCHMARK(BM_GroundState)->Arg(0)->Arg(1)->ArgNames({"davidson"})->Unit(benchmark::kMillisecond);

void BM_BuildRdms(benchmark::State& state) {
  const auto st = squish::lowest_eigenpairs(squish::build_matrix(lih_basis(), lih()), 1, 1e-9)[0];
  for (auto _ : state) benchmark::DoNotOptimize(squish::build_rdms(st, lih_basis()));
}
BENCHMARK(BM_BuildRdms)->Unit(benchmark::kMillisecond);

void BM_SquishLiH(benchmark::State& state) {
  squish::SquishConfig cfg;
  cfg.convergence = squish::ConvergenceRef::exact;
  cfg.delta = squish::kChemicalAccuracy;
  for (auto _ : state) benchmark::DoNotOptimize(squish::run_squish(lih(), cfg));
}
BENCHMARK(BM_SquishLiH)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
