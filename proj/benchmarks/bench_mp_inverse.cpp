#include <random>

#include <benchmark/benchmark.h>

#include "tpinv/deblur.hpp"
#include "tpinv/gen_inverse.hpp"
#include "tpinv/tensor.hpp"

namespace {

tpinv::DenseTensor random_tensor(const tpinv::Dims& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  tpinv::DenseTensor t(dims);
  for (double& v : t.data()) v = u(rng);
  return t;
}

void mp_inverse_on(benchmark::State& state, tpinv::Route route) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tpinv::DenseTensor a = random_tensor({n, n, 8}, 1);
  tpinv::InverseOptions opts;
  opts.route = route;
  for (auto _ : state) benchmark::DoNotOptimize(tpinv::mp_inverse(a, opts));
  state.SetComplexityN(state.range(0));
}

void BM_MpInverseCholesky(benchmark::State& state) { mp_inverse_on(state, tpinv::Route::cholesky); }
void BM_MpInverseSvd(benchmark::State& state) { mp_inverse_on(state, tpinv::Route::svd); }

void BM_Tprod(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tpinv::DenseTensor a = random_tensor({n, n, 8}, 2), b = random_tensor({n, n, 8}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(tpinv::tprod(a, b));
  state.SetComplexityN(state.range(0));
}

void BM_DeblurPrepare(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = tpinv::deblur::build_blur_model(n, 4.0, 6, {0.8, 0.1, 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(tpinv::deblur::prepare_reconstruction(model));
}

}  // namespace

BENCHMARK(BM_MpInverseCholesky)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_MpInverseSvd)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_Tprod)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_DeblurPrepare)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
