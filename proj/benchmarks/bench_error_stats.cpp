#include <benchmark/benchmark.h>

#include "cvconv/error_stats.hpp"
#include "cvconv/rng.hpp"

using namespace cvconv;

namespace {

std::vector<int8_t> weights(int k) {
  Xoshiro256pp rng(33);
  std::vector<int8_t> w(static_cast<size_t>(k));
  for (auto& v : w) v = int8_t(rng.next_int(-128, 127));
  return w;
}

}  // namespace

static void BM_McConvError(benchmark::State& state) {
  const auto w = weights(64);
  for (auto _ : state) {
    const auto st = mc_conv_error(w, 0,
                                  McConfig{.perforation = {.m = 2, .control_variate = true},
                                           .c_mode = CMode::ExactRational,
                                           .trials = uint64_t(state.range(0)),
                                           .seed = 9,
                                           .jobs = int(state.range(1))});
    benchmark::DoNotOptimize(st.empirical_variance);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_McConvError)->Args({100000, 1})->Args({100000, 4});

static void BM_ExhaustiveConvError(benchmark::State& state) {
  const auto w = weights(int(state.range(0)));
  for (auto _ : state) {
    const auto st = exhaustive_conv_error(w, {.m = 3, .control_variate = true},
                                          CMode::ExactRational);
    benchmark::DoNotOptimize(st.empirical_variance);
  }
}
BENCHMARK(BM_ExhaustiveConvError)->Arg(6)->Arg(8);

BENCHMARK_MAIN();
