#include <benchmark/benchmark.h>

#include "cvconv/convolution.hpp"
#include "cvconv/rng.hpp"

using namespace cvconv;

namespace {

struct Case {
  ConvFilter filter;
  std::vector<int32_t> window;
};

Case make_case(int k) {
  Xoshiro256pp rng(12);
  std::vector<int8_t> w(static_cast<size_t>(k));
  std::vector<int32_t> a(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    w[size_t(j)] = int8_t(rng.next_int(-128, 127));
    a[size_t(j)] = int32_t(rng.next_below(256));
  }
  return Case{ConvFilter(std::move(w), 0), std::move(a)};
}

}  // namespace

static void BM_ConvAccurate(benchmark::State& state) {
  const Case c = make_case(int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv_accurate(c.filter, c.window));
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ConvAccurate)->Arg(64)->Arg(576);

static void BM_ConvApproxCV(benchmark::State& state) {
  const Case c = make_case(int(state.range(0)));
  const PerforationConfig cfg{.m = 2, .control_variate = true};
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv_approx(c.filter, c.window, cfg).g_star);
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ConvApproxCV)->Arg(64)->Arg(576);

BENCHMARK_MAIN();
