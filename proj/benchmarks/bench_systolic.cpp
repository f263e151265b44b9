#include <benchmark/benchmark.h>

#include "cvconv/rng.hpp"
#include "cvconv/systolic.hpp"

using namespace cvconv;

namespace {

struct LayerCase {
  LayerSpec layer;
  QTensor input;
};

LayerCase make_conv(int side, int c_in, int c_out) {
  Xoshiro256pp rng(21);
  std::vector<ConvFilter> filters;
  const int k = 9 * c_in;
  for (int f = 0; f < c_out; ++f) {
    std::vector<int8_t> w(static_cast<size_t>(k));
    for (auto& v : w) v = int8_t(rng.next_int(-128, 127));
    filters.emplace_back(std::move(w), 0);
  }
  std::vector<int32_t> in(size_t(side) * side * c_in);
  for (auto& v : in) v = int32_t(rng.next_below(256));
  return LayerCase{LayerSpec::conv2d(3, 1, Padding::Same, std::move(filters)),
                   QTensor({side, side, c_in}, std::move(in), Role::Activation)};
}

}  // namespace

static void BM_SimulateLayerApprox(benchmark::State& state) {
  const LayerCase c = make_conv(int(state.range(0)), 8, 16);
  const systolic::ArrayConfig cfg{
      .n = 16, .m = 2, .mode = systolic::ArrayMode::ApproxCV, .control_variate = true};
  for (auto _ : state) {
    benchmark::DoNotOptimize(systolic::simulate_layer(cfg, c.layer, c.input).output.data());
  }
}
BENCHMARK(BM_SimulateLayerApprox)->Arg(8)->Arg(16);

static void BM_SimulateLayerAccurate(benchmark::State& state) {
  const LayerCase c = make_conv(int(state.range(0)), 8, 16);
  const systolic::ArrayConfig cfg{.n = 16, .m = 0, .mode = systolic::ArrayMode::Accurate};
  for (auto _ : state) {
    benchmark::DoNotOptimize(systolic::simulate_layer(cfg, c.layer, c.input).output.data());
  }
}
BENCHMARK(BM_SimulateLayerAccurate)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
