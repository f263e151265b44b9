#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "cvconv/engine.hpp"
#include "cvconv/rng.hpp"
#include "cvconv/systolic.hpp"

using namespace cvconv;
using namespace cvconv::systolic;

namespace {

ArrayConfig approx_cfg(int n, int m, bool cv = true) {
  return ArrayConfig{.n = n, .m = m, .mode = ArrayMode::ApproxCV, .control_variate = cv};
}

ArrayConfig accurate_cfg(int n) {
  return ArrayConfig{.n = n, .m = 0, .mode = ArrayMode::Accurate};
}

}  // namespace

TEST_CASE("mac_star_step worked examples") {
  const ArrayWidths w = ArrayWidths::derive(approx_cfg(16, 2));
  auto s = mac_star_step(3, 7, MacStarState{}, 2, w);
  CHECK(s.sum == 3);  // 3 * (7 >> 2)
  CHECK(s.sum_x == 3);

  const ArrayWidths w0 = ArrayWidths::derive(accurate_cfg(16));
  s = mac_star_step(-5, 201, MacStarState{}, 0, w0);
  CHECK(s.sum == -1005);
  CHECK(s.sum_x == 0);

  const ArrayWidths w1 = ArrayWidths::derive(approx_cfg(16, 1));
  s = mac_star_step(-2, 255, MacStarState{.sum = 10, .sum_x = 5}, 1, w1);
  CHECK(s.sum == -244);
  CHECK(s.sum_x == 6);
}

TEST_CASE("mac_plus worked examples") {
  const ArrayWidths w1 = ArrayWidths::derive(approx_cfg(16, 1));
  CHECK(mac_plus(6, 2, 1, 0, 1, w1) == 14);

  const ArrayWidths w2 = ArrayWidths::derive(approx_cfg(16, 2));
  CHECK(mac_plus(0, 0, 77, 5, 2, w2) == 1);  // only B[1:0] = 1 survives here

  // m=0: sumX is always 0 and the result is just the partial sum
  const ArrayWidths w0 = ArrayWidths::derive(approx_cfg(16, 0));
  CHECK(mac_plus(12345, 0, 66, 0, 0, w0) == 12345);
}

TEST_CASE("bias reconstruction: seeding B>>m plus the B LSBs is exact") {
  for (int n : {8, 64}) {
    for (int m = 0; m <= 7; ++m) {
      const ArrayConfig cfg = approx_cfg(n, m);
      const ArrayWidths w = ArrayWidths::derive(cfg);
      for (int32_t bias = -3000; bias <= 3000; bias += 37) {
        // a single zero-activation MAC* pass leaves sum at the seed
        const int64_t seeded = bias >> m;
        CHECK(mac_plus(seeded, 0, 99, bias, m, w) == bias);
      }
    }
  }
}

TEST_CASE("declared widths: no overflow across worst-case stimulus, k=N") {
  for (int n : {8, 16, 32, 64}) {
    for (int m = 0; m <= 7; ++m) {
      const ArrayConfig cfg = approx_cfg(n, m);
      const ArrayWidths widths = ArrayWidths::derive(cfg);
      // all activations 255, all weights at the magnitude extreme -128
      for (int8_t wv : {int8_t(-128), int8_t(127)}) {
        MacStarState st{.sum = 0, .sum_x = 0};
        for (int j = 0; j < n; ++j) {
          CHECK_NOTHROW(st = mac_star_step(wv, 255, st, m, widths));
        }
        CHECK(st.sum_x <= int64_t(n) * ((1 << m) - 1));
        CHECK_NOTHROW(mac_plus(st.sum, st.sum_x, wv, 0, m, widths));
      }
    }
  }
}

TEST_CASE("width violations are hard errors") {
  const ArrayConfig cfg = approx_cfg(8, 3);
  const ArrayWidths w = ArrayWidths::derive(cfg);
  // sum width for N=8, m=3 is ceil(log2(8*65535)) - 3 = 19 - 3 bits
  CHECK(w.sum_bits == 16);
  MacStarState big{.sum = (int64_t(1) << 16) - 1, .sum_x = 0};
  CHECK_THROWS_AS(mac_star_step(127, 255, big, 3, w), std::overflow_error);
  CHECK_THROWS_AS(mac_plus((int64_t(1) << 30), 0, 0, 0, 3, w), std::overflow_error);
}

namespace {

struct RandomLayer {
  QuantModel model;  // single MAC layer wrapped in a model for the functional path
  QTensor input;
};

RandomLayer random_conv_layer(Xoshiro256pp& rng, bool force_tiling, int n) {
  const int c_in = force_tiling ? 2 + int(rng.next_below(3)) : 1 + int(rng.next_below(2));
  const int kernel = force_tiling ? 3 + int(rng.next_below(3)) : 1 + int(rng.next_below(3));
  const int side = kernel + 1 + int(rng.next_below(5));
  const int c_out = 1 + int(rng.next_below(2 * n));
  const int stride = 1 + int(rng.next_below(2));
  const Padding pad = rng.next_below(2) ? Padding::Same : Padding::Valid;
  const int k = kernel * kernel * c_in;

  std::vector<ConvFilter> filters;
  for (int f = 0; f < c_out; ++f) {
    std::vector<int8_t> w(static_cast<size_t>(k));
    for (auto& v : w) v = int8_t(rng.next_int(-128, 127));
    filters.emplace_back(std::move(w), int32_t(rng.next_int(-4096, 4096)));
  }
  std::optional<int> shift;
  if (rng.next_below(2)) shift = 4 + int(rng.next_below(6));

  QuantModel model({side, side, c_in},
                   {LayerSpec::conv2d(kernel, stride, pad, std::move(filters), shift)});
  std::vector<int32_t> in(size_t(side) * side * c_in);
  for (auto& v : in) v = int32_t(rng.next_below(256));
  return RandomLayer{std::move(model), QTensor({side, side, c_in}, std::move(in), Role::Activation)};
}

}  // namespace

TEST_CASE("bit-exact oracle equivalence against the functional engine") {
  Xoshiro256pp rng(59);
  int checked = 0;
  for (int n : {8, 16, 32, 64}) {
    for (int m = 0; m <= 3; ++m) {
      for (int rep = 0; rep < 4; ++rep) {
        const bool tile = rep >= 2;  // force k > N cases regularly
        RandomLayer rl = random_conv_layer(rng, tile, n);
        for (bool cv : {true, false}) {
          const auto functional =
              run_model_approx(rl.model, rl.input, {.m = m, .control_variate = cv});
          const auto sim =
              simulate_layer(approx_cfg(n, m, cv), rl.model.layers()[0], rl.input);
          CHECK(sim.output.data() == functional.logits);
          ++checked;
        }
      }
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("accurate array mode equals the accurate engine") {
  Xoshiro256pp rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    RandomLayer rl = random_conv_layer(rng, rep % 2 == 1, 16);
    const auto accurate = run_model_accurate(rl.model, rl.input);
    const auto sim = simulate_layer(accurate_cfg(16), rl.model.layers()[0], rl.input);
    CHECK(sim.output.data() == accurate.logits);
    CHECK(sim.cycles.overhead_cycles == 0);
  }
}

TEST_CASE("ApproxCV costs exactly one extra cycle per layer") {
  Xoshiro256pp rng(67);
  for (int rep = 0; rep < 10; ++rep) {
    RandomLayer rl = random_conv_layer(rng, rep % 3 == 0, 16);
    const auto acc = simulate_layer(accurate_cfg(16), rl.model.layers()[0], rl.input);
    for (int m = 0; m <= 3; ++m) {
      const auto apx = simulate_layer(approx_cfg(16, m), rl.model.layers()[0], rl.input);
      CHECK(apx.cycles.cycles == acc.cycles.cycles + 1);
      CHECK(apx.cycles.overhead_cycles == 1);
    }
  }
}

TEST_CASE("dense layers run on the array and tile over k") {
  Xoshiro256pp rng(71);
  const int d = 100;  // > N = 16, forces 7 k-tiles
  std::vector<ConvFilter> filters;
  for (int f = 0; f < 5; ++f) {
    std::vector<int8_t> w(static_cast<size_t>(d));
    for (auto& v : w) v = int8_t(rng.next_int(-128, 127));
    filters.emplace_back(std::move(w), int32_t(rng.next_int(-500, 500)));
  }
  QuantModel model({d}, {LayerSpec::dense(std::move(filters))});
  std::vector<int32_t> in(static_cast<size_t>(d));
  for (auto& v : in) v = int32_t(rng.next_below(256));
  const QTensor x({d}, std::move(in), Role::Activation);

  for (int m = 0; m <= 3; ++m) {
    for (bool cv : {true, false}) {
      const auto functional = run_model_approx(model, x, {.m = m, .control_variate = cv});
      const auto sim = simulate_layer(approx_cfg(16, m, cv), model.layers()[0], x);
      CHECK(sim.output.data() == functional.logits);
    }
  }
}

TEST_CASE("sumX never exceeds N*(2^m - 1) on random stimulus") {
  Xoshiro256pp rng(73);
  for (int m = 1; m <= 7; ++m) {
    const ArrayConfig cfg = approx_cfg(8, m);
    const ArrayWidths w = ArrayWidths::derive(cfg);
    MacStarState st;
    for (int j = 0; j < 8; ++j) {
      st = mac_star_step(int8_t(rng.next_int(-128, 127)), int32_t(rng.next_below(256)), st, m, w);
      CHECK(st.sum_x <= int64_t(8) * ((1 << m) - 1));
    }
  }
}

TEST_CASE("trace emits one row per MAC step plus the MAC+ drains") {
  Xoshiro256pp rng(79);
  RandomLayer rl = random_conv_layer(rng, false, 8);
  const auto& layer = rl.model.layers()[0];
  const ConvWindows cw = gather_conv_windows(rl.input, layer.kernel, layer.stride, layer.padding);
  const int64_t mac_steps = int64_t(cw.positions()) * int(layer.filters.size()) * cw.k;

  int64_t star_rows = 0, plus_rows = 0;
  int64_t max_cycle = 0;
  const auto sim = simulate_layer(approx_cfg(8, 2), layer, rl.input, [&](const TraceRow& r) {
    if (std::string_view(r.unit) == "mac*") ++star_rows;
    if (std::string_view(r.unit) == "mac+") ++plus_rows;
    max_cycle = std::max(max_cycle, r.cycle);
  });
  CHECK(star_rows == mac_steps);
  CHECK(plus_rows == int64_t(cw.positions()) * int(layer.filters.size()));
  CHECK(max_cycle <= sim.cycles.cycles);
}

TEST_CASE("run_model_systolic matches the functional engine end to end") {
  // a small 2-conv + dense pipeline, k > N in the dense stage
  Xoshiro256pp rng(83);
  std::vector<ConvFilter> conv1;
  for (int f = 0; f < 3; ++f) {
    std::vector<int8_t> w(9);
    for (auto& v : w) v = int8_t(rng.next_int(-30, 30));
    conv1.emplace_back(std::move(w), int32_t(rng.next_int(-50, 50)));
  }
  std::vector<ConvFilter> dense;
  for (int f = 0; f < 4; ++f) {
    std::vector<int8_t> w(48);
    for (auto& v : w) v = int8_t(rng.next_int(-60, 60));
    dense.emplace_back(std::move(w), 0);
  }
  QuantModel model({6, 6, 1}, {LayerSpec::conv2d(3, 1, Padding::Valid, conv1, 5),
                               LayerSpec::dense(dense)});
  std::vector<int32_t> in(36);
  for (auto& v : in) v = int32_t(rng.next_below(256));
  const QTensor x({6, 6, 1}, std::move(in), Role::Activation);

  for (int m = 0; m <= 3; ++m) {
    for (bool cv : {true, false}) {
      const auto functional = run_model_approx(model, x, {.m = m, .control_variate = cv});
      const auto sim = run_model_systolic(model, x, approx_cfg(16, m, cv));
      CHECK(sim.result.logits == functional.logits);
      CHECK(sim.mac_layers.size() == 2);
      for (const auto& c : sim.mac_layers) CHECK(c.overhead_cycles == 1);
    }
  }

  const auto acc_fn = run_model_accurate(model, x);
  const auto acc_sim = run_model_systolic(model, x, accurate_cfg(16));
  CHECK(acc_sim.result.logits == acc_fn.logits);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((ArrayConfig{.n = 2, .m = 0}).check(), std::invalid_argument);
  CHECK_THROWS_AS((ArrayConfig{.n = 16, .m = 8, .mode = ArrayMode::ApproxCV}).check(),
                  std::invalid_argument);
  CHECK_THROWS_AS((ArrayConfig{.n = 16, .m = 2, .mode = ArrayMode::Accurate}).check(),
                  std::invalid_argument);
  QTensor t({2}, {1, 2}, Role::Activation);
  CHECK_THROWS_AS(simulate_layer(accurate_cfg(16), LayerSpec::relu(), t), std::invalid_argument);
}
