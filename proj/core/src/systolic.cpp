#include "cvconv/systolic.hpp"

#include <stdexcept>
#include <string>

#include "cvconv/hw_cost.hpp"

namespace cvconv {
namespace systolic {

namespace {

constexpr int64_t kTraceStepCap = 1 << 22;  // trace is for desk-scale layers only

void check_signed_width(int64_t v, int bits, const char* what) {
  const int64_t lo = -(int64_t(1) << (bits - 1));
  const int64_t hi = (int64_t(1) << (bits - 1)) - 1;
  if (v < lo || v > hi) {
    throw std::overflow_error(std::string(what) + " " + std::to_string(v) +
                              " exceeds declared " + std::to_string(bits) +
                              "-bit width (modeling bug or unsupported operand range)");
  }
}

void check_unsigned_width(int64_t v, int bits, const char* what) {
  const int64_t hi = (int64_t(1) << bits) - 1;
  if (v < 0 || v > hi) {
    throw std::overflow_error(std::string(what) + " " + std::to_string(v) +
                              " exceeds declared " + std::to_string(bits) + "-bit width");
  }
}

int32_t check_i32(int64_t v, const char* what) {
  if (v < INT32_MIN || v > INT32_MAX) {
    throw std::overflow_error(std::string(what) + ": 32-bit overflow");
  }
  return int32_t(v);
}

}  // namespace

void ArrayConfig::check() const {
  if (n < 4 || n > 256) throw std::invalid_argument("array size N must be in [4,256]");
  if (m < 0 || m > 7) throw std::invalid_argument("perforation depth m must be in [0,7]");
  if (mode == ArrayMode::Accurate && m != 0) {
    throw std::invalid_argument("accurate array mode requires m = 0");
  }
}

ArrayWidths ArrayWidths::derive(const ArrayConfig& cfg) {
  cfg.check();
  ArrayWidths w;
  w.out_bits = ceil_log2(int64_t(cfg.n) * ((int64_t(1) << 16) - 1));
  if (cfg.mode == ArrayMode::Accurate) {
    w.sum_bits = w.out_bits;
    w.sumx_bits = 0;
  } else {
    w.sum_bits = w.out_bits - cfg.m;
    // Capacity for the maximum count N*(2^m - 1) itself; differs from the
    // cost model's ceil(log2(N*(2^m-1))) only when that product is an exact
    // power of two.
    w.sumx_bits = cfg.m == 0 ? 0 : ceil_log2(int64_t(cfg.n) * ((1 << cfg.m) - 1) + 1);
  }
  return w;
}

MacStarState mac_star_step(int32_t w, int32_t a, const MacStarState& in, int m,
                           const ArrayWidths& widths) {
  if (uint32_t(a) > 255u) throw std::invalid_argument("mac*: activation outside [0,255]");
  if (w < -128 || w > 127) throw std::invalid_argument("mac*: weight outside [-128,127]");
  MacStarState out;
  out.sum = in.sum + int64_t(w) * (a >> m);
  out.sum_x = in.sum_x + (a & ((1 << m) - 1));
  check_signed_width(out.sum, widths.sum_bits, "mac* sum");
  if (m > 0) check_unsigned_width(out.sum_x, widths.sumx_bits, "mac* sumX");
  return out;
}

int32_t mac_plus(int64_t sum_n, int64_t sum_x_n, int32_t c_q, int32_t bias, int m,
                 const ArrayWidths& widths) {
  const int64_t bias_lsb = int64_t(bias) - ((int64_t(bias) >> m) << m);  // B mod 2^m
  const int64_t g = ((sum_n << m) | bias_lsb) + int64_t(c_q) * sum_x_n;
  check_signed_width(g, widths.out_bits, "mac+ result");
  return int32_t(g);
}

namespace {

struct LayerGeometry {
  int positions = 0;
  int cout = 0;
  int k = 0;
};

// Per-pass cycle count of a weight-stationary pass: N cycles of pipeline
// fill, then one streamed output per window.
int64_t pass_cycles(int n, int positions) { return int64_t(n) + positions; }

}  // namespace

LayerSim simulate_layer(const ArrayConfig& cfg, const LayerSpec& layer, const QTensor& input,
                        const TraceSink& trace) {
  cfg.check();
  if (!layer.is_mac_layer()) {
    throw std::invalid_argument("simulate_layer: layer must be conv2d or dense");
  }
  const bool approx = cfg.mode == ArrayMode::ApproxCV;
  const int m = approx ? cfg.m : 0;
  const ArrayWidths widths = ArrayWidths::derive(cfg);
  const int n = cfg.n;

  ConvWindows cw;
  if (layer.kind == LayerKind::Conv2D) {
    cw = gather_conv_windows(input, layer.kernel, layer.stride, layer.padding);
  } else {
    cw.out_h = 1;
    cw.out_w = 1;
    cw.k = int(input.size());
    cw.data = input.data();
    if (input.role() != Role::Activation) {
      throw std::invalid_argument("simulate_layer: dense expects activation input");
    }
  }

  const LayerGeometry geo{cw.positions(), int(layer.filters.size()), cw.k};
  const int n_ktiles = (geo.k + n - 1) / n;
  const int n_ctiles = (geo.cout + n - 1) / n;

  if (trace) {
    const int64_t steps = int64_t(geo.positions) * geo.cout * geo.k;
    if (steps > kTraceStepCap) {
      throw std::invalid_argument("simulate_layer: layer too large for trace output");
    }
  }

  std::vector<int32_t> out(size_t(geo.positions) * geo.cout, 0);

  // partial sums across k-tiles, carried at full 32-bit precision
  std::vector<int64_t> carry_sum(size_t(geo.positions));
  std::vector<int64_t> carry_sumx(size_t(geo.positions));

  for (int ct = 0; ct < n_ctiles; ++ct) {
    const int f_lo = ct * n;
    const int f_hi = std::min(f_lo + n, geo.cout);
    for (int f = f_lo; f < f_hi; ++f) {
      const ConvFilter& filter = layer.filters[size_t(f)];
      const int array_row = f - f_lo;
      std::fill(carry_sum.begin(), carry_sum.end(), 0);
      std::fill(carry_sumx.begin(), carry_sumx.end(), 0);

      for (int kt = 0; kt < n_ktiles; ++kt) {
        const int j_lo = kt * n;
        const int j_hi = std::min(j_lo + n, geo.k);
        const int64_t tile_t0 = (int64_t(ct) * n_ktiles + kt) * pass_cycles(n, geo.positions);

        for (int p = 0; p < geo.positions; ++p) {
          const auto window = cw.window(p);
          MacStarState st;
          if (kt == 0) {
            st.sum = approx ? (int64_t(filter.bias) >> m) : int64_t(filter.bias);
            check_signed_width(st.sum, widths.sum_bits, "seeded partial sum");
          }
          for (int j = j_lo; j < j_hi; ++j) {
            st = mac_star_step(filter.weights[size_t(j)], window[size_t(j)], st, m, widths);
            if (trace) {
              trace(TraceRow{.cycle = tile_t0 + p + (j - j_lo),
                             .row = array_row,
                             .col = j - j_lo,
                             .unit = approx ? "mac*" : "mac",
                             .sum = st.sum,
                             .sum_x = st.sum_x});
            }
          }
          carry_sum[size_t(p)] += st.sum;
          carry_sumx[size_t(p)] += st.sum_x;

          if (kt == n_ktiles - 1) {
            int64_t g;
            if (approx) {
              const int32_t c_eff = cfg.control_variate ? filter.c_quantized : 0;
              if (n_ktiles == 1) {
                g = mac_plus(carry_sum[size_t(p)], carry_sumx[size_t(p)], c_eff, filter.bias, m,
                             widths);
              } else {
                // Tiled: the hardware single-pass width claim no longer
                // applies; the combine happens in the 32-bit accumulation
                // path outside the array.
                const int64_t bias_lsb =
                    int64_t(filter.bias) - ((int64_t(filter.bias) >> m) << m);
                g = check_i32((carry_sum[size_t(p)] << m) + bias_lsb +
                                  int64_t(c_eff) * carry_sumx[size_t(p)],
                              "tiled mac+ combine");
              }
              if (trace) {
                trace(TraceRow{.cycle = tile_t0 + p + n + 1,
                               .row = array_row,
                               .col = n,
                               .unit = "mac+",
                               .sum = g,
                               .sum_x = carry_sumx[size_t(p)]});
              }
            } else {
              g = n_ktiles == 1 ? carry_sum[size_t(p)]
                                : check_i32(carry_sum[size_t(p)], "tiled accurate combine");
              if (n_ktiles == 1) check_signed_width(g, widths.out_bits, "accurate result");
            }
            out[size_t(p) * geo.cout + f] = int32_t(g);
          }
        }
      }
    }
  }

  std::vector<int> out_shape = layer.kind == LayerKind::Conv2D
                                   ? std::vector<int>{cw.out_h, cw.out_w, geo.cout}
                                   : std::vector<int>{geo.cout};
  QTensor out_tensor(std::move(out_shape), std::move(out), Role::Accumulator);
  if (layer.shift) out_tensor = apply_requantize(out_tensor, *layer.shift);

  LayerSim sim{.output = std::move(out_tensor), .cycles = {}};
  sim.cycles.cycles = int64_t(n_ctiles) * n_ktiles * pass_cycles(n, geo.positions);
  if (approx) {
    sim.cycles.cycles += 1;  // pipelined MAC+ drains one cycle after the last window
    sim.cycles.overhead_cycles = 1;
  }
  return sim;
}

ModelSim run_model_systolic(const QuantModel& model, const QTensor& input,
                            const ArrayConfig& cfg) {
  cfg.check();
  if (input.shape() != model.input_shape()) {
    throw std::invalid_argument("input shape does not match model input shape");
  }

  ModelSim sim;
  QTensor t = input;
  for (const LayerSpec& l : model.layers()) {
    switch (l.kind) {
      case LayerKind::Conv2D:
      case LayerKind::Dense: {
        LayerSim ls = simulate_layer(cfg, l, t);
        t = std::move(ls.output);
        sim.mac_layers.push_back(ls.cycles);
        break;
      }
      case LayerKind::ReLU:
        t = apply_relu(t);
        break;
      case LayerKind::MaxPool:
        t = apply_maxpool(t, l.window, l.stride);
        break;
      case LayerKind::Requantize:
        t = apply_requantize(t, *l.shift);
        break;
    }
  }
  sim.result.logits = t.data();
  sim.result.label = argmax_label(sim.result.logits);
  return sim;
}

}  // namespace systolic
}  // namespace cvconv
