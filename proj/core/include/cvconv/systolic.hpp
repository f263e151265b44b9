#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cvconv/engine.hpp"
#include "cvconv/model.hpp"
#include "cvconv/perforation.hpp"
#include "cvconv/qtensor.hpp"

namespace cvconv {
namespace systolic {

enum class ArrayMode { Accurate, ApproxCV };

// N x N array of plain MACs (Accurate), or N rows x (N+1) columns where the
// first N columns hold MAC* units and the last column MAC+ units (ApproxCV).
// control_variate = false keeps the modified architecture but feeds the MAC+
// multiplier the constant 0, i.e. perforation without the correction term.
struct ArrayConfig {
  int n = 16;
  int m = 0;
  ArrayMode mode = ArrayMode::Accurate;
  bool control_variate = true;

  void check() const;
};

// Bit widths of the datapath, derived from (N, m). Width violations in the
// simulation throw; the hardware sizing claims they cannot occur.
struct ArrayWidths {
  int sum_bits = 0;   // signed MAC/MAC* accumulation width
  int sumx_bits = 0;  // unsigned sumX accumulation width
  int out_bits = 0;   // signed final (MAC+) adder width

  static ArrayWidths derive(const ArrayConfig& cfg);
};

struct MacStarState {
  int64_t sum = 0;
  int64_t sum_x = 0;
};

// One MAC* evaluation: sum += w * (a >> m), sum_x += a mod 2^m, with width
// assertions against the declared state widths.
MacStarState mac_star_step(int32_t w, int32_t a, const MacStarState& in, int m,
                           const ArrayWidths& widths);

// The final-column unit: left-shift-concatenate the perforated partial sum
// with the bias LSBs, then add V = c_q * sum_x.
// Result is {sum_n, B[m-1:0]} + c_q * sum_x, checked against the final adder
// width.
int32_t mac_plus(int64_t sum_n, int64_t sum_x_n, int32_t c_q, int32_t bias, int m,
                 const ArrayWidths& widths);

struct CycleReport {
  int64_t cycles = 0;
  int64_t overhead_cycles = 0;  // 1 per MAC layer in ApproxCV mode, else 0
};

struct TraceRow {
  int64_t cycle = 0;
  int row = 0;
  int col = 0;
  const char* unit = "";  // "mac", "mac*" or "mac+"
  int64_t sum = 0;
  int64_t sum_x = 0;
};

using TraceSink = std::function<void(const TraceRow&)>;

struct LayerSim {
  QTensor output;
  CycleReport cycles;
};

// Runs one conv2d or dense layer through the array model. Receptive fields
// longer than N are tiled over ceil(k/N) passes; partial sums and partial
// sumX carry between passes at full 32-bit precision and V is applied once
// after the last pass. Output is bit-identical to the functional engine for
// the same (m, control_variate).
LayerSim simulate_layer(const ArrayConfig& cfg, const LayerSpec& layer, const QTensor& input,
                        const TraceSink& trace = nullptr);

struct ModelSim {
  InferenceResult result;
  std::vector<CycleReport> mac_layers;  // conv2d/dense layers, pipeline order

  int64_t total_cycles() const {
    int64_t t = 0;
    for (const CycleReport& c : mac_layers) t += c.cycles;
    return t;
  }
};

// Full forward pass with conv2d/dense layers on the array and the remaining
// stages on the functional path.
ModelSim run_model_systolic(const QuantModel& model, const QTensor& input,
                            const ArrayConfig& cfg);

}  // namespace systolic
}  // namespace cvconv
