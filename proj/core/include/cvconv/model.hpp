#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvconv/qtensor.hpp"
#include "cvconv/rational.hpp"

namespace cvconv {

// One output channel of a conv2d or dense layer: the flattened receptive
// field, the bias, and the control constant in both exact and 8-bit form.
// The 8-bit form is what inference hardware would store (8 bits per filter);
// the exact rational is kept for the error analysis.
struct ConvFilter {
  std::vector<int8_t> weights;
  int32_t bias = 0;
  Rational c_exact;
  int8_t c_quantized = 0;

  ConvFilter() = default;
  ConvFilter(std::vector<int8_t> w, int32_t b);

  int k() const { return int(weights.size()); }
};

enum class LayerKind { Conv2D, Dense, ReLU, MaxPool, Requantize };
enum class Padding { Same, Valid };

const char* layer_kind_name(LayerKind k);
const char* padding_name(Padding p);

// A single pipeline stage. Only the fields of the active kind are meaningful.
// Conv2D and Dense may carry a fused requantization shift; without one their
// output stays in accumulator form (the usual case for the final logits).
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;

  int kernel = 0;                    // conv2d: square kernel side
  int stride = 1;                    // conv2d / maxpool
  Padding padding = Padding::Valid;  // conv2d
  int window = 0;                    // maxpool
  std::optional<int> shift;          // conv2d/dense fused requant; requantize
  std::vector<ConvFilter> filters;   // conv2d / dense, one per output channel

  static LayerSpec conv2d(int kernel, int stride, Padding padding,
                          std::vector<ConvFilter> filters,
                          std::optional<int> shift = std::nullopt);
  static LayerSpec dense(std::vector<ConvFilter> filters,
                         std::optional<int> shift = std::nullopt);
  static LayerSpec relu();
  static LayerSpec maxpool(int window, int stride);
  static LayerSpec requantize(int shift);

  bool is_mac_layer() const { return kind == LayerKind::Conv2D || kind == LayerKind::Dense; }
};

struct StageInfo {
  std::vector<int> shape;  // output shape of the stage
  Role role;               // output role of the stage
};

// An ordered quantized pipeline with statically checked shapes. Immutable
// after construction; safe to share across threads.
class QuantModel {
 public:
  QuantModel() = default;
  QuantModel(std::vector<int> input_shape, std::vector<LayerSpec> layers);

  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  // Output geometry of each stage, index-aligned with layers().
  const std::vector<StageInfo>& stages() const { return stages_; }

  // Element count of the pipeline output (the logits vector).
  int class_count() const { return class_count_; }

  int64_t weight_count() const;

 private:
  std::vector<int> input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<StageInfo> stages_;
  int class_count_ = 0;
};

// clamp(floor(acc / 2^shift), 0, 255): power-of-two requantization with
// fused ReLU (negatives clamp to zero).
int32_t requantize_value(int32_t acc, int shift);

// Rounds a control constant half away from zero and clamps to the signed
// 8-bit range, the form stored per filter.
int8_t quantize_control(const Rational& c);

}  // namespace cvconv
