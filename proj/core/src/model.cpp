#include "cvconv/model.hpp"

#include <stdexcept>

#include "cvconv/perforation.hpp"

namespace cvconv {

ConvFilter::ConvFilter(std::vector<int8_t> w, int32_t b)
    : weights(std::move(w)), bias(b) {
  if (weights.empty()) throw std::invalid_argument("filter: k must be >= 1");
  c_exact = optimal_c(weights);
  c_quantized = quantize_control(c_exact);
}

int8_t quantize_control(const Rational& c) {
  int128 q = c.round_half_away();
  if (q < -128) q = -128;
  if (q > 127) q = 127;
  return int8_t(q);
}

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2D:     return "conv2d";
    case LayerKind::Dense:      return "dense";
    case LayerKind::ReLU:       return "relu";
    case LayerKind::MaxPool:    return "maxpool";
    case LayerKind::Requantize: return "requantize";
  }
  return "?";
}

const char* padding_name(Padding p) {
  return p == Padding::Same ? "same" : "valid";
}

LayerSpec LayerSpec::conv2d(int kernel, int stride, Padding padding,
                            std::vector<ConvFilter> filters, std::optional<int> shift) {
  LayerSpec l;
  l.kind = LayerKind::Conv2D;
  l.kernel = kernel;
  l.stride = stride;
  l.padding = padding;
  l.filters = std::move(filters);
  l.shift = shift;
  return l;
}

LayerSpec LayerSpec::dense(std::vector<ConvFilter> filters, std::optional<int> shift) {
  LayerSpec l;
  l.kind = LayerKind::Dense;
  l.filters = std::move(filters);
  l.shift = shift;
  return l;
}

LayerSpec LayerSpec::relu() {
  LayerSpec l;
  l.kind = LayerKind::ReLU;
  return l;
}

LayerSpec LayerSpec::maxpool(int window, int stride) {
  LayerSpec l;
  l.kind = LayerKind::MaxPool;
  l.window = window;
  l.stride = stride;
  return l;
}

LayerSpec LayerSpec::requantize(int shift) {
  LayerSpec l;
  l.kind = LayerKind::Requantize;
  l.shift = shift;
  return l;
}

namespace {

[[noreturn]] void layer_error(size_t idx, const std::string& what) {
  throw std::invalid_argument("layers[" + std::to_string(idx) + "]: " + what);
}

void check_shift(size_t idx, int shift) {
  if (shift < 0 || shift > 31) {
    layer_error(idx, "shift " + std::to_string(shift) + " outside [0,31]");
  }
}

int conv_out_dim(size_t idx, int in, int kernel, int stride, Padding padding) {
  if (padding == Padding::Same) {
    return (in + stride - 1) / stride;  // ceil(in / stride)
  }
  if (in < kernel) layer_error(idx, "valid padding needs input >= kernel");
  return (in - kernel) / stride + 1;
}

}  // namespace

QuantModel::QuantModel(std::vector<int> input_shape, std::vector<LayerSpec> layers)
    : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
  QTensor::shape_elems(input_shape_);  // rejects non-positive dims

  std::vector<int> shape = input_shape_;
  Role role = Role::Activation;

  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    switch (l.kind) {
      case LayerKind::Conv2D: {
        if (shape.size() != 3) layer_error(i, "conv2d expects a 3-D HWC input");
        if (role != Role::Activation) layer_error(i, "conv2d expects activation input");
        if (l.kernel < 1) layer_error(i, "kernel must be >= 1");
        if (l.stride < 1) layer_error(i, "stride must be >= 1");
        if (l.filters.empty()) layer_error(i, "conv2d needs at least one filter");
        const int k = l.kernel * l.kernel * shape[2];
        for (size_t f = 0; f < l.filters.size(); ++f) {
          if (l.filters[f].k() != k) {
            layer_error(i, "filters[" + std::to_string(f) + "] has " +
                               std::to_string(l.filters[f].k()) + " weights, expected " +
                               std::to_string(k));
          }
        }
        if (l.shift) check_shift(i, *l.shift);
        const int ho = conv_out_dim(i, shape[0], l.kernel, l.stride, l.padding);
        const int wo = conv_out_dim(i, shape[1], l.kernel, l.stride, l.padding);
        shape = {ho, wo, int(l.filters.size())};
        role = l.shift ? Role::Activation : Role::Accumulator;
        break;
      }
      case LayerKind::Dense: {
        if (role != Role::Activation) layer_error(i, "dense expects activation input");
        if (l.filters.empty()) layer_error(i, "dense needs at least one filter");
        const int64_t d = QTensor::shape_elems(shape);
        for (size_t f = 0; f < l.filters.size(); ++f) {
          if (l.filters[f].k() != d) {
            layer_error(i, "filters[" + std::to_string(f) + "] has " +
                               std::to_string(l.filters[f].k()) + " weights, expected " +
                               std::to_string(d));
          }
        }
        if (l.shift) check_shift(i, *l.shift);
        shape = {int(l.filters.size())};
        role = l.shift ? Role::Activation : Role::Accumulator;
        break;
      }
      case LayerKind::ReLU:
        break;  // shape and role unchanged; negatives clamp to zero
      case LayerKind::MaxPool: {
        if (shape.size() != 3) layer_error(i, "maxpool expects a 3-D HWC input");
        if (l.window < 1) layer_error(i, "window must be >= 1");
        if (l.stride < 1) layer_error(i, "stride must be >= 1");
        if (shape[0] < l.window || shape[1] < l.window) {
          layer_error(i, "window larger than input");
        }
        shape = {(shape[0] - l.window) / l.stride + 1,
                 (shape[1] - l.window) / l.stride + 1, shape[2]};
        break;
      }
      case LayerKind::Requantize: {
        if (!l.shift) layer_error(i, "requantize needs a shift");
        check_shift(i, *l.shift);
        role = Role::Activation;
        break;
      }
    }
    stages_.push_back(StageInfo{shape, role});
  }

  class_count_ = int(QTensor::shape_elems(shape));
}

int64_t QuantModel::weight_count() const {
  int64_t n = 0;
  for (const LayerSpec& l : layers_) {
    for (const ConvFilter& f : l.filters) n += f.k();
  }
  return n;
}

int32_t requantize_value(int32_t acc, int shift) {
  if (shift < 0 || shift > 31) throw std::invalid_argument("requantize shift outside [0,31]");
  if (acc <= 0) return 0;
  const int32_t v = acc >> shift;
  return v > 255 ? 255 : v;
}

}  // namespace cvconv
