#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cvconv/convolution.hpp"
#include "cvconv/model.hpp"
#include "cvconv/qtensor.hpp"

namespace cvconv {

struct InferenceResult {
  std::vector<int32_t> logits;
  int label = 0;
};

// Lowest index wins ties.
int argmax_label(std::span<const int32_t> logits);

// Receptive-field windows of a conv2d layer over an HWC activation tensor,
// one row of k activations per output position, zero padded where "same"
// padding reaches outside the input. Both the functional and the systolic
// engines consume these, which is what makes them bit-comparable.
struct ConvWindows {
  int out_h = 0;
  int out_w = 0;
  int k = 0;
  std::vector<int32_t> data;

  int positions() const { return out_h * out_w; }
  std::span<const int32_t> window(int p) const {
    return std::span<const int32_t>(data).subspan(size_t(p) * k, size_t(k));
  }
};

ConvWindows gather_conv_windows(const QTensor& input, int kernel, int stride, Padding padding);

QTensor apply_relu(const QTensor& in);
QTensor apply_maxpool(const QTensor& in, int window, int stride);
QTensor apply_requantize(const QTensor& in, int shift);

// Full forward passes. Deterministic; identical inputs give identical logits.
InferenceResult run_model_accurate(const QuantModel& model, const QTensor& input);

// Approximation applies to conv2d and dense layers only; everything else is
// shared with the accurate path. With cfg.m == 0 the logits are bit-identical
// to run_model_accurate.
InferenceResult run_model_approx(const QuantModel& model, const QTensor& input,
                                 const PerforationConfig& cfg);

}  // namespace cvconv
