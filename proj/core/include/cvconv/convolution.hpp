#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvconv/model.hpp"
#include "cvconv/perforation.hpp"

namespace cvconv {

// Result of one approximate convolution window. When instrumented the exact
// result is computed alongside, so epsilon = g_accurate - g_star is available
// without a second pass.
struct ApproxConvResult {
  int32_t g_star = 0;
  std::optional<int32_t> g_accurate;
  int32_t epsilon = 0;  // meaningful only when instrumented
};

// G = B + sum_j W_j * A_j, exact 32-bit accumulation. Throws
// std::overflow_error if any partial sum leaves the i32 range.
int32_t conv_accurate(const ConvFilter& filter, std::span<const int32_t> window);

// The control-variate approximate convolution. With the control variate off
// this is G* = B + sum_j W_j*(A_j - A_j mod 2^m); with it on, the correction
// V = C_q * sum_j x_j is added, where C_q is the filter's 8-bit constant.
// m = 0 reproduces conv_accurate bit-exactly in both modes.
ApproxConvResult conv_approx(const ConvFilter& filter, std::span<const int32_t> window,
                             const PerforationConfig& cfg, bool instrument = false);

struct HistogramBin {
  int lo = 0;
  int hi = 0;      // inclusive
  int64_t count = 0;
};

// Weight histogram over [-128,127] with the given bin width; only occupied
// bins are returned, ordered by lower edge. Counts sum to k.
std::vector<HistogramBin> weight_histogram(const ConvFilter& filter, int bin_width);

}  // namespace cvconv
