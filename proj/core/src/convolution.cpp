#include "cvconv/convolution.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace cvconv {

namespace {

void check_window(const ConvFilter& filter, std::span<const int32_t> window) {
  if (int(window.size()) != filter.k()) {
    throw std::invalid_argument("conv: window length " + std::to_string(window.size()) +
                                " does not match filter k " + std::to_string(filter.k()));
  }
}

int32_t checked_acc(int64_t acc) {
  if (acc < INT32_MIN || acc > INT32_MAX) {
    throw std::overflow_error("conv: 32-bit accumulator overflow (model exceeds supported scale)");
  }
  return int32_t(acc);
}

}  // namespace

int32_t conv_accurate(const ConvFilter& filter, std::span<const int32_t> window) {
  check_window(filter, window);
  int64_t acc = filter.bias;
  for (size_t j = 0; j < window.size(); ++j) {
    if (uint32_t(window[j]) > 255u) {
      throw std::invalid_argument("conv: activation outside [0,255]");
    }
    acc += int64_t(filter.weights[j]) * window[j];
    checked_acc(acc);
  }
  return int32_t(acc);
}

ApproxConvResult conv_approx(const ConvFilter& filter, std::span<const int32_t> window,
                             const PerforationConfig& cfg, bool instrument) {
  check_window(filter, window);
  cfg.check();
  const int32_t mask = (1 << cfg.m) - 1;

  int64_t acc = filter.bias;
  int64_t sum_x = 0;
  for (size_t j = 0; j < window.size(); ++j) {
    const int32_t a = window[j];
    if (uint32_t(a) > 255u) {
      throw std::invalid_argument("conv: activation outside [0,255]");
    }
    acc += int64_t(filter.weights[j]) * (a & ~mask);
    sum_x += a & mask;
    checked_acc(acc);
  }
  if (cfg.control_variate) {
    acc += int64_t(filter.c_quantized) * sum_x;
  }

  ApproxConvResult r;
  r.g_star = checked_acc(acc);
  if (instrument) {
    r.g_accurate = conv_accurate(filter, window);
    r.epsilon = *r.g_accurate - r.g_star;
  }
  return r;
}

std::vector<HistogramBin> weight_histogram(const ConvFilter& filter, int bin_width) {
  if (bin_width < 1) throw std::invalid_argument("histogram: bin width must be >= 1");
  std::map<int, int64_t> counts;
  for (int8_t w : filter.weights) {
    const int idx = (int(w) + 128) / bin_width;
    counts[-128 + idx * bin_width] += 1;
  }
  std::vector<HistogramBin> bins;
  bins.reserve(counts.size());
  for (auto [lo, n] : counts) {
    int hi = lo + bin_width - 1;
    if (hi > 127) hi = 127;
    bins.push_back(HistogramBin{.lo = lo, .hi = hi, .count = n});
  }
  return bins;
}

}  // namespace cvconv
