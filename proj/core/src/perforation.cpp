#include "cvconv/perforation.hpp"

namespace cvconv {

namespace {

void check_operands(int32_t w, int32_t a, int m) {
  if (w < -128 || w > 127) throw std::invalid_argument("weight outside [-128,127]");
  if (a < 0 || a > 255) throw std::invalid_argument("activation outside [0,255]");
  if (m < 0 || m > 7) throw std::invalid_argument("perforation depth m must be in [0,7]");
}

}  // namespace

MultErrorModel MultErrorModel::for_depth(int m) {
  if (m < 0 || m > 7) throw std::invalid_argument("perforation depth m must be in [0,7]");
  const int128 top = (int128(1) << m) - 1;  // 2^m - 1
  return MultErrorModel{
      .expected_x = Rational(top, 2),
      .var_x = Rational(top * (top + 2), 12),
  };
}

int32_t accurate_mul(int32_t w, int32_t a) {
  check_operands(w, a, 0);
  return w * a;
}

PerforatedOperand perforate(int32_t a, int m) {
  if (a < 0 || a > 255) throw std::invalid_argument("activation outside [0,255]");
  if (m < 0 || m > 7) throw std::invalid_argument("perforation depth m must be in [0,7]");
  const int32_t x = a & ((1 << m) - 1);
  return PerforatedOperand{.a_hi = a >> m, .x = x};
}

int32_t perforated_mul(int32_t w, int32_t a, int m) {
  check_operands(w, a, m);
  return w * ((a >> m) << m);
}

int32_t mul_error(int32_t w, int32_t a, int m) {
  check_operands(w, a, m);
  return w * (a & ((1 << m) - 1));
}

PredictedStats predicted_stats_no_cv(std::span<const int8_t> weights, int m) {
  if (weights.empty()) throw std::invalid_argument("predicted_stats: empty weight vector");
  const MultErrorModel mdl = MultErrorModel::for_depth(m);
  int128 sum_w = 0;
  int128 sum_w2 = 0;
  for (int8_t w : weights) {
    sum_w += w;
    sum_w2 += int128(w) * w;
  }
  return PredictedStats{
      .mean = mdl.expected_x * Rational(sum_w),
      .variance = mdl.var_x * Rational(sum_w2),
  };
}

PredictedStats predicted_stats_cv(std::span<const int8_t> weights, const Rational& c, int m) {
  if (weights.empty()) throw std::invalid_argument("predicted_stats: empty weight vector");
  const MultErrorModel mdl = MultErrorModel::for_depth(m);
  // Work over the common denominator of c so the sums stay integral:
  // sum(W - c) = (sum(W*q) - k*p) / q with c = p/q.
  const int128 p = c.num();
  const int128 q = c.den();
  int128 sum_dev = 0;    // sum of (W*q - p)
  int128 sum_dev2 = 0;   // sum of (W*q - p)^2
  for (int8_t w : weights) {
    const int128 d = int128(w) * q - p;
    sum_dev += d;
    sum_dev2 += d * d;
  }
  return PredictedStats{
      .mean = mdl.expected_x * Rational(sum_dev, q),
      .variance = mdl.var_x * Rational(sum_dev2, q * q),
  };
}

Rational optimal_c(std::span<const int8_t> weights) {
  if (weights.empty()) throw std::invalid_argument("optimal_c: empty weight vector");
  int128 sum = 0;
  for (int8_t w : weights) sum += w;
  return Rational(sum, int128(weights.size()));
}

}  // namespace cvconv
