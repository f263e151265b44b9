#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "cvconv/rational.hpp"

namespace cvconv {

// Perforation depth m: the multiplier skips the m least-significant partial
// products, i.e. it sees the activation with its m low bits cleared. m = 0 is
// exact; m = 7 keeps only the activation MSB.
struct PerforationConfig {
  int m = 0;
  bool control_variate = true;

  void check() const {
    if (m < 0 || m > 7) throw std::invalid_argument("perforation depth m must be in [0,7]");
  }
};

// Moments of the dropped low bits x = a mod 2^m under the uniform model:
// x uniform on [0, 2^m - 1].
struct MultErrorModel {
  Rational expected_x;  // (2^m - 1) / 2
  Rational var_x;       // (2^m - 1)(2^m + 1) / 12

  static MultErrorModel for_depth(int m);
};

struct PerforatedOperand {
  int32_t a_hi;  // a >> m
  int32_t x;     // a mod 2^m
};

// Predicted first and second moments of the convolution error, exact.
struct PredictedStats {
  Rational mean;
  Rational variance;
};

int32_t accurate_mul(int32_t w, int32_t a);

// Splits an activation; a == a_hi * 2^m + x holds exactly.
PerforatedOperand perforate(int32_t a, int m);

// w * (a - a mod 2^m). Equals accurate_mul when m == 0.
int32_t perforated_mul(int32_t w, int32_t a, int m);

// w * (a mod 2^m); accurate_mul - perforated_mul identically.
int32_t mul_error(int32_t w, int32_t a, int m);

// Error moments of a perforated convolution without correction:
// mean = E[x] * sum(W), variance = Var(x) * sum(W^2).
PredictedStats predicted_stats_no_cv(std::span<const int8_t> weights, int m);

// With the control variate at constant c:
// mean = E[x] * sum(W - c), variance = Var(x) * sum((W - c)^2).
PredictedStats predicted_stats_cv(std::span<const int8_t> weights, const Rational& c, int m);

// The variance-minimizing constant: the exact mean of the weights.
Rational optimal_c(std::span<const int8_t> weights);

}  // namespace cvconv
