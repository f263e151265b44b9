#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "cvconv/model_io.hpp"
#include "cvconv/perforation.hpp"
#include "cvconv/rational.hpp"

namespace cvconv {

// Which control constant enters the correction: the exact rational weight
// mean, or its 8-bit rounding (what the hardware stores).
enum class CMode { ExactRational, Quantized8 };

const char* c_mode_name(CMode m);

struct ErrorStats {
  uint64_t trials = 0;
  double empirical_mean = 0.0;
  // Unbiased (n-1) estimator for sampled runs; exhaustive runs report the
  // exact population variance since they cover the whole space.
  double empirical_variance = 0.0;
  Rational predicted_mean;
  Rational predicted_variance;
  uint64_t seed = 0;

  // Exact empirical moments, set only by exhaustive_conv_error.
  std::optional<Rational> exact_mean;
  std::optional<Rational> exact_variance;
};

struct McConfig {
  PerforationConfig perforation;
  CMode c_mode = CMode::ExactRational;
  uint64_t trials = 0;
  uint64_t seed = 0;
  int jobs = 1;
  // Non-null switches activation windows from the uniform model to windows
  // sampled out of real dataset records, exposing non-uniform low bits.
  const Dataset* dataset = nullptr;
};

// Monte Carlo estimate of the convolution error (accurate minus approximate)
// for one filter. Empirical moments are accumulated in exact integer
// arithmetic, so results are bit-identical for a given seed regardless of
// the worker count. Predicted moments come from the closed forms with the
// same control constant.
ErrorStats mc_conv_error(std::span<const int8_t> weights, int32_t bias, const McConfig& cfg);

// Enumerates every x-tuple (all (2^m)^k of them) and reports exact moments.
// Requires (2^m)^k <= 2^24.
ErrorStats exhaustive_conv_error(std::span<const int8_t> weights, const PerforationConfig& cfg,
                                 CMode c_mode);

// The JSON report emitted by the stats subcommand.
std::string error_stats_report_json(std::span<const int8_t> weights, const ErrorStats& stats,
                                    const PerforationConfig& cfg, CMode c_mode,
                                    const std::string& dist);

// Control constant actually used for a weight vector under the given mode.
Rational control_constant(std::span<const int8_t> weights, CMode mode);

}  // namespace cvconv
