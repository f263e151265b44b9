#include "cvconv/error_stats.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvconv/digest.hpp"
#include "cvconv/rng.hpp"

namespace cvconv {

namespace {

// Trials are processed in fixed-size chunks, one RNG substream per chunk, so
// the result is independent of how chunks land on workers.
constexpr uint64_t kChunkTrials = 8192;

struct ScaledDeviation {
  // Per-weight factors (q*W_j - p) for c = p/q; epsilon * q stays integral.
  std::vector<int64_t> dev;
  int64_t q = 1;
};

ScaledDeviation scaled_deviation(std::span<const int8_t> weights, bool control_variate,
                                 const Rational& c) {
  ScaledDeviation s;
  if (control_variate) {
    s.q = int64_t(c.den());
    s.dev.reserve(weights.size());
    for (int8_t w : weights) s.dev.push_back(int64_t(w) * s.q - int64_t(c.num()));
  } else {
    s.q = 1;
    s.dev.assign(weights.begin(), weights.end());
  }
  return s;
}

struct MomentSums {
  int128 s1 = 0;  // sum of scaled epsilon
  int128 s2 = 0;  // sum of squared scaled epsilon
};

PredictedStats predict(std::span<const int8_t> weights, const PerforationConfig& cfg,
                       const Rational& c) {
  if (cfg.control_variate) return predicted_stats_cv(weights, c, cfg.m);
  return predicted_stats_no_cv(weights, cfg.m);
}

}  // namespace

const char* c_mode_name(CMode m) {
  return m == CMode::ExactRational ? "exact" : "quantized8";
}

Rational control_constant(std::span<const int8_t> weights, CMode mode) {
  const Rational exact = optimal_c(weights);
  if (mode == CMode::ExactRational) return exact;
  return Rational(quantize_control(exact));
}

ErrorStats mc_conv_error(std::span<const int8_t> weights, int32_t /*bias cancels in epsilon*/,
                         const McConfig& cfg) {
  cfg.perforation.check();
  if (weights.empty()) throw std::invalid_argument("mc_conv_error: empty weight vector");
  if (cfg.trials < 1) throw std::invalid_argument("mc_conv_error: trials must be >= 1");

  const size_t k = weights.size();
  if (cfg.dataset) {
    if (cfg.dataset->count() == 0) throw std::invalid_argument("mc_conv_error: empty dataset");
    if (cfg.dataset->sample_len < k) {
      throw std::invalid_argument("mc_conv_error: dataset samples shorter than filter k");
    }
  }

  const Rational c = control_constant(weights, cfg.c_mode);
  const ScaledDeviation sd = scaled_deviation(weights, cfg.perforation.control_variate, c);
  const int m = cfg.perforation.m;
  const uint32_t mask = (1u << m) - 1;

  const uint64_t n_chunks = (cfg.trials + kChunkTrials - 1) / kChunkTrials;
  std::atomic<uint64_t> next_chunk{0};
  std::mutex merge_mutex;
  MomentSums total;

  auto worker = [&]() {
    MomentSums local;
    for (;;) {
      const uint64_t chunk = next_chunk.fetch_add(1);
      if (chunk >= n_chunks) break;
      Xoshiro256pp rng = Xoshiro256pp::from_stream(cfg.seed, chunk);
      const uint64_t lo = chunk * kChunkTrials;
      const uint64_t hi = std::min(lo + kChunkTrials, cfg.trials);
      for (uint64_t t = lo; t < hi; ++t) {
        int64_t eps = 0;
        if (cfg.dataset) {
          const uint64_t s = rng.next_below(cfg.dataset->count());
          const uint64_t off = rng.next_below(cfg.dataset->sample_len - k + 1);
          const auto sample = cfg.dataset->sample(size_t(s));
          for (size_t j = 0; j < k; ++j) {
            eps += int64_t(uint32_t(sample[size_t(off) + j]) & mask) * sd.dev[j];
          }
        } else {
          for (size_t j = 0; j < k; ++j) {
            eps += int64_t(rng.next_bits(8) & mask) * sd.dev[j];
          }
        }
        local.s1 += eps;
        local.s2 += int128(eps) * eps;
      }
    }
    std::lock_guard<std::mutex> lock(merge_mutex);
    total.s1 += local.s1;
    total.s2 += local.s2;
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const int128 n = int128(cfg.trials);
  const int128 q = sd.q;
  const PredictedStats pred = predict(weights, cfg.perforation, c);

  ErrorStats st;
  st.trials = cfg.trials;
  st.seed = cfg.seed;
  st.predicted_mean = pred.mean;
  st.predicted_variance = pred.variance;
  st.empirical_mean = Rational(total.s1, n * q).to_double();
  if (cfg.trials >= 2) {
    const Rational var(n * total.s2 - total.s1 * total.s1, n * (n - 1) * q * q);
    st.empirical_variance = var.to_double();
  }
  return st;
}

ErrorStats exhaustive_conv_error(std::span<const int8_t> weights, const PerforationConfig& cfg,
                                 CMode c_mode) {
  cfg.check();
  if (weights.empty()) throw std::invalid_argument("exhaustive_conv_error: empty weight vector");
  const size_t k = weights.size();
  const int m = cfg.m;
  if (int64_t(m) * int64_t(k) > 24) {
    throw std::invalid_argument("exhaustive_conv_error: state space (2^m)^k exceeds 2^24");
  }

  const Rational c = control_constant(weights, c_mode);
  const ScaledDeviation sd = scaled_deviation(weights, cfg.control_variate, c);
  const int32_t top = (1 << m) - 1;

  // Odometer over all x-tuples, maintaining the scaled epsilon incrementally.
  std::vector<int32_t> x(k, 0);
  int64_t eps = 0;
  int128 s1 = 0, s2 = 0;
  uint64_t count = 0;
  for (;;) {
    s1 += eps;
    s2 += int128(eps) * eps;
    ++count;
    size_t j = 0;
    while (j < k) {
      if (x[j] < top) {
        x[j] += 1;
        eps += sd.dev[j];
        break;
      }
      eps -= int64_t(x[j]) * sd.dev[j];
      x[j] = 0;
      ++j;
    }
    if (j == k) break;
  }

  const int128 t = int128(count);
  const int128 q = sd.q;
  const PredictedStats pred = predict(weights, cfg, c);

  ErrorStats st;
  st.trials = count;
  st.predicted_mean = pred.mean;
  st.predicted_variance = pred.variance;
  st.exact_mean = Rational(s1, t * q);
  st.exact_variance = Rational(t * s2 - s1 * s1, t * t * q * q);
  st.empirical_mean = st.exact_mean->to_double();
  st.empirical_variance = st.exact_variance->to_double();
  return st;
}

std::string error_stats_report_json(std::span<const int8_t> weights, const ErrorStats& stats,
                                    const PerforationConfig& cfg, CMode c_mode,
                                    const std::string& dist) {
  nlohmann::ordered_json j;
  j["weights_digest"] = to_hex64(fnv1a64(
      std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(weights.data()), weights.size())));
  j["k"] = weights.size();
  j["m"] = cfg.m;
  j["cv"] = cfg.control_variate;
  j["c_mode"] = c_mode_name(c_mode);
  j["dist"] = dist;
  j["trials"] = stats.trials;
  j["seed"] = stats.seed;
  j["empirical_mean"] = stats.empirical_mean;
  j["empirical_variance"] = stats.empirical_variance;
  j["predicted_mean"] = stats.predicted_mean.to_double();
  j["predicted_variance"] = stats.predicted_variance.to_double();
  j["predicted_mean_exact"] = stats.predicted_mean.to_string();
  j["predicted_variance_exact"] = stats.predicted_variance.to_string();
  return j.dump(2);
}

}  // namespace cvconv
