#include "cvconv/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cvconv/digest.hpp"
#include "cvconv/engine.hpp"
#include "cvconv/rng.hpp"

namespace cvconv {

namespace {

// Geometry
constexpr int kImage = 16;        // input is kImage x kImage x 1
constexpr int kCell = 2;          // blob block side in pixels
constexpr int kGrid = kImage / kCell;
constexpr int kClasses = 5;
constexpr int kSamples = 600;

// Pattern parameters
constexpr int kBackground = 16;
constexpr int kNoise = 14;                                   // +- uniform pixel noise
constexpr std::array<int, kClasses> kBlocks = {3, 5, 7, 9, 12};  // bright blocks per class
constexpr int kBrightness = 72;                              // block brightness over background

// Pipeline scaling
constexpr int kConv1Shift = 7;
constexpr int kConv2Shift = 10;
constexpr int kCentroidProbes = 24;  // noisy probes per class for the dense centroids
constexpr int kDenseWeightMax = 100;

std::vector<int8_t> conv1_kernel(int which) {
  // Fixed positive smoothing/texture kernels; clustered values keep the
  // per-filter weight dispersion small.
  switch (which) {
    case 0: return {12, 12, 12, 12, 12, 12, 12, 12, 12};  // box
    case 1: return {8, 12, 8, 12, 20, 12, 8, 12, 8};      // center weighted
    case 2: return {14, 8, 14, 14, 8, 14, 14, 8, 14};     // vertical stripes
    default: return {16, 10, 6, 10, 16, 10, 6, 10, 16};   // diagonal
  }
}

std::vector<uint8_t> make_templates(Xoshiro256pp& rng) {
  // Disjoint block sets: shuffle the grid cells and deal them out by class.
  std::vector<int> cells(size_t(kGrid) * kGrid);
  std::iota(cells.begin(), cells.end(), 0);
  for (size_t i = cells.size() - 1; i > 0; --i) {
    std::swap(cells[i], cells[size_t(rng.next_below(i + 1))]);
  }

  std::vector<uint8_t> tmpl(size_t(kClasses) * kImage * kImage, uint8_t(kBackground));
  size_t dealt = 0;
  for (int c = 0; c < kClasses; ++c) {
    for (int b = 0; b < kBlocks[size_t(c)]; ++b) {
      const int cell = cells[dealt++];
      const int cy = (cell / kGrid) * kCell;
      const int cx = (cell % kGrid) * kCell;
      for (int y = 0; y < kCell; ++y) {
        for (int x = 0; x < kCell; ++x) {
          tmpl[size_t(c) * kImage * kImage + size_t(cy + y) * kImage + (cx + x)] =
              uint8_t(kBackground + kBrightness);
        }
      }
    }
  }
  return tmpl;
}

std::vector<uint8_t> noisy_sample(const std::vector<uint8_t>& tmpl, int cls, Xoshiro256pp& rng) {
  std::vector<uint8_t> px(size_t(kImage) * kImage);
  const size_t base = size_t(cls) * kImage * kImage;
  for (size_t i = 0; i < px.size(); ++i) {
    const int v = int(tmpl[base + i]) + int(rng.next_int(-kNoise, kNoise));
    px[i] = uint8_t(std::clamp(v, 0, 255));
  }
  return px;
}

QTensor pixels_to_tensor(std::span<const uint8_t> px) {
  std::vector<int32_t> data(px.begin(), px.end());
  return QTensor({kImage, kImage, 1}, std::move(data), Role::Activation);
}

// Feature extractor stages (everything before the dense classifier).
std::vector<LayerSpec> feature_stages() {
  std::vector<ConvFilter> conv1;
  for (int f = 0; f < 4; ++f) conv1.emplace_back(conv1_kernel(f), 0);

  // conv2 blends the four conv1 channels with fixed per-channel emphasis.
  std::vector<ConvFilter> conv2;
  for (int f = 0; f < 8; ++f) {
    std::vector<int8_t> w;
    w.reserve(36);
    for (int pos = 0; pos < 9; ++pos) {
      for (int ch = 0; ch < 4; ++ch) {
        int v = 10;
        if (ch == f % 4) v += 6;                  // emphasized channel
        if (pos == 4) v += 4;                     // center tap
        if ((pos + ch + f) % 3 == 0) v -= 3;      // mild texture variation
        w.push_back(int8_t(v));
      }
    }
    conv2.emplace_back(std::move(w), 0);
  }

  std::vector<LayerSpec> stages;
  stages.push_back(LayerSpec::conv2d(3, 1, Padding::Same, std::move(conv1), kConv1Shift));
  stages.push_back(LayerSpec::maxpool(2, 2));
  stages.push_back(LayerSpec::conv2d(3, 1, Padding::Valid, std::move(conv2), kConv2Shift));
  return stages;
}

std::vector<int32_t> run_features(const QuantModel& features, const QTensor& input) {
  return run_model_accurate(features, input).logits;
}

}  // namespace

Fixture generate_fixture(uint64_t seed) {
  Xoshiro256pp tmpl_rng = Xoshiro256pp::from_stream(seed, 1);
  Xoshiro256pp probe_rng = Xoshiro256pp::from_stream(seed, 2);
  Xoshiro256pp data_rng = Xoshiro256pp::from_stream(seed, 3);

  const std::vector<uint8_t> templates = make_templates(tmpl_rng);

  // Feature-only model used while constructing the dense layer.
  QuantModel features({kImage, kImage, 1}, feature_stages());
  const int feat_dim = features.class_count();

  // Class centroids in feature space, from noisy probes of each template.
  std::vector<int64_t> centroid(size_t(kClasses) * feat_dim, 0);
  for (int c = 0; c < kClasses; ++c) {
    for (int p = 0; p < kCentroidProbes; ++p) {
      const auto px = noisy_sample(templates, c, probe_rng);
      const auto f = run_features(features, pixels_to_tensor(px));
      for (int i = 0; i < feat_dim; ++i) centroid[size_t(c) * feat_dim + i] += f[size_t(i)];
    }
  }

  // Dense weights: per-dimension centered centroids, scaled into i8.
  // argmax of W_c . f is then a nearest-centroid decision.
  std::vector<int64_t> mean_dim(size_t(feat_dim), 0);
  for (int c = 0; c < kClasses; ++c) {
    for (int i = 0; i < feat_dim; ++i) mean_dim[size_t(i)] += centroid[size_t(c) * feat_dim + i];
  }
  int64_t max_dev = 1;
  for (int c = 0; c < kClasses; ++c) {
    for (int i = 0; i < feat_dim; ++i) {
      const int64_t dev =
          centroid[size_t(c) * feat_dim + i] * kClasses - mean_dim[size_t(i)];
      max_dev = std::max(max_dev, std::abs(dev));
    }
  }
  // Dense stage: W_c = G * (mu_c - mu_bar) with the nearest-centroid bias
  // -G * ||mu_c||^2 / 2. The common -G * mu_bar . f term cancels in argmax,
  // so argmax(W_c . f + b_c) = argmin ||f - mu_c||.
  std::vector<ConvFilter> dense;
  for (int c = 0; c < kClasses; ++c) {
    std::vector<int8_t> w(static_cast<size_t>(feat_dim));
    int64_t norm2 = 0;  // sum of centroid-sum squares for this class
    for (int i = 0; i < feat_dim; ++i) {
      const int64_t sum_i = centroid[size_t(c) * feat_dim + i];
      norm2 += sum_i * sum_i;
      const int64_t dev = sum_i * kClasses - mean_dim[size_t(i)];
      // round-half-away scaling of dev/max_dev into [-kDenseWeightMax, kDenseWeightMax]
      const int64_t num = dev * kDenseWeightMax;
      const int64_t q = num >= 0 ? (2 * num + max_dev) / (2 * max_dev)
                                 : -((-2 * num + max_dev) / (2 * max_dev));
      w[size_t(i)] = int8_t(q);
    }
    // G = kClasses * kCentroidProbes * kDenseWeightMax / max_dev in centroid
    // units; norm2 carries one extra probe factor that divides back out.
    const int64_t bias =
        -(int64_t(kClasses) * kDenseWeightMax * norm2) / (2 * max_dev * kCentroidProbes);
    dense.emplace_back(std::move(w), int32_t(bias));
  }

  std::vector<LayerSpec> stages = feature_stages();
  stages.push_back(LayerSpec::dense(std::move(dense)));
  QuantModel model({kImage, kImage, 1}, std::move(stages));

  // Dataset
  Dataset ds;
  ds.sample_len = kImage * kImage;
  ds.bytes.reserve(size_t(kSamples) * ds.sample_len);
  ds.labels.reserve(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    const int cls = s % kClasses;
    const auto px = noisy_sample(templates, cls, data_rng);
    ds.bytes.insert(ds.bytes.end(), px.begin(), px.end());
    ds.labels.push_back(uint8_t(cls));
  }

  // Recorded metrics
  Fixture fx{.model = std::move(model), .dataset = std::move(ds), .metrics = {}};
  auto accuracy = [&](auto&& infer) {
    int hits = 0;
    for (size_t i = 0; i < fx.dataset.count(); ++i) {
      const QTensor in = sample_to_tensor(fx.dataset, i, fx.model.input_shape());
      if (infer(in) == int(fx.dataset.labels[i])) ++hits;
    }
    return double(hits) / double(fx.dataset.count());
  };

  fx.metrics.accurate_top1 =
      accuracy([&](const QTensor& in) { return run_model_accurate(fx.model, in).label; });
  fx.metrics.sample0_label =
      run_model_accurate(fx.model, sample_to_tensor(fx.dataset, 0, fx.model.input_shape())).label;
  for (int m = 1; m <= 3; ++m) {
    const PerforationConfig on{.m = m, .control_variate = true};
    const PerforationConfig off{.m = m, .control_variate = false};
    fx.metrics.cv_on_top1[size_t(m - 1)] =
        accuracy([&](const QTensor& in) { return run_model_approx(fx.model, in, on).label; });
    fx.metrics.cv_off_top1[size_t(m - 1)] =
        accuracy([&](const QTensor& in) { return run_model_approx(fx.model, in, off).label; });
  }
  return fx;
}

std::string fixture_manifest_json(const Fixture& fx, uint64_t seed,
                                  const std::string& model_digest,
                                  const std::string& dataset_digest) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["model_digest"] = model_digest;
  j["dataset_digest"] = dataset_digest;
  j["samples"] = fx.dataset.count();
  j["classes"] = kClasses;
  j["layer_count"] = fx.model.layers().size();
  j["weight_count"] = fx.model.weight_count();
  j["input_shape"] = fx.model.input_shape();
  j["accurate_top1"] = fx.metrics.accurate_top1;
  j["sample0_label"] = fx.metrics.sample0_label;
  nlohmann::ordered_json approx = nlohmann::ordered_json::array();
  for (int m = 1; m <= 3; ++m) {
    nlohmann::ordered_json row;
    row["m"] = m;
    row["cv_on_top1"] = fx.metrics.cv_on_top1[size_t(m - 1)];
    row["cv_off_top1"] = fx.metrics.cv_off_top1[size_t(m - 1)];
    approx.push_back(std::move(row));
  }
  j["approx"] = std::move(approx);
  return j.dump(2) + "\n";
}

void write_fixture(const Fixture& fx, const std::filesystem::path& dir, uint64_t seed) {
  std::filesystem::create_directories(dir);
  save_model(fx.model, dir / "model.json");
  save_dataset(fx.dataset, dir / "data.qds");

  auto digest_file = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string s = ss.str();
    return to_hex64(
        fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size())));
  };

  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << fixture_manifest_json(fx, seed, digest_file(dir / "model.json"),
                               digest_file(dir / "data.qds"));
}

}  // namespace cvconv
