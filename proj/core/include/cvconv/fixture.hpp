#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "cvconv/model.hpp"
#include "cvconv/model_io.hpp"

namespace cvconv {

constexpr uint64_t kDefaultFixtureSeed = 0x5eed0001ull;

// Accuracy of the fixture recorded at generation time. Generation is a pure
// function of the seed, so these double as frozen regression values.
struct FixtureMetrics {
  double accurate_top1 = 0.0;
  int sample0_label = 0;
  std::array<double, 3> cv_on_top1{};   // m = 1, 2, 3
  std::array<double, 3> cv_off_top1{};  // m = 1, 2, 3
};

struct Fixture {
  QuantModel model;
  Dataset dataset;
  FixtureMetrics metrics;
};

// Builds the desk-scale evaluation fixture: a synthetic 5-class pattern
// dataset (600 samples, 16x16 grayscale) and a hand-constructed quantized
// CNN (2 conv + 1 dense) that classifies it.
//
// Construction: each class owns a disjoint set of bright 2x2-pixel blocks on
// a dim background; classes differ in how many blocks they light up, so
// their total brightness differs while per-sample noise is identical. The
// conv stages are fixed smoothing/texture kernels with positive weight sums;
// the dense stage is a nearest-centroid linear classifier computed from
// clean class features. Labels are therefore a learnable (indeed linear)
// function of the input.
//
// The brightness asymmetry is what makes the fixture sensitive to the
// perforation bias: without the correction term every logit shifts by
// E[x] * sum(W) of its own filter, which differs per class and flips
// decisions as m grows, while the corrected path is centered regardless
// of m.
Fixture generate_fixture(uint64_t seed = kDefaultFixtureSeed);

// Writes model.json, data.qds and manifest.json into dir (created if
// needed). Byte-identical across runs for the same seed.
void write_fixture(const Fixture& fx, const std::filesystem::path& dir, uint64_t seed);

std::string fixture_manifest_json(const Fixture& fx, uint64_t seed,
                                  const std::string& model_digest,
                                  const std::string& dataset_digest);

}  // namespace cvconv
