#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cvconv/model.hpp"

namespace cvconv {

// In-memory form of the binary dataset file: flat sample bytes plus one
// label byte per sample.
struct Dataset {
  uint32_t sample_len = 0;
  std::vector<uint8_t> bytes;
  std::vector<uint8_t> labels;

  size_t count() const { return labels.size(); }
  std::span<const uint8_t> sample(size_t i) const {
    return std::span<const uint8_t>(bytes).subspan(i * sample_len, sample_len);
  }
};

// Model JSON. Loading is total: any schema or range violation throws
// std::runtime_error naming the offending field path and nothing is
// returned. save(load(x)) is byte-identical for canonically ordered files.
QuantModel load_model(const std::filesystem::path& path);
QuantModel parse_model_json(const std::string& text);
std::string model_to_json(const QuantModel& model);
void save_model(const QuantModel& model, const std::filesystem::path& path);

// Dataset binary: magic "QDS1", u32 LE sample count, u32 LE sample length,
// then per sample the raw bytes followed by one label byte.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Converts one dataset sample to an activation tensor of the given shape.
QTensor sample_to_tensor(const Dataset& ds, size_t index, const std::vector<int>& shape);

// Appends CSV rows to a report file, writing the header first when the file
// is created fresh.
void write_report(const std::filesystem::path& path, const std::string& header,
                  const std::vector<std::string>& rows);

}  // namespace cvconv
