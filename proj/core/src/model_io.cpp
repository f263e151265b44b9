#include "cvconv/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cvconv {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw std::runtime_error("model schema: " + path + ": " + what);
}

int64_t require_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int64_t>();
}

int64_t require_int_field(const ordered_json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) schema_error(path, std::string("missing field '") + key + "'");
  return require_int(j.at(key), path + "." + key);
}

int64_t require_range(int64_t v, int64_t lo, int64_t hi, const std::string& path) {
  if (v < lo || v > hi) {
    schema_error(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + "," +
                           std::to_string(hi) + "]");
  }
  return v;
}

std::vector<ConvFilter> parse_filters(const ordered_json& j, const std::string& path) {
  if (!j.contains("filters")) schema_error(path, "missing field 'filters'");
  const auto& jf = j.at("filters");
  if (!jf.is_array() || jf.empty()) schema_error(path + ".filters", "expected a non-empty array");

  std::vector<ConvFilter> filters;
  filters.reserve(jf.size());
  for (size_t f = 0; f < jf.size(); ++f) {
    const std::string fpath = path + ".filters[" + std::to_string(f) + "]";
    const auto& jff = jf[f];
    if (!jff.is_object()) schema_error(fpath, "expected an object");
    if (!jff.contains("weights")) schema_error(fpath, "missing field 'weights'");
    const auto& jw = jff.at("weights");
    if (!jw.is_array() || jw.empty()) {
      schema_error(fpath + ".weights", "expected a non-empty array");
    }
    std::vector<int8_t> weights;
    weights.reserve(jw.size());
    for (size_t i = 0; i < jw.size(); ++i) {
      const std::string wpath = fpath + ".weights[" + std::to_string(i) + "]";
      weights.push_back(int8_t(require_range(require_int(jw[i], wpath), -128, 127, wpath)));
    }
    const int64_t bias =
        require_range(require_int_field(jff, "bias", fpath), INT32_MIN, INT32_MAX, fpath + ".bias");
    filters.emplace_back(std::move(weights), int32_t(bias));
  }
  return filters;
}

LayerSpec parse_layer(const ordered_json& j, size_t index) {
  const std::string path = "layers[" + std::to_string(index) + "]";
  if (!j.is_object()) schema_error(path, "expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    schema_error(path, "missing string field 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();

  std::optional<int> shift;
  if (j.contains("shift")) {
    shift = int(require_range(require_int(j.at("shift"), path + ".shift"), 0, 31, path + ".shift"));
  }

  if (kind == "conv2d") {
    const int kernel =
        int(require_range(require_int_field(j, "kernel", path), 1, 64, path + ".kernel"));
    const int stride =
        int(require_range(require_int_field(j, "stride", path), 1, 64, path + ".stride"));
    if (!j.contains("padding") || !j.at("padding").is_string()) {
      schema_error(path, "missing string field 'padding'");
    }
    const std::string pad = j.at("padding").get<std::string>();
    if (pad != "same" && pad != "valid") {
      schema_error(path + ".padding", "expected \"same\" or \"valid\"");
    }
    return LayerSpec::conv2d(kernel, stride, pad == "same" ? Padding::Same : Padding::Valid,
                             parse_filters(j, path), shift);
  }
  if (kind == "dense") {
    return LayerSpec::dense(parse_filters(j, path), shift);
  }
  if (kind == "relu") {
    return LayerSpec::relu();
  }
  if (kind == "maxpool") {
    const int window =
        int(require_range(require_int_field(j, "window", path), 1, 64, path + ".window"));
    const int stride =
        int(require_range(require_int_field(j, "stride", path), 1, 64, path + ".stride"));
    return LayerSpec::maxpool(window, stride);
  }
  if (kind == "requantize") {
    if (!shift) schema_error(path, "requantize needs field 'shift'");
    return LayerSpec::requantize(*shift);
  }
  schema_error(path + ".kind", "unknown layer kind '" + kind + "'");
}

}  // namespace

QuantModel parse_model_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("model schema: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("$", "expected a JSON object");
  if (!j.contains("input_shape")) schema_error("$", "missing field 'input_shape'");
  const auto& js = j.at("input_shape");
  if (!js.is_array() || js.empty()) schema_error("input_shape", "expected a non-empty array");

  std::vector<int> input_shape;
  for (size_t i = 0; i < js.size(); ++i) {
    const std::string p = "input_shape[" + std::to_string(i) + "]";
    input_shape.push_back(int(require_range(require_int(js[i], p), 1, 1 << 20, p)));
  }

  if (!j.contains("layers") || !j.at("layers").is_array()) {
    schema_error("$", "missing array field 'layers'");
  }
  std::vector<LayerSpec> layers;
  const auto& jl = j.at("layers");
  layers.reserve(jl.size());
  for (size_t i = 0; i < jl.size(); ++i) layers.push_back(parse_layer(jl[i], i));

  try {
    return QuantModel(std::move(input_shape), std::move(layers));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("model schema: ") + e.what());
  }
}

QuantModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

std::string model_to_json(const QuantModel& model) {
  ordered_json j;
  j["input_shape"] = model.input_shape();
  ordered_json layers = ordered_json::array();
  for (const LayerSpec& l : model.layers()) {
    ordered_json jl;
    jl["kind"] = layer_kind_name(l.kind);
    switch (l.kind) {
      case LayerKind::Conv2D:
        jl["kernel"] = l.kernel;
        jl["stride"] = l.stride;
        jl["padding"] = padding_name(l.padding);
        break;
      case LayerKind::MaxPool:
        jl["window"] = l.window;
        jl["stride"] = l.stride;
        break;
      default:
        break;
    }
    if (l.shift && l.kind != LayerKind::ReLU && l.kind != LayerKind::MaxPool) {
      jl["shift"] = *l.shift;
    }
    if (l.is_mac_layer()) {
      ordered_json jfs = ordered_json::array();
      for (const ConvFilter& f : l.filters) {
        ordered_json jf;
        jf["weights"] = std::vector<int>(f.weights.begin(), f.weights.end());
        jf["bias"] = f.bias;
        jfs.push_back(std::move(jf));
      }
      jl["filters"] = std::move(jfs);
    }
    layers.push_back(std::move(jl));
  }
  j["layers"] = std::move(layers);
  return j.dump(1) + "\n";
}

void save_model(const QuantModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << model_to_json(model);
}

namespace {

constexpr char kDatasetMagic[4] = {'Q', 'D', 'S', '1'};

uint32_t read_u32le(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::runtime_error(std::string("dataset: truncated ") + what);
  }
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void write_u32le(std::ostream& out, uint32_t v) {
  const char b[4] = {char(v & 0xff), char(v >> 8 & 0xff), char(v >> 16 & 0xff), char(v >> 24)};
  out.write(b, 4);
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != std::string_view(kDatasetMagic, 4)) {
    throw std::runtime_error("dataset: bad magic, expected QDS1");
  }
  const uint32_t count = read_u32le(in, "sample count");
  const uint32_t sample_len = read_u32le(in, "sample length");
  if (count > 0 && sample_len == 0) {
    throw std::runtime_error("dataset: zero sample length with nonzero count");
  }

  Dataset ds;
  ds.sample_len = sample_len;
  ds.bytes.resize(size_t(count) * sample_len);
  ds.labels.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    if (!in.read(reinterpret_cast<char*>(ds.bytes.data() + size_t(i) * sample_len), sample_len) ||
        !in.read(reinterpret_cast<char*>(&ds.labels[i]), 1)) {
      throw std::runtime_error("dataset: truncated at record " + std::to_string(i) + " of " +
                               std::to_string(count));
    }
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
  out.write(kDatasetMagic, 4);
  write_u32le(out, uint32_t(ds.count()));
  write_u32le(out, ds.sample_len);
  for (size_t i = 0; i < ds.count(); ++i) {
    out.write(reinterpret_cast<const char*>(ds.bytes.data() + i * ds.sample_len), ds.sample_len);
    out.write(reinterpret_cast<const char*>(&ds.labels[i]), 1);
  }
}

QTensor sample_to_tensor(const Dataset& ds, size_t index, const std::vector<int>& shape) {
  if (index >= ds.count()) throw std::out_of_range("dataset sample index out of range");
  if (QTensor::shape_elems(shape) != int64_t(ds.sample_len)) {
    throw std::invalid_argument("dataset sample length does not match tensor shape");
  }
  const auto bytes = ds.sample(index);
  std::vector<int32_t> data(bytes.begin(), bytes.end());
  return QTensor(shape, std::move(data), Role::Activation);
}

void write_report(const std::filesystem::path& path, const std::string& header,
                  const std::vector<std::string>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write report file: " + path.string());
  if (fresh) out << header << "\n";
  for (const std::string& r : rows) out << r << "\n";
}

}  // namespace cvconv
