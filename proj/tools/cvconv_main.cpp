// cvconv — experiment driver for the control-variate approximate convolution
// library: inference sweeps, error statistics, full-adder cost tables,
// systolic array simulation and fixture generation.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cvconv/digest.hpp"
#include "cvconv/engine.hpp"
#include "cvconv/error_stats.hpp"
#include "cvconv/fixture.hpp"
#include "cvconv/hw_cost.hpp"
#include "cvconv/model_io.hpp"
#include "cvconv/rng.hpp"
#include "cvconv/systolic.hpp"

namespace {

using namespace cvconv;

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;  // statistical self-check or execution failure
constexpr int kExitUsage = 2;   // bad flags, malformed files, schema errors

int default_jobs() {
  if (const char* env = std::getenv("CVCONV_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
  }
}

std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << "|";
  for (const auto& h : header) os << " " << h << " |";
  os << "\n|";
  for (size_t i = 0; i < header.size(); ++i) os << " --- |";
  os << "\n";
  for (const auto& row : rows) {
    os << "|";
    for (const auto& cell : row) os << " " << cell << " |";
    os << "\n";
  }
  return os.str();
}

std::string csv_table(const std::string& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::vector<int> parse_m_list(const std::string& spec) {
  std::vector<int> ms;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const int m = std::stoi(tok);
    if (m < 0 || m > 7) throw CLI::ValidationError("--m", "m must be in [0,7]");
    ms.push_back(m);
  }
  if (ms.empty()) throw CLI::ValidationError("--m", "empty m list");
  return ms;
}

std::vector<bool> parse_cv(const std::string& spec) {
  if (spec == "on") return {true};
  if (spec == "off") return {false};
  if (spec == "both") return {true, false};
  throw CLI::ValidationError("--cv", "expected on, off or both");
}

// ---------------------------------------------------------------------------
// infer
// ---------------------------------------------------------------------------

struct InferRow {
  std::string engine;
  int m;
  bool cv;
  size_t samples;
  double top1;
  double loss;
};

double dataset_accuracy(const QuantModel& model, const Dataset& ds,
                        const std::function<int(const QTensor&)>& infer, int jobs) {
  std::atomic<size_t> next{0};
  std::atomic<long> hits{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= ds.count()) break;
      const QTensor in = sample_to_tensor(ds, i, model.input_shape());
      if (infer(in) == int(ds.labels[i])) hits.fetch_add(1);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return double(hits.load()) / double(ds.count());
}

int cmd_infer(const std::string& model_path, const std::string& data_path,
              const std::string& m_spec, const std::string& cv_spec,
              const std::string& engine_spec, int n, const std::string& report_path,
              bool markdown, int jobs) {
  const QuantModel model = load_model(model_path);
  const Dataset ds = load_dataset(data_path);
  if (ds.count() == 0) throw std::runtime_error("dataset is empty");

  std::vector<std::string> engines;
  if (engine_spec == "functional" || engine_spec == "systolic") {
    engines = {engine_spec};
  } else if (engine_spec == "both") {
    engines = {"functional", "systolic"};
  } else {
    throw CLI::ValidationError("--engine", "expected functional, systolic or both");
  }

  const double accurate_top1 = dataset_accuracy(
      model, ds, [&](const QTensor& in) { return run_model_accurate(model, in).label; }, jobs);

  std::vector<InferRow> rows;
  for (const std::string& engine : engines) {
    for (int m : parse_m_list(m_spec)) {
      for (bool cv : parse_cv(cv_spec)) {
        const PerforationConfig cfg{.m = m, .control_variate = cv};
        double top1;
        if (engine == "functional") {
          top1 = dataset_accuracy(
              model, ds, [&](const QTensor& in) { return run_model_approx(model, in, cfg).label; },
              jobs);
        } else {
          const systolic::ArrayConfig array{
              .n = n, .m = m, .mode = systolic::ArrayMode::ApproxCV, .control_variate = cv};
          top1 = dataset_accuracy(
              model, ds,
              [&](const QTensor& in) { return systolic::run_model_systolic(model, in, array).result.label; },
              jobs);
        }
        rows.push_back(InferRow{engine, m, cv, ds.count(), top1, accurate_top1 - top1});
      }
    }
  }

  std::vector<std::vector<std::string>> cells;
  for (const InferRow& r : rows) {
    cells.push_back({r.engine, std::to_string(r.m), r.cv ? "on" : "off",
                     std::to_string(r.samples), format_double(r.top1), format_double(r.loss)});
  }
  const std::string header = "engine,m,cv,samples,top1_accuracy,accuracy_loss_vs_accurate";
  const std::string csv = csv_table(header, cells);
  if (!report_path.empty()) emit(csv, report_path);
  if (markdown) {
    emit(markdown_table({"engine", "m", "cv", "samples", "top1", "loss_vs_accurate"}, cells), "");
  } else if (report_path.empty()) {
    emit(csv, "");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

std::string rational_cell(const Rational& r) {
  if (r.is_integer()) return int128_to_string(r.num());
  return format_double(r.to_double());
}

int cmd_cost(int n, int m, bool table1, const std::string& out_path, bool markdown) {
  std::vector<CostReport> reports;
  if (table1) {
    reports = reference_cost_table();
  } else {
    reports.push_back(cost_report(n, m));
  }
  std::vector<std::vector<std::string>> cells;
  for (const CostReport& r : reports) {
    cells.push_back({std::to_string(r.n), std::to_string(r.m),
                     rational_cell(r.total_macstar_decrease),
                     rational_cell(r.total_macplus_increase), rational_cell(r.net_decrease)});
  }
  const std::string header = "N,m,macstar_decrease,macplus_increase,net_decrease";
  if (markdown) {
    emit(markdown_table({"N", "m", "MAC* decrease", "MAC+ increase", "net decrease"}, cells),
         out_path);
  } else {
    emit(csv_table(header, cells), out_path);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

std::vector<int8_t> load_weights_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weights file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("weights file: not valid JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw std::runtime_error("weights file: expected a non-empty JSON array of integers");
  }
  std::vector<int8_t> w;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) {
      throw std::runtime_error("weights file: [" + std::to_string(i) + "] is not an integer");
    }
    const int64_t v = j[i].get<int64_t>();
    if (v < -128 || v > 127) {
      throw std::runtime_error("weights file: [" + std::to_string(i) + "] = " +
                               std::to_string(v) + " outside [-128,127]");
    }
    w.push_back(int8_t(v));
  }
  return w;
}

int cmd_stats(int k, const std::string& weights_file, int m, const std::string& cv_spec,
              const std::string& c_mode_spec, uint64_t trials, uint64_t seed,
              const std::string& dist, const std::string& data_path, bool self_check,
              const std::string& out_path, int jobs) {
  std::vector<int8_t> weights;
  if (!weights_file.empty()) {
    weights = load_weights_file(weights_file);
  } else {
    if (k < 1) throw CLI::ValidationError("--k", "k must be >= 1");
    // weights drawn from substream 1 of the seed; trials use substreams >= 0
    // of the same seed inside the sampler, so the pair is fully reproducible
    Xoshiro256pp wrng = Xoshiro256pp::from_stream(seed, uint64_t(-1));
    weights.resize(size_t(k));
    for (auto& v : weights) v = int8_t(wrng.next_int(-128, 127));
  }

  const std::vector<bool> cvs = parse_cv(cv_spec);
  if (cvs.size() != 1) throw CLI::ValidationError("--cv", "stats expects on or off");
  CMode c_mode;
  if (c_mode_spec == "exact") {
    c_mode = CMode::ExactRational;
  } else if (c_mode_spec == "quantized8") {
    c_mode = CMode::Quantized8;
  } else {
    throw CLI::ValidationError("--c-mode", "expected exact or quantized8");
  }

  Dataset ds;
  McConfig cfg{.perforation = {.m = m, .control_variate = cvs[0]},
               .c_mode = c_mode,
               .trials = trials,
               .seed = seed,
               .jobs = jobs};
  if (dist == "dataset") {
    if (data_path.empty()) throw CLI::ValidationError("--data", "required with --dist dataset");
    ds = load_dataset(data_path);
    cfg.dataset = &ds;
  } else if (dist != "uniform") {
    throw CLI::ValidationError("--dist", "expected uniform or dataset");
  }

  const ErrorStats st = mc_conv_error(weights, 0, cfg);
  emit(error_stats_report_json(weights, st, cfg.perforation, c_mode, dist), out_path);

  if (self_check) {
    // Documented bounds: |mean - predicted| <= 4*sqrt(predVar/trials) and
    // |variance - predicted| <= 5*sqrt(2/trials)*predVar. With m=0 all four
    // are exactly zero. Under --dist dataset the uniform-model predictions
    // may genuinely differ; a failure there is a finding, not a bug.
    const double pv = st.predicted_variance.to_double();
    const double pm = st.predicted_mean.to_double();
    if (m == 0) {
      if (st.empirical_mean != 0.0 || st.empirical_variance != 0.0 || pm != 0.0 || pv != 0.0) {
        std::cerr << "assert: m=0 statistics must be exactly zero\n";
        return kExitAssert;
      }
      return kExitOk;
    }
    const double mean_bound = 4.0 * std::sqrt(pv / double(trials));
    if (std::abs(st.empirical_mean - pm) > mean_bound) {
      std::cerr << "assert: empirical mean " << st.empirical_mean << " deviates from predicted "
                << pm << " by more than " << mean_bound << "\n";
      return kExitAssert;
    }
    const double var_bound = 5.0 * std::sqrt(2.0 / double(trials)) * pv;
    if (std::abs(st.empirical_variance - pv) > var_bound) {
      std::cerr << "assert: empirical variance " << st.empirical_variance
                << " deviates from predicted " << pv << " by more than " << var_bound << "\n";
      return kExitAssert;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

QTensor seeded_input(const std::vector<int>& shape, uint64_t seed) {
  Xoshiro256pp rng(seed);
  std::vector<int32_t> data(size_t(QTensor::shape_elems(shape)));
  for (auto& v : data) v = int32_t(rng.next_bits(8));
  return QTensor(shape, std::move(data), Role::Activation);
}

std::string tensor_digest(const QTensor& t) {
  std::vector<uint8_t> bytes;
  bytes.reserve(t.data().size() * 4);
  for (int32_t v : t.data()) {
    for (int b = 0; b < 4; ++b) bytes.push_back(uint8_t(uint32_t(v) >> (8 * b) & 0xff));
  }
  return to_hex64(fnv1a64(bytes));
}

std::string logits_digest(const std::vector<int32_t>& logits) {
  return tensor_digest(QTensor({int(logits.size())}, logits, Role::Accumulator));
}

struct LayerSpecFile {
  std::vector<int> input_shape;
  LayerSpec layer;
};

LayerSpecFile load_layer_spec(const std::string& path) {
  // reuse the model schema: a single-layer model file
  const QuantModel m = load_model(path);
  if (m.layers().size() != 1 || !m.layers()[0].is_mac_layer()) {
    throw std::runtime_error("layer-spec file must contain exactly one conv2d or dense layer");
  }
  return LayerSpecFile{m.input_shape(), m.layers()[0]};
}

int cmd_simulate(const std::string& model_path, const std::string& layer_spec_path, int n, int m,
                 const std::string& cv_spec, bool accurate, const std::string& trace_path,
                 uint64_t seed, const std::string& out_path) {
  const std::vector<bool> cvs = parse_cv(cv_spec);
  if (cvs.size() != 1) throw CLI::ValidationError("--cv", "simulate expects on or off");
  systolic::ArrayConfig cfg{.n = n,
                            .m = accurate ? 0 : m,
                            .mode = accurate ? systolic::ArrayMode::Accurate
                                             : systolic::ArrayMode::ApproxCV,
                            .control_variate = cvs[0]};

  std::ofstream trace_file;
  systolic::TraceSink sink;
  if (!trace_path.empty()) {
    trace_file.open(trace_path, std::ios::binary | std::ios::trunc);
    if (!trace_file) throw std::runtime_error("cannot write trace file: " + trace_path);
    trace_file << "cycle,row,col,unit,sum,sumX\n";
    sink = [&](const systolic::TraceRow& r) {
      trace_file << r.cycle << ',' << r.row << ',' << r.col << ',' << r.unit << ',' << r.sum
                 << ',' << r.sum_x << '\n';
    };
  }

  nlohmann::ordered_json j;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["mode"] = accurate ? "accurate" : "approx";
  j["cv"] = cvs[0];
  j["seed"] = seed;
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();

  const PerforationConfig pcfg{.m = cfg.m, .control_variate = cvs[0]};

  if (!layer_spec_path.empty()) {
    const LayerSpecFile lf = load_layer_spec(layer_spec_path);
    const QTensor input = seeded_input(lf.input_shape, seed);
    const auto sim = systolic::simulate_layer(cfg, lf.layer, input, sink);

    // functional reference over the same single layer
    QuantModel single(lf.input_shape, {lf.layer});
    const auto fn = accurate ? run_model_accurate(single, input)
                             : run_model_approx(single, input, pcfg);

    nlohmann::ordered_json row;
    row["index"] = 0;
    row["kind"] = layer_kind_name(lf.layer.kind);
    row["cycles"] = sim.cycles.cycles;
    row["overhead_cycles"] = sim.cycles.overhead_cycles;
    layers.push_back(std::move(row));
    j["layers"] = std::move(layers);
    j["total_cycles"] = sim.cycles.cycles;
    j["total_overhead_cycles"] = sim.cycles.overhead_cycles;
    j["output_digest"] = tensor_digest(sim.output);
    j["functional_digest"] = logits_digest(fn.logits);
  } else {
    const QuantModel model = load_model(model_path);
    const QTensor input = seeded_input(model.input_shape(), seed);

    // per-layer reports come from the systolic engine; the functional engine
    // provides the digest cross-check
    QTensor t = input;
    int64_t total = 0, total_overhead = 0;
    int index = 0;
    for (const LayerSpec& l : model.layers()) {
      if (l.is_mac_layer()) {
        auto sim = systolic::simulate_layer(cfg, l, t, sink);
        t = std::move(sim.output);
        nlohmann::ordered_json row;
        row["index"] = index;
        row["kind"] = layer_kind_name(l.kind);
        row["cycles"] = sim.cycles.cycles;
        row["overhead_cycles"] = sim.cycles.overhead_cycles;
        layers.push_back(std::move(row));
        total += sim.cycles.cycles;
        total_overhead += sim.cycles.overhead_cycles;
      } else if (l.kind == LayerKind::ReLU) {
        t = apply_relu(t);
      } else if (l.kind == LayerKind::MaxPool) {
        t = apply_maxpool(t, l.window, l.stride);
      } else {
        t = apply_requantize(t, *l.shift);
      }
      ++index;
    }
    const auto fn = accurate ? run_model_accurate(model, input)
                             : run_model_approx(model, input, pcfg);
    j["layers"] = std::move(layers);
    j["total_cycles"] = total;
    j["total_overhead_cycles"] = total_overhead;
    j["output_digest"] = logits_digest(t.data());
    j["functional_digest"] = logits_digest(fn.logits);
    j["label"] = argmax_label(t.data());
  }

  emit(j.dump(2), out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// histogram / fixture
// ---------------------------------------------------------------------------

int cmd_histogram(const std::string& model_path, int layer, int filter, int bin_width,
                  const std::string& out_path) {
  const QuantModel model = load_model(model_path);
  if (layer < 0 || layer >= int(model.layers().size())) {
    throw std::runtime_error("layer index out of range");
  }
  const LayerSpec& l = model.layers()[size_t(layer)];
  if (!l.is_mac_layer()) throw std::runtime_error("layer has no filters");
  if (filter < 0 || filter >= int(l.filters.size())) {
    throw std::runtime_error("filter index out of range");
  }
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (const HistogramBin& b : weight_histogram(l.filters[size_t(filter)], bin_width)) {
    os << b.lo << ',' << b.hi << ',' << b.count << '\n';
  }
  emit(os.str(), out_path);
  return kExitOk;
}

int cmd_fixture(const std::string& out_dir, uint64_t seed) {
  const Fixture fx = generate_fixture(seed);
  write_fixture(fx, out_dir, seed);
  std::cout << "wrote " << out_dir << "/model.json, data.qds, manifest.json ("
            << fx.dataset.count() << " samples, accurate top-1 " << format_double(fx.metrics.accurate_top1)
            << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"control-variate approximate convolution toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "worker threads (default $CVCONV_JOBS or 1)");

  // infer
  auto* infer = app.add_subcommand("infer", "dataset accuracy sweep");
  infer->fallthrough();
  std::string model_path, data_path, m_spec = "0", cv_spec = "on", engine = "functional";
  std::string report_path;
  bool markdown = false;
  int n = 16;
  infer->add_option("--model", model_path, "model JSON")->required();
  infer->add_option("--data", data_path, "dataset file")->required();
  infer->add_option("--m", m_spec, "perforation depth(s), comma separated");
  infer->add_option("--cv", cv_spec, "control variate: on, off or both");
  infer->add_option("--engine", engine, "functional, systolic or both");
  infer->add_option("--n", n, "systolic array size");
  infer->add_option("--report", report_path, "write CSV here");
  infer->add_flag("--markdown", markdown, "pretty-print the table");

  // cost
  auto* cost = app.add_subcommand("cost", "full-adder cost model");
  cost->fallthrough();
  int cost_n = 64, cost_m = 1;
  bool table1 = false;
  std::string cost_out;
  bool cost_md = false;
  cost->add_option("--n", cost_n, "array size N");
  cost->add_option("--m", cost_m, "perforation depth");
  cost->add_flag("--table1", table1, "emit all eight reference rows");
  cost->add_option("--out", cost_out, "write CSV here");
  cost->add_flag("--markdown", cost_md, "pretty-print the table");

  // stats
  auto* stats = app.add_subcommand("stats", "Monte Carlo error statistics");
  stats->fallthrough();
  int stat_k = 0;
  std::string weights_file, stat_cv = "on", c_mode = "exact", dist = "uniform", stat_data;
  std::string stat_out;
  int stat_m = 1;
  uint64_t trials = 100000, seed = 1;
  bool self_check = false;
  stats->add_option("--k", stat_k, "random weight vector length");
  stats->add_option("--weights-file", weights_file, "JSON array of i8 weights");
  stats->add_option("--m", stat_m, "perforation depth")->check(CLI::Range(0, 7));
  stats->add_option("--cv", stat_cv, "control variate: on or off");
  stats->add_option("--c-mode", c_mode, "exact or quantized8");
  stats->add_option("--trials", trials, "Monte Carlo trials");
  stats->add_option("--seed", seed, "PRNG seed");
  stats->add_option("--dist", dist, "uniform or dataset");
  stats->add_option("--data", stat_data, "dataset file for --dist dataset");
  stats->add_flag("--assert", self_check, "exit 1 if empirical and predicted disagree");
  stats->add_option("--out", stat_out, "write JSON here");

  // simulate
  auto* sim = app.add_subcommand("simulate", "systolic array model");
  sim->fallthrough();
  std::string sim_model, layer_spec, sim_cv = "on", trace_path, sim_out;
  int sim_n = 16, sim_m = 1;
  bool sim_accurate = false;
  uint64_t sim_seed = 1;
  sim->add_option("--model", sim_model, "model JSON");
  sim->add_option("--layer-spec", layer_spec, "single-layer model JSON");
  sim->add_option("--n", sim_n, "array size N");
  sim->add_option("--m", sim_m, "perforation depth")->check(CLI::Range(0, 7));
  sim->add_option("--cv", sim_cv, "control variate: on or off");
  sim->add_flag("--accurate", sim_accurate, "simulate the accurate N x N array");
  sim->add_option("--trace", trace_path, "write per-cycle trace CSV here");
  sim->add_option("--seed", sim_seed, "input stimulus seed");
  sim->add_option("--out", sim_out, "write JSON here");

  // histogram
  auto* hist = app.add_subcommand("histogram", "filter weight histogram CSV");
  hist->fallthrough();
  std::string hist_model, hist_out;
  int hist_layer = 0, hist_filter = 0, bin_width = 1;
  hist->add_option("--model", hist_model, "model JSON")->required();
  hist->add_option("--layer", hist_layer, "layer index");
  hist->add_option("--filter", hist_filter, "filter index");
  hist->add_option("--bin-width", bin_width, "histogram bin width");
  hist->add_option("--out", hist_out, "write CSV here");

  // fixture
  auto* fix = app.add_subcommand("fixture", "generate the evaluation fixture");
  fix->fallthrough();
  std::string fix_dir;
  uint64_t fix_seed = kDefaultFixtureSeed;
  fix->add_option("--out-dir", fix_dir, "output directory")->required();
  fix->add_option("--seed", fix_seed, "generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*infer) {
      return cmd_infer(model_path, data_path, m_spec, cv_spec, engine, n, report_path, markdown,
                       jobs);
    }
    if (*cost) {
      return cmd_cost(cost_n, cost_m, table1, cost_out, cost_md);
    }
    if (*stats) {
      if (stat_k > 0 && !weights_file.empty()) {
        throw CLI::ValidationError("--k", "use either --k or --weights-file");
      }
      if (stat_k <= 0 && weights_file.empty()) {
        throw CLI::ValidationError("--k", "one of --k or --weights-file is required");
      }
      return cmd_stats(stat_k, weights_file, stat_m, stat_cv, c_mode, trials, seed, dist,
                       stat_data, self_check, stat_out, jobs);
    }
    if (*sim) {
      if (sim_model.empty() == layer_spec.empty()) {
        throw CLI::ValidationError("--model", "exactly one of --model or --layer-spec");
      }
      return cmd_simulate(sim_model, layer_spec, sim_n, sim_m, sim_cv, sim_accurate, trace_path,
                          sim_seed, sim_out);
    }
    if (*hist) {
      return cmd_histogram(hist_model, hist_layer, hist_filter, bin_width, hist_out);
    }
    if (*fix) {
      return cmd_fixture(fix_dir, fix_seed);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    // malformed files, schema violations, unreadable paths
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssert;
  }
  return kExitOk;
}
