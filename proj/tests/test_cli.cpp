// End-to-end checks of the cvconv binary: flags, exit codes and the file
// formats it emits. The binary path comes from CMake via CVCONV_CLI_PATH.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(CVCONV_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const fs::path& fixture_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "cvconv_cli_fixture";
    const auto r = run("fixture --out-dir " + d.string());
    REQUIRE(r.exit_code == 0);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cost --table1 emits the eight reference rows") {
  const auto r = run("cost --table1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("N,m,macstar_decrease,macplus_increase,net_decrease") != std::string::npos);
  CHECK(r.output.find("64,2,43008,4960,38048") != std::string::npos);
  CHECK(r.output.find("16,1,1408,760,648") != std::string::npos);
}

TEST_CASE("cost --n 64 --m 0 is all zeros") {
  const auto r = run("cost --n 64 --m 0");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("64,0,0,0,0") != std::string::npos);
}

TEST_CASE("infer at m=0 reports zero accuracy loss") {
  const fs::path& fx = fixture_dir();
  const auto r = run("infer --model " + (fx / "model.json").string() + " --data " +
                     (fx / "data.qds").string() + " --m 0 --cv on");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("functional,0,on,600,") != std::string::npos);
  CHECK(r.output.find(",0.000000\n") != std::string::npos);
}

TEST_CASE("infer cv on/off rows and loss direction") {
  const fs::path& fx = fixture_dir();
  const fs::path report = fs::temp_directory_path() / "cvconv_infer.csv";
  fs::remove(report);
  const auto r = run("infer --model " + (fx / "model.json").string() + " --data " +
                     (fx / "data.qds").string() + " --m 2 --cv both --jobs 2 --report " +
                     report.string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(report);
  // two data rows, cv-on loss <= cv-off loss
  double loss_on = -1, loss_off = -1;
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    const auto last = line.rfind(',');
    const double loss = std::stod(line.substr(last + 1));
    if (line.find(",on,") != std::string::npos) loss_on = loss;
    if (line.find(",off,") != std::string::npos) loss_off = loss;
  }
  REQUIRE(loss_on >= 0);
  REQUIRE(loss_off >= 0);
  CHECK(loss_on <= loss_off);
}

TEST_CASE("infer engines agree on accuracy columns") {
  const fs::path& fx = fixture_dir();
  const auto r = run("infer --model " + (fx / "model.json").string() + " --data " +
                     (fx / "data.qds").string() + " --m 2 --cv on --engine both --jobs 2");
  CHECK(r.exit_code == 0);
  std::string functional_cols, systolic_cols;
  std::stringstream ss(r.output);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.rfind("functional,", 0) == 0) functional_cols = line.substr(line.find(','));
    if (line.rfind("systolic,", 0) == 0) systolic_cols = line.substr(line.find(','));
  }
  REQUIRE(!functional_cols.empty());
  REQUIRE(!systolic_cols.empty());
  CHECK(functional_cols == systolic_cols);
}

TEST_CASE("stats self-check modes") {
  SUBCASE("m=0 exits 0 with all-zero stats") {
    const auto r = run("stats --k 16 --m 0 --cv on --trials 2000 --seed 3 --assert");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"empirical_variance\": 0.0") != std::string::npos);
  }
  SUBCASE("healthy run at one million trials exits 0") {
    const auto r = run(
        "stats --k 64 --m 2 --cv on --c-mode exact --trials 1000000 --seed 11 --jobs 2 --assert");
    CHECK(r.exit_code == 0);
  }
  SUBCASE("malformed weights file exits 2 with a schema message") {
    const fs::path bad = fs::temp_directory_path() / "bad_weights.json";
    std::ofstream(bad) << "{\"not\": \"an array\"}";
    const auto r = run("stats --weights-file " + bad.string() + " --m 2 --cv on --trials 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("weights file") != std::string::npos);
  }
  SUBCASE("out-of-range weight exits 2") {
    const fs::path bad = fs::temp_directory_path() / "bad_weights2.json";
    std::ofstream(bad) << "[1, 2, 200]";
    const auto r = run("stats --weights-file " + bad.string() + " --m 2 --cv on --trials 10");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("outside") != std::string::npos);
  }
}

TEST_CASE("stats with dataset-driven activations") {
  const fs::path& fx = fixture_dir();
  const auto r = run("stats --k 9 --m 2 --cv on --dist dataset --data " +
                     (fx / "data.qds").string() + " --trials 20000 --seed 13");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("\"dist\": \"dataset\"") != std::string::npos);
}

TEST_CASE("simulate reports the one-cycle overhead and matching digests") {
  const fs::path& fx = fixture_dir();
  SUBCASE("approx mode, m >= 1") {
    const auto r = run("simulate --model " + (fx / "model.json").string() +
                       " --n 16 --m 2 --cv on --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"overhead_cycles\": 1") != std::string::npos);
    // systolic and functional digests agree
    const auto pos_a = r.output.find("\"output_digest\": \"");
    const auto pos_b = r.output.find("\"functional_digest\": \"");
    REQUIRE(pos_a != std::string::npos);
    REQUIRE(pos_b != std::string::npos);
    CHECK(r.output.substr(pos_a + 18, 16) == r.output.substr(pos_b + 22, 16));
  }
  SUBCASE("accurate mode has zero overhead") {
    const auto r = run("simulate --model " + (fx / "model.json").string() +
                       " --n 16 --accurate --cv off --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"total_overhead_cycles\": 0") != std::string::npos);
    CHECK(r.output.find("\"overhead_cycles\": 1") == std::string::npos);
  }
}

TEST_CASE("simulate trace CSV is well formed") {
  const fs::path spec = fs::temp_directory_path() / "layer_spec.json";
  std::ofstream(spec) << R"({"input_shape":[4,4,1],"layers":[{"kind":"conv2d","kernel":2,)"
                      << R"("stride":1,"padding":"valid","filters":[{"weights":[3,-2,5,1],)"
                      << R"("bias":10}]}]})";
  const fs::path trace = fs::temp_directory_path() / "trace.csv";
  const auto r = run("simulate --layer-spec " + spec.string() +
                     " --n 4 --m 1 --cv on --seed 5 --trace " + trace.string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(trace);
  CHECK(csv.rfind("cycle,row,col,unit,sum,sumX\n", 0) == 0);
  CHECK(csv.find("mac+") != std::string::npos);
}

TEST_CASE("histogram CSV") {
  const fs::path& fx = fixture_dir();
  const auto r = run("histogram --model " + (fx / "model.json").string() +
                     " --layer 0 --filter 0 --bin-width 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.rfind("bin_lo,bin_hi,count\n", 0) == 0);
  // conv1 filter 0 is the all-12 box kernel
  CHECK(r.output.find("12,12,9") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("infer --model /nonexistent.json --data /nonexistent.qds").exit_code == 2);
  CHECK(run("stats --m 2 --cv on --trials 10").exit_code == 2);  // neither --k nor file
  CHECK(run("simulate --n 16 --m 1 --cv maybe --model x").exit_code == 2);
}

TEST_CASE("help exits 0 and documents subcommands") {
  const auto r = run("--help");
  CHECK(r.exit_code == 0);
  for (const char* sub : {"infer", "cost", "stats", "simulate", "histogram", "fixture"}) {
    CHECK_MESSAGE(r.output.find(sub) != std::string::npos, sub);
  }
}
