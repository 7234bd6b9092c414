#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hcim/config.hpp"
#include "hcim/errors.hpp"

using namespace hcim;
namespace fs = std::filesystem;

namespace {

const std::string kCli = HCIM_CLI_PATH;
const fs::path kSource = HCIM_SOURCE_DIR;

int run(const std::string& args, std::string* output = nullptr) {
  const fs::path log = fs::temp_directory_path() / "hcim_cli_test.log";
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("selftest passes on a fresh build and is deterministic") {
  std::string out1, out2;
  CHECK(run("selftest", &out1) == 0);
  CHECK(run("selftest", &out2) == 0);
  CHECK(out1 == out2);
  CHECK(out1.find("[PASS] gate_truth_tables") != std::string::npos);
  CHECK(out1.find("[PASS] word_level_exhaustive") != std::string::npos);
  CHECK(out1.find("[PASS] word_level_randomized") != std::string::npos);
  CHECK(out1.find("[PASS] pipeline_transparency") != std::string::npos);
}

TEST_CASE("injected gate fault is caught and named") {
  std::string out;
  CHECK(run("selftest --inject-fault", &out) != 0);
  CHECK(out.find("[FAIL] gate_truth_tables") != std::string::npos);
  CHECK(out.find("full_sub_bit") != std::string::npos);
}

TEST_CASE("verify runs the seeded toy network clean in both modes") {
  const fs::path out_dir = fs::temp_directory_path() / "hcim_verify_out";
  fs::remove_all(out_dir);
  std::string out;
  CHECK(run("verify --seed 11 --out " + out_dir.string(), &out) == 0);
  CHECK(out.find("ok") != std::string::npos);
  CHECK(fs::exists(out_dir / "verify_sparsity.csv"));
  CHECK(fs::exists(out_dir / "manifest.json"));
  const std::string csv = slurp(out_dir / "verify_sparsity.csv");
  CHECK(csv.rfind("layer,zero_fraction", 0) == 0);

  // binary mode has no zero code, so every layer reports zero sparsity
  const fs::path cfg = write_config("hcim_verify_binary.json",
                                    R"({"scheme": {"mode": "binary"}})");
  std::string bin_out;
  CHECK(run("verify --config " + cfg.string() + " --seed 11 --out " + out_dir.string(),
            &bin_out) == 0);
  const std::string bin_csv = slurp(out_dir / "verify_sparsity.csv");
  std::stringstream ss(bin_csv);
  std::string line;
  std::getline(ss, line);  // header
  int rows = 0;
  while (std::getline(ss, line)) {
    const size_t comma = line.find(',');
    const std::string frac = line.substr(comma + 1, line.find(',', comma + 1) - comma - 1);
    CHECK(std::stod(frac) == 0.0);
    ++rows;
  }
  CHECK(rows == 3);
  fs::remove_all(out_dir);
}

TEST_CASE("estimate is byte-identical across reruns with the same config and seed") {
  const fs::path a = fs::temp_directory_path() / "hcim_det_a";
  const fs::path b = fs::temp_directory_path() / "hcim_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string wl = (kSource / "workloads" / "resnet20.json").string();
  const fs::path cfg =
      write_config("hcim_det.json", "{\"workload\": \"" + wl + "\", \"seed\": 5}");
  CHECK(run("estimate --config " + cfg.string() + " --out " + a.string() + " --check-totals") == 0);
  CHECK(run("estimate --config " + cfg.string() + " --out " + b.string() + " --check-totals") == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  CHECK(compared >= 5);  // four mode reports plus the comparison table
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep emits the requested axis and embeds its checks") {
  const fs::path out_dir = fs::temp_directory_path() / "hcim_sweep_out";
  fs::remove_all(out_dir);
  const std::string wl = (kSource / "workloads" / "resnet20.json").string();
  const fs::path cfg = write_config("hcim_sweep.json", "{\"workload\": \"" + wl + "\"}");
  CHECK(run("sweep --config " + cfg.string() + " --axis sparsity --out " + out_dir.string()) == 0);
  const std::string csv = slurp(out_dir / "sweep_sparsity.csv");
  CHECK(csv.rfind("sparsity,", 0) == 0);
  // reductions at {0, 0.25, 0.5} follow the linear gating model
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  const double want[] = {0.0, 0.12, 0.24};
  for (int i = 0; i < 3; ++i) {
    REQUIRE(static_cast<bool>(std::getline(ss, line)));
    std::stringstream row(line);
    std::string field;
    std::getline(row, field, ',');  // sparsity
    std::getline(row, field, ',');  // dcim energy
    std::getline(row, field, ',');  // reduction
    CHECK(std::stod(field) == doctest::Approx(want[i]).epsilon(0.01));
  }

  CHECK(run("sweep --config " + cfg.string() + " --axis crossbar_size --out " +
            out_dir.string()) == 0);
  CHECK(slurp(out_dir / "sweep_crossbar_size.csv").rfind("crossbar,movement_events", 0) == 0);
  CHECK(run("sweep --config " + cfg.string() + " --axis adc_bits --out " + out_dir.string()) == 0);
  fs::remove_all(out_dir);
}

TEST_CASE("exit codes distinguish config errors") {
  CHECK(run("estimate --config /nonexistent/config.json") == cli::kConfigErr);
  const fs::path bad = write_config("hcim_bad_axis.json", "{}");
  CHECK(run("sweep --config " + bad.string() + " --axis bogus") == cli::kConfigErr);
  const fs::path bad_mode = write_config("hcim_bad_mode.json", R"({"modes": ["warp9"]})");
  CHECK(run("estimate --config " + bad_mode.string() + " --out " +
            (fs::temp_directory_path() / "hcim_badmode_out").string()) == cli::kConfigErr);

  // corrupted workload file: parse error with line context
  const fs::path bad_wl = write_config("hcim_bad_wl.json", "{\"layers\": [{\"kind\":");
  const fs::path cfg =
      write_config("hcim_bad_wl_cfg.json", "{\"workload\": \"" + bad_wl.string() + "\"}");
  std::string out;
  CHECK(run("estimate --config " + cfg.string() + " --out " +
            (fs::temp_directory_path() / "hcim_badwl_out").string(), &out) == cli::kConfigErr);
  CHECK(out.find("parse error") != std::string::npos);
  CHECK(out.find("line") != std::string::npos);
}

TEST_CASE("config file round-trips through the library loader") {
  const fs::path cfg = write_config("hcim_cfg_full.json", R"({
    "profile": "imagenet",
    "hardware": {"crossbar": "64x64", "cycle_ns": 2.0, "adc_sharing": 2},
    "modes": ["hcim_ternary"],
    "sparsity": {"source": "injected", "value": 0.25},
    "seed": 77,
    "alpha_target": 0.4
  })");
  const cli::ExperimentConfig c = cli::ExperimentConfig::from_file(cfg.string());
  CHECK(c.scheme.input_bits == 3);
  CHECK(c.scheme.ps_bits == 16);
  CHECK(c.hardware.xbar_rows == 64);
  CHECK(c.hardware.label == "B");
  CHECK(c.hardware.adc_sharing == 2);
  CHECK(c.sparsity_value == 0.25);
  CHECK(c.seed == 77);
  CHECK(c.alpha_target == 0.4);
  CHECK_FALSE(c.hash().empty());
  CHECK(c.hash() == cli::ExperimentConfig::from_file(cfg.string()).hash());

  const fs::path empty_modes = write_config("hcim_cfg_bad.json", R"({"modes": []})");
  CHECK_THROWS_AS(cli::ExperimentConfig::from_file(empty_modes.string()), ConfigError);
}

TEST_CASE("relative paths resolve through the config directory variable") {
  const fs::path dir = fs::temp_directory_path() / "hcim_cfgdir";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "env_config.json");
    out << R"({"seed": 123})";
  }
  setenv(cli::kConfigDirEnv, dir.string().c_str(), 1);
  const cli::ExperimentConfig c = cli::ExperimentConfig::from_file("env_config.json");
  CHECK(c.seed == 123);
  unsetenv(cli::kConfigDirEnv);
  fs::remove_all(dir);
}
