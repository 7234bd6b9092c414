#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcim/costmodel.hpp"
#include "hcim/mapper.hpp"
#include "hcim/quant.hpp"

namespace hcim::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kConfigDirEnv = "HCIM_CONFIG_DIR";

// Exit codes: 0 success, 2 config error, 3 verification mismatch, 4 internal
// invariant violation.
enum ExitCode { kOk = 0, kConfigErr = 2, kMismatch = 3, kInvariant = 4 };

struct SweepConfig {
  std::vector<double> sparsity_points{0.0, 0.25, 0.5};
  std::vector<int> adc_bits{7, 6, 4};
  std::vector<int> crossbar_sizes{128, 64};
};

struct ExperimentConfig {
  std::string profile = "cifar";  // cifar | imagenet
  quant::QuantScheme scheme = quant::QuantScheme::cifar();
  mapper::HardwareConfig hardware = mapper::HardwareConfig::config_a();
  std::string workload_path;
  std::string cost_table_path;  // empty -> built-in defaults
  std::vector<std::string> modes{"hcim_ternary", "hcim_binary", "adc7", "adc4"};
  bool sparsity_injected = true;
  double sparsity_value = 0.5;
  SweepConfig sweep;
  uint64_t seed = 1;
  std::string out_dir = "out";
  double alpha_target = 0.5;

  void apply_profile(const std::string& name);
  void apply_crossbar(const std::string& spec);  // "128x128" | "64x64"

  // Resolves a relative path against HCIM_CONFIG_DIR when not found locally.
  static ExperimentConfig from_file(const std::string& path);
  std::string canonical_json() const;
  std::string hash() const;  // FNV-1a of the canonical form

  cost::CostTable load_cost_table() const;
  mapper::Workload load_workload_or_toy() const;
};

struct Manifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<std::string> outputs;

  void write(const std::string& path) const;
};

int cmd_verify(const ExperimentConfig& config);
int cmd_estimate(const ExperimentConfig& config, bool check_totals);
int cmd_sweep(const ExperimentConfig& config, const std::string& axis);

}  // namespace hcim::cli
