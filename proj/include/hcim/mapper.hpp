#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcim/costmodel.hpp"
#include "hcim/dcim.hpp"
#include "hcim/mat.hpp"
#include "hcim/quant.hpp"
#include "hcim/xbar.hpp"

namespace hcim::mapper {

enum class LayerKind { conv, fc };

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::fc;
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int input_h = 1;
  int input_w = 1;
  int stride = 1;
  int padding = 0;

  void validate() const;
  int out_h() const { return (input_h + 2 * padding - kernel) / stride + 1; }
  int out_w() const { return (input_w + 2 * padding - kernel) / stride + 1; }
  int64_t mvm_rows() const;   // k^2 * in_channels (conv) or in_features (fc)
  int64_t mvm_cols() const { return out_channels; }
  int64_t mvm_count() const;  // output positions per image
};

struct Workload {
  int version = 1;
  std::string name;
  std::vector<LayerSpec> layers;
};

Workload load_workload(const std::string& path);

struct HardwareConfig {
  int xbar_rows = 128;
  int xbar_cols = 128;
  std::string label = "A";  // picks the dcim_<label> cost entry
  dcim::TimingParams timing;
  int adc_sharing = 1;  // ADCs instantiated per crossbar

  std::string dcim_cost_entry() const { return "dcim_" + label; }
  static HardwareConfig config_a();
  static HardwareConfig config_b();
  static HardwareConfig for_crossbar(int size);  // 128 -> A, 64 -> B
};

struct TilePlan {
  int row_tiles = 0;
  int col_tiles = 0;
  int logical_cols_per_tile = 0;
  std::vector<int> physical_cols;  // per column tile
  int steps = 0;
  int accumulation_depth = 0;  // row tiles summed per output

  int64_t physical_cols_total() const;
  // Scale factors needed by column tile tc: steps * physical columns.
  int64_t sf_count(int tc) const { return static_cast<int64_t>(steps) * physical_cols[tc]; }
};

TilePlan plan(const LayerSpec& layer, const quant::QuantScheme& scheme, int xbar_rows,
              int xbar_cols);

// Calibrated parameters for one layer: the ternary threshold, per-tile scale
// factors (positional weights folded in) and the activation requantization.
struct LayerParams {
  int64_t alpha = 0;
  std::vector<quant::ScaleFactorSet> tile_sf;  // row-major (row tile, col tile)
  quant::FixedPoint requant_scale;
};

struct Calibration {
  std::vector<LayerParams> layers;
};

struct LayerStats {
  std::string layer;
  double zero_fraction = 0.0;
  int64_t zero_codes = 0;
  int64_t total_codes = 0;
  uint64_t overflow_saturations = 0;
  uint64_t cycles = 0;
};

struct FunctionalResult {
  Mat outputs;  // final layer logical accumulators, one row per image
  std::vector<LayerStats> layer_stats;
  double zero_fraction = 0.0;
  uint64_t overflow_saturations = 0;
};

// Least-squares calibration pass over the workload's own activations:
// quantile alpha per layer (ternary), per-tile scale factors, and a
// power-of-two requantization scale per layer.
Calibration calibrate(const Workload& workload, const std::vector<Mat>& weights,
                      const Mat& inputs, const quant::QuantScheme& scheme,
                      const HardwareConfig& hw, double alpha_target);

// Drive crossbar -> comparator -> DCiM per tile and bit-stream step, checking
// the array against the software reference after every step and every tile.
// Any disagreement throws MismatchError with (layer, tile, column, step).
FunctionalResult run_functional(const Workload& workload, const std::vector<Mat>& weights,
                                const Mat& inputs, const quant::QuantScheme& scheme,
                                const HardwareConfig& hw, const Calibration& cal);

struct ToyNet {
  Workload workload;
  std::vector<Mat> weights;
  Mat inputs;
};

// Deterministic 3-layer conv+fc network generated from a seed; shapes tile
// onto both 128x128 and 64x64 crossbars.
ToyNet make_toy_network(uint64_t seed, const quant::QuantScheme& scheme);

enum class ModeKind { hcim_binary, hcim_ternary, adc_baseline };

struct ModeSpec {
  ModeKind kind = ModeKind::hcim_ternary;
  int adc_bits = 0;
  std::string name;
  std::string adc_entry;

  static ModeSpec parse(const std::string& name);  // hcim_ternary|hcim_binary|adc7|adc6|adc4
};

struct SparsitySpec {
  bool injected = true;
  double value = 0.5;
  std::vector<double> per_layer;  // used when injected == false (measured)
};

// Analytical cost roll-up for one (workload, mode): operation counts from the
// tile plans, DCiM energy from synthetic event counters at the requested
// sparsity, ADC baselines from the cost table. Latency never depends on
// sparsity.
cost::RunReport estimate(const Workload& workload, const quant::QuantScheme& scheme,
                         const ModeSpec& mode, const cost::CostTable& table,
                         const SparsitySpec& sparsity, const HardwareConfig& hw);

// Inter-tile partial-sum words moved per image; grows as crossbars shrink.
int64_t movement_events(const Workload& workload, const quant::QuantScheme& scheme,
                        const HardwareConfig& hw);

}  // namespace hcim::mapper
