#include "hcim/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hcim/errors.hpp"
#include "json.hpp"

namespace hcim::mapper {

namespace {

Mat im2col(const Mat& acts, const LayerSpec& l) {
  if (l.kind == LayerKind::fc) {
    if (acts.cols != l.in_channels)
      throw ConfigError("layer " + l.name + ": expected " + std::to_string(l.in_channels) +
                        " input features, got " + std::to_string(acts.cols));
    return acts;
  }
  const int features = l.in_channels * l.input_h * l.input_w;
  if (acts.cols != features)
    throw ConfigError("layer " + l.name + ": expected " + std::to_string(features) +
                      " input features, got " + std::to_string(acts.cols));
  const int oh = l.out_h();
  const int ow = l.out_w();
  Mat patches(acts.rows * oh * ow, static_cast<int>(l.mvm_rows()));
  for (int img = 0; img < acts.rows; ++img) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const int prow = (img * oh + oy) * ow + ox;
        for (int ch = 0; ch < l.in_channels; ++ch) {
          for (int ky = 0; ky < l.kernel; ++ky) {
            for (int kx = 0; kx < l.kernel; ++kx) {
              const int iy = oy * l.stride + ky - l.padding;
              const int ix = ox * l.stride + kx - l.padding;
              int64_t v = 0;
              if (iy >= 0 && iy < l.input_h && ix >= 0 && ix < l.input_w)
                v = acts.at(img, (ch * l.input_h + iy) * l.input_w + ix);
              patches.at(prow, (ch * l.kernel + ky) * l.kernel + kx) = v;
            }
          }
        }
      }
    }
  }
  return patches;
}

// Input slice feeding one row tile, zero-padded to the crossbar height.
std::vector<int64_t> tile_input(const Mat& patches, int row, int r0, int rows_in, int padded) {
  std::vector<int64_t> x(static_cast<size_t>(padded), 0);
  for (int r = 0; r < rows_in; ++r) x[r] = patches.at(row, r0 + r);
  return x;
}

Mat tile_weight_block(const Mat& W, int r0, int rows_in, int c0, int cols_in) {
  Mat block(rows_in, cols_in);
  for (int r = 0; r < rows_in; ++r)
    for (int c = 0; c < cols_in; ++c) block.at(r, c) = W.at(r0 + r, c0 + c);
  return block;
}

Mat patch_block(const Mat& patches, int c0, int cols_in) {
  Mat block(patches.rows, cols_in);
  for (int r = 0; r < patches.rows; ++r)
    for (int c = 0; c < cols_in; ++c) block.at(r, c) = patches.at(r, c0 + c);
  return block;
}

// Fold factor merged into a stored scale factor: input-bit positional weight
// for step j times the slice significance of physical column c.
int64_t fold_factor(const xbar::BitSlicedWeights& tile, const quant::QuantScheme& scheme, int j,
                    int c) {
  const int k = c % tile.slices_per_weight;
  return (int64_t{1} << (j * scheme.bit_stream)) * tile.slice_significance(k);
}

// Reshape per-patch logical outputs back into channel-major activations.
Mat fold_outputs(const Mat& logical, const LayerSpec& l, int images) {
  const int positions = static_cast<int>(l.mvm_count());
  Mat acts(images, l.out_channels * positions);
  for (int img = 0; img < images; ++img)
    for (int pos = 0; pos < positions; ++pos)
      for (int ch = 0; ch < l.out_channels; ++ch)
        acts.at(img, ch * positions + pos) = logical.at(img * positions + pos, ch);
  return acts;
}

quant::QuantScheme with_alpha(const quant::QuantScheme& scheme, int64_t alpha) {
  quant::QuantScheme s = scheme;
  s.alpha = alpha;
  return s;
}

}  // namespace

void LayerSpec::validate() const {
  if (in_channels < 1 || out_channels < 1) throw ConfigError("layer " + name + ": bad channel count");
  if (kind == LayerKind::conv) {
    if (kernel < 1 || stride < 1 || padding < 0 || input_h < 1 || input_w < 1)
      throw ConfigError("layer " + name + ": bad conv geometry");
    if (out_h() < 1 || out_w() < 1)
      throw ConfigError("layer " + name + ": kernel does not fit the input");
  }
}

int64_t LayerSpec::mvm_rows() const {
  if (kind == LayerKind::fc) return in_channels;
  return static_cast<int64_t>(kernel) * kernel * in_channels;
}

int64_t LayerSpec::mvm_count() const {
  if (kind == LayerKind::fc) return 1;
  return static_cast<int64_t>(out_h()) * out_w();
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("workload parse error in " + path + ": " + e.what());
  }
  Workload w;
  try {
    w.version = j.value("version", 1);
    w.name = j.value("name", std::string{"workload"});
    if (!j.contains("layers") || !j["layers"].is_array())
      throw ConfigError("workload " + path + " must contain a \"layers\" array");
    int idx = 0;
    for (const auto& lj : j["layers"]) {
      LayerSpec l;
      const std::string kind = lj.at("kind").get<std::string>();
      if (kind == "conv") l.kind = LayerKind::conv;
      else if (kind == "fc") l.kind = LayerKind::fc;
      else throw ConfigError("workload layer " + std::to_string(idx) + ": unknown kind " + kind);
      l.name = lj.value("name", "layer" + std::to_string(idx));
      l.in_channels = lj.at("in_channels").get<int>();
      l.out_channels = lj.at("out_channels").get<int>();
      l.kernel = lj.value("kernel", 1);
      l.input_h = lj.value("input_h", 1);
      l.input_w = lj.value("input_w", 1);
      l.stride = lj.value("stride", 1);
      l.padding = lj.value("padding", 0);
      l.validate();
      w.layers.push_back(l);
      ++idx;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("workload " + path + ": " + e.what());
  }
  return w;
}

HardwareConfig HardwareConfig::config_a() {
  HardwareConfig h;
  h.xbar_rows = 128;
  h.xbar_cols = 128;
  h.label = "A";
  return h;
}

HardwareConfig HardwareConfig::config_b() {
  HardwareConfig h;
  h.xbar_rows = 64;
  h.xbar_cols = 64;
  h.label = "B";
  return h;
}

HardwareConfig HardwareConfig::for_crossbar(int size) {
  if (size == 128) return config_a();
  if (size == 64) return config_b();
  throw ConfigError("unsupported crossbar size " + std::to_string(size) +
                    " (expected 128 or 64)");
}

int64_t TilePlan::physical_cols_total() const {
  int64_t t = 0;
  for (int pc : physical_cols) t += pc;
  return t;
}

TilePlan plan(const LayerSpec& layer, const quant::QuantScheme& scheme, int xbar_rows,
              int xbar_cols) {
  layer.validate();
  scheme.validate();
  const int slices = scheme.slices_per_weight();
  const int logical_per_tile = xbar_cols / slices;
  if (logical_per_tile < 1)
    throw ConfigError("layer " + layer.name + ": weight word wider than the crossbar");
  TilePlan p;
  p.steps = scheme.steps();
  p.logical_cols_per_tile = logical_per_tile;
  p.row_tiles = static_cast<int>((layer.mvm_rows() + xbar_rows - 1) / xbar_rows);
  p.col_tiles = static_cast<int>((layer.mvm_cols() + logical_per_tile - 1) / logical_per_tile);
  p.accumulation_depth = p.row_tiles;
  for (int tc = 0; tc < p.col_tiles; ++tc) {
    const int logical =
        std::min<int64_t>(logical_per_tile, layer.mvm_cols() - int64_t{tc} * logical_per_tile);
    p.physical_cols.push_back(logical * slices);
  }
  return p;
}

Calibration calibrate(const Workload& workload, const std::vector<Mat>& weights,
                      const Mat& inputs, const quant::QuantScheme& scheme,
                      const HardwareConfig& hw, double alpha_target) {
  scheme.validate();
  if (weights.size() != workload.layers.size())
    throw ConfigError("calibrate: one weight matrix per layer required");

  Calibration cal;
  Mat acts = inputs;
  const int images = inputs.rows;
  for (size_t li = 0; li < workload.layers.size(); ++li) {
    const LayerSpec& layer = workload.layers[li];
    const Mat& W = weights[li];
    if (W.rows != layer.mvm_rows() || W.cols != layer.mvm_cols())
      throw ConfigError("calibrate: weight shape mismatch for layer " + layer.name);
    const Mat patches = im2col(acts, layer);
    const xbar::TileGrid grid = xbar::slice_weights(W, scheme, hw.xbar_rows, hw.xbar_cols);
    const int steps = scheme.steps();

    // Pass 1: raw column sums per tile, pooled for the threshold quantile.
    std::vector<std::vector<std::vector<int64_t>>> tile_cs(grid.tiles.size());
    std::vector<int64_t> pooled;
    for (size_t t = 0; t < grid.tiles.size(); ++t) {
      const int tr = static_cast<int>(t) / grid.col_tiles;
      const xbar::BitSlicedWeights& tile = grid.tiles[t];
      for (int row = 0; row < patches.rows; ++row) {
        const std::vector<int64_t> x =
            tile_input(patches, row, grid.row_offset(tr), grid.rows_in_tile(tr), tile.rows);
        const xbar::BitStreamPlan stream = xbar::stream_input(x, scheme);
        for (int j = 0; j < steps; ++j) {
          std::vector<int64_t> cs = xbar::column_sums(tile, stream.step(j));
          pooled.insert(pooled.end(), cs.begin(), cs.end());
          tile_cs[t].push_back(std::move(cs));
        }
      }
    }

    LayerParams params;
    params.alpha = scheme.mode == quant::PsqMode::ternary
                       ? quant::calibrate_alpha(pooled, alpha_target)
                       : 0;
    const quant::QuantScheme scheme_l = with_alpha(scheme, params.alpha);

    // Pass 2: least-squares scale factors with positional weights folded in.
    for (size_t t = 0; t < grid.tiles.size(); ++t) {
      const xbar::BitSlicedWeights& tile = grid.tiles[t];
      const int phys = tile.physical_columns();
      std::vector<std::vector<quant::SfSample>> samples(static_cast<size_t>(steps) * phys);
      size_t rec = 0;
      for (int row = 0; row < patches.rows; ++row) {
        for (int j = 0; j < steps; ++j, ++rec) {
          const std::vector<int64_t>& cs = tile_cs[t][rec];
          for (int c = 0; c < phys; ++c) {
            const int p = quant::decode_ternary(quant::quantize_partial_sum(cs[c], scheme_l));
            samples[static_cast<size_t>(j) * phys + c].push_back(
                {cs[c] * fold_factor(tile, scheme, j, c), p});
          }
        }
      }
      params.tile_sf.push_back(
          quant::calibrate_scale_factors(steps, phys, scheme.sf_bits, samples));
    }

    // Reference forward pass to size the requantization shift and produce
    // the next layer's activations.
    Mat logical(patches.rows, static_cast<int>(layer.mvm_cols()));
    for (size_t t = 0; t < grid.tiles.size(); ++t) {
      const int tr = static_cast<int>(t) / grid.col_tiles;
      const int tc = static_cast<int>(t) % grid.col_tiles;
      const xbar::BitSlicedWeights& tile = grid.tiles[t];
      const Mat in_block =
          patch_block(patches, grid.row_offset(tr), grid.rows_in_tile(tr));
      const Mat w_block = tile_weight_block(W, grid.row_offset(tr), grid.rows_in_tile(tr),
                                            grid.col_offset(tc), tile.logical_cols);
      const quant::GoldenResult g =
          quant::golden_psq_layer(in_block, w_block, scheme_l, params.tile_sf[t]);
      for (int row = 0; row < patches.rows; ++row)
        for (int lc = 0; lc < tile.logical_cols; ++lc)
          for (int k = 0; k < tile.slices_per_weight; ++k)
            logical.at(row, grid.col_offset(tc) + lc) +=
                g.ps.at(row, lc * tile.slices_per_weight + k);
    }

    int64_t maxabs = 0;
    for (int64_t v : logical.data) maxabs = std::max(maxabs, v < 0 ? -v : v);
    params.requant_scale = {1, 1,
                            -quant::choose_exponent(static_cast<double>(maxabs), scheme.input_bits)};
    cal.layers.push_back(std::move(params));

    Mat next = fold_outputs(logical, layer, images);
    for (int64_t& v : next.data)
      v = quant::requantize_activation(v, scheme.input_bits, cal.layers.back().requant_scale);
    acts = std::move(next);
  }
  return cal;
}

FunctionalResult run_functional(const Workload& workload, const std::vector<Mat>& weights,
                                const Mat& inputs, const quant::QuantScheme& scheme,
                                const HardwareConfig& hw, const Calibration& cal) {
  scheme.validate();
  if (weights.size() != workload.layers.size())
    throw ConfigError("run_functional: one weight matrix per layer required");
  if (cal.layers.size() != workload.layers.size())
    throw ConfigError("run_functional: calibration does not match the workload");

  FunctionalResult result;
  Mat acts = inputs;
  const int images = inputs.rows;
  for (size_t li = 0; li < workload.layers.size(); ++li) {
    const LayerSpec& layer = workload.layers[li];
    const LayerParams& params = cal.layers[li];
    const Mat& W = weights[li];
    if (W.rows != layer.mvm_rows() || W.cols != layer.mvm_cols())
      throw ConfigError("run_functional: weight shape mismatch for layer " + layer.name);
    const Mat patches = im2col(acts, layer);
    const xbar::TileGrid grid = xbar::slice_weights(W, scheme, hw.xbar_rows, hw.xbar_cols);
    const int steps = scheme.steps();
    const quant::QuantScheme scheme_l = with_alpha(scheme, params.alpha);
    const xbar::ComparatorBank bank = xbar::ComparatorBank::from_scheme(scheme_l);
    if (params.tile_sf.size() != grid.tiles.size())
      throw ConfigError("run_functional: calibration tiling mismatch for layer " + layer.name);

    LayerStats stats;
    stats.layer = layer.name;
    Mat logical(patches.rows, static_cast<int>(layer.mvm_cols()));

    for (size_t t = 0; t < grid.tiles.size(); ++t) {
      const int tr = static_cast<int>(t) / grid.col_tiles;
      const int tc = static_cast<int>(t) % grid.col_tiles;
      const xbar::BitSlicedWeights& tile = grid.tiles[t];
      const int phys = tile.physical_columns();
      const quant::ScaleFactorSet& sf = params.tile_sf[t];

      // Independent software reference for the whole tile.
      const Mat in_block = patch_block(patches, grid.row_offset(tr), grid.rows_in_tile(tr));
      const Mat w_block = tile_weight_block(W, grid.row_offset(tr), grid.rows_in_tile(tr),
                                            grid.col_offset(tc), tile.logical_cols);
      const quant::GoldenResult golden =
          quant::golden_psq_layer(in_block, w_block, scheme_l, sf);

      dcim::DcimArray array = dcim::load_scale_factors(sf, scheme.ps_bits, hw.timing);
      std::vector<int64_t> expected(phys, 0);
      for (int row = 0; row < patches.rows; ++row) {
        std::fill(expected.begin(), expected.end(), 0);
        const std::vector<int64_t> x =
            tile_input(patches, row, grid.row_offset(tr), grid.rows_in_tile(tr), tile.rows);
        const xbar::BitStreamPlan stream = xbar::stream_input(x, scheme);
        for (int j = 0; j < steps; ++j) {
          const std::vector<int64_t> cs = xbar::column_sums(tile, stream.step(j));
          const xbar::CompareResult cmp = xbar::compare(cs, bank);
          stats.zero_codes += cmp.zero_count;
          stats.total_codes += static_cast<int64_t>(cmp.codes.size());
          array.apply_step(cmp.codes, j);
          for (int c = 0; c < phys; ++c) {
            const int p = quant::decode_ternary(cmp.codes[c]);
            expected[c] =
                quant::saturate_to_bits(expected[c] + p * sf.signed_magnitude(j, c), scheme.ps_bits);
          }
          const std::vector<int64_t> got = array.read_partial_sums();
          for (int c = 0; c < phys; ++c) {
            if (got[c] != expected[c])
              throw MismatchError("layer " + layer.name + " tile (" + std::to_string(tr) + "," +
                                  std::to_string(tc) + ") column " + std::to_string(c) + " step " +
                                  std::to_string(j) + ": array " + std::to_string(got[c]) +
                                  " != reference " + std::to_string(expected[c]));
          }
        }
        array.flush();
        const std::vector<int64_t> final_ps = array.read_partial_sums();
        for (int c = 0; c < phys; ++c) {
          if (final_ps[c] != golden.ps.at(row, c))
            throw MismatchError("layer " + layer.name + " tile (" + std::to_string(tr) + "," +
                                std::to_string(tc) + ") column " + std::to_string(c) + " step " +
                                std::to_string(steps - 1) + ": array " +
                                std::to_string(final_ps[c]) + " != golden " +
                                std::to_string(golden.ps.at(row, c)));
        }
        // Digital reduction: slice columns of one logical output, then row
        // tiles, in a widened accumulator.
        for (int lc = 0; lc < tile.logical_cols; ++lc)
          for (int k = 0; k < tile.slices_per_weight; ++k)
            logical.at(row, grid.col_offset(tc) + lc) +=
                final_ps[lc * tile.slices_per_weight + k];
        array.reset_partial_sums();
      }
      stats.overflow_saturations += array.counters().overflow_saturations;
      stats.cycles += array.counters().cycles;
    }

    stats.zero_fraction = stats.total_codes
                              ? static_cast<double>(stats.zero_codes) / stats.total_codes
                              : 0.0;
    result.layer_stats.push_back(stats);
    result.overflow_saturations += stats.overflow_saturations;

    Mat next = fold_outputs(logical, layer, images);
    if (li + 1 < workload.layers.size()) {
      for (int64_t& v : next.data)
        v = quant::requantize_activation(v, scheme.input_bits, params.requant_scale);
    }
    acts = std::move(next);
  }

  int64_t zeros = 0;
  int64_t total = 0;
  for (const LayerStats& s : result.layer_stats) {
    zeros += s.zero_codes;
    total += s.total_codes;
  }
  result.zero_fraction = total ? static_cast<double>(zeros) / total : 0.0;
  result.outputs = std::move(acts);
  return result;
}

ToyNet make_toy_network(uint64_t seed, const quant::QuantScheme& scheme) {
  scheme.validate();
  ToyNet net;
  net.workload.name = "toy3";
  LayerSpec conv;
  conv.name = "conv1";
  conv.kind = LayerKind::conv;
  conv.in_channels = 3;
  conv.out_channels = 8;
  conv.kernel = 3;
  conv.input_h = 8;
  conv.input_w = 8;
  LayerSpec fc1;
  fc1.name = "fc1";
  fc1.kind = LayerKind::fc;
  fc1.in_channels = conv.out_channels * conv.out_h() * conv.out_w();
  fc1.out_channels = 32;
  LayerSpec fc2;
  fc2.name = "fc2";
  fc2.kind = LayerKind::fc;
  fc2.in_channels = 32;
  fc2.out_channels = 10;
  net.workload.layers = {conv, fc1, fc2};

  std::mt19937_64 rng(seed);
  const int64_t w_max = (int64_t{1} << (scheme.weight_bits - 1)) - 1;
  const int64_t in_max = (int64_t{1} << scheme.input_bits) - 1;
  std::uniform_int_distribution<int64_t> wdist(-w_max, w_max);
  std::uniform_int_distribution<int64_t> xdist(0, in_max);
  for (const LayerSpec& l : net.workload.layers) {
    Mat W(static_cast<int>(l.mvm_rows()), static_cast<int>(l.mvm_cols()));
    for (int64_t& v : W.data) v = wdist(rng);
    net.weights.push_back(std::move(W));
  }
  net.inputs = Mat(2, conv.in_channels * conv.input_h * conv.input_w);
  for (int64_t& v : net.inputs.data) v = xdist(rng);
  return net;
}

ModeSpec ModeSpec::parse(const std::string& name) {
  ModeSpec m;
  m.name = name;
  if (name == "hcim_ternary") {
    m.kind = ModeKind::hcim_ternary;
  } else if (name == "hcim_binary") {
    m.kind = ModeKind::hcim_binary;
  } else if (name == "adc7") {
    m.kind = ModeKind::adc_baseline;
    m.adc_bits = 7;
    m.adc_entry = "sar7";
  } else if (name == "adc6") {
    m.kind = ModeKind::adc_baseline;
    m.adc_bits = 6;
    m.adc_entry = "sar6";
  } else if (name == "adc4") {
    m.kind = ModeKind::adc_baseline;
    m.adc_bits = 4;
    m.adc_entry = "flash4";
  } else {
    throw ConfigError("unknown mode '" + name +
                      "' (expected hcim_ternary, hcim_binary, adc7, adc6 or adc4)");
  }
  return m;
}

cost::RunReport estimate(const Workload& workload, const quant::QuantScheme& scheme,
                         const ModeSpec& mode, const cost::CostTable& table,
                         const SparsitySpec& sparsity, const HardwareConfig& hw) {
  scheme.validate();
  if (!sparsity.injected && sparsity.per_layer.size() != workload.layers.size())
    throw ConfigError("estimate: measured sparsity needs one value per layer");

  cost::RunReport report;
  report.workload = workload.name;
  report.mode = mode.name;
  report.technology = table.technology();
  const int steps = scheme.steps();
  const int ncomp = mode.kind == ModeKind::hcim_ternary ? 2 : 1;
  const cost::DcimEnergyParams dcim_params =
      cost::DcimEnergyParams::calibrated(steps, table.at(hw.dcim_cost_entry()).energy_pj);
  const int64_t ps_bytes = (scheme.ps_bits + 7) / 8;

  double weighted_sparsity = 0.0;
  double total_colsteps = 0.0;
  bool extrapolated = false;

  for (size_t li = 0; li < workload.layers.size(); ++li) {
    const LayerSpec& layer = workload.layers[li];
    const TilePlan p = plan(layer, scheme, hw.xbar_rows, hw.xbar_cols);
    const int64_t crossbars = int64_t{p.row_tiles} * p.col_tiles;
    const int64_t colprocs_per_mvm = int64_t{p.row_tiles} * p.physical_cols_total();
    const int64_t colprocs = colprocs_per_mvm * layer.mvm_count();
    const int64_t colsteps = colprocs * steps;
    int max_tile_phys = 0;
    for (int pc : p.physical_cols) max_tile_phys = std::max(max_tile_phys, pc);

    double f = 0.0;
    if (mode.kind == ModeKind::hcim_ternary)
      f = sparsity.injected ? sparsity.value : sparsity.per_layer[li];
    if (f < 0.0 || f > 1.0) throw ConfigError("estimate: sparsity must be in [0,1]");
    if (f == 1.0) extrapolated = true;
    weighted_sparsity += f * static_cast<double>(colsteps);
    total_colsteps += static_cast<double>(colsteps);

    cost::LayerCost lc;
    lc.layer = layer.name;

    const cost::CostEntry& xb = table.at("crossbar_mvm");
    lc.components.push_back(
        {"crossbar_mvm",
         {static_cast<double>(colprocs) * xb.energy_pj,
          static_cast<double>(layer.mvm_count()) * xb.latency_ns,
          static_cast<double>(crossbars) * xb.area_mm2}});

    if (mode.kind == ModeKind::adc_baseline) {
      const cost::CostEntry& adc = table.at(mode.adc_entry);
      // Table costs are per column processed; one ADC (per `sharing`) serves
      // the whole crossbar, so conversions serialize over its columns.
      const cost::AdcCost ac = cost::adc_baseline_cost(colprocs, 1, adc, hw.adc_sharing);
      lc.components.push_back(
          {mode.adc_entry,
           {ac.energy_pj,
            static_cast<double>(layer.mvm_count()) * static_cast<double>(max_tile_phys) *
                adc.latency_ns / hw.adc_sharing,
            static_cast<double>(crossbars) * hw.adc_sharing * adc.area_mm2}});
      const cost::CostEntry& sa = table.at("shift_add");
      lc.components.push_back({"shift_add",
                               {static_cast<double>(colsteps) * sa.energy_pj, 0.0,
                                static_cast<double>(crossbars) * sa.area_mm2}});
    } else {
      const cost::CostEntry& comp = table.at("comparator");
      lc.components.push_back(
          {"comparator",
           {static_cast<double>(colsteps) * ncomp * comp.energy_pj, 0.0,
            static_cast<double>(crossbars) * hw.xbar_cols * ncomp * comp.area_mm2}});

      dcim::EventCounters ec;
      const uint64_t gated = static_cast<uint64_t>(std::llround(f * static_cast<double>(colsteps)));
      const uint64_t active = static_cast<uint64_t>(colsteps) - gated;
      ec.precharge_reads = active;
      ec.computes = active;
      ec.stores = active;
      ec.gated_columns = gated;
      const dcim::TimingResult tr = dcim::timing_model(static_cast<uint64_t>(steps),
                                                       hw.xbar_cols, hw.timing);
      lc.components.push_back(
          {"dcim",
           {cost::dcim_energy(ec, dcim_params),
            static_cast<double>(layer.mvm_count()) * static_cast<double>(tr.cycles) *
                hw.timing.cycle_ns,
            static_cast<double>(crossbars) * table.at(hw.dcim_cost_entry()).area_mm2}});
    }

    const cost::CostEntry& mv = table.at("ps_move");
    const int64_t move_events =
        int64_t{p.row_tiles - 1} * layer.mvm_cols() * layer.mvm_count();
    lc.components.push_back(
        {"ps_move",
         {static_cast<double>(move_events) * ps_bytes * mv.energy_pj,
          static_cast<double>(move_events) * mv.latency_ns, 0.0}});

    report.layers.push_back(std::move(lc));
  }

  report.sparsity = total_colsteps > 0 ? weighted_sparsity / total_colsteps : 0.0;
  if (extrapolated) report.notes.push_back("sparsity 1.0 point is model-extrapolated");
  if (!table.user_supplied().empty()) {
    std::string note = "user-supplied cost entries:";
    for (const auto& n : table.user_supplied()) note += " " + n;
    report.notes.push_back(note);
  }
  return report;
}

int64_t movement_events(const Workload& workload, const quant::QuantScheme& scheme,
                        const HardwareConfig& hw) {
  int64_t events = 0;
  for (const LayerSpec& layer : workload.layers) {
    const TilePlan p = plan(layer, scheme, hw.xbar_rows, hw.xbar_cols);
    events += int64_t{p.row_tiles - 1} * layer.mvm_cols() * layer.mvm_count();
  }
  return events;
}

}  // namespace hcim::mapper
