#include "hcim/xbar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hcim::xbar {

int64_t BitSlicedWeights::slice_significance(int k) const {
  if (bit_slice == 1 && k == slices_per_weight - 1)
    return -(int64_t{1} << (weight_bits - 1));
  return int64_t{1} << (k * bit_slice);
}

int64_t BitSlicedWeights::reassemble(int r, int lc) const {
  int64_t v = 0;
  for (int k = 0; k < slices_per_weight; ++k) v += cell(r, lc, k) * slice_significance(k);
  return v;
}

int TileGrid::rows_in_tile(int tr) const {
  const int remaining = total_rows - tr * xbar_rows;
  return remaining < xbar_rows ? remaining : xbar_rows;
}

TileGrid slice_weights(const Mat& weights, const quant::QuantScheme& scheme, int xbar_rows,
                       int xbar_cols) {
  scheme.validate();
  if (weights.empty()) throw std::invalid_argument("slice_weights: empty weight matrix");
  if (xbar_rows < 1 || xbar_cols < 1) throw std::invalid_argument("slice_weights: bad crossbar size");

  const int slices = scheme.slices_per_weight();
  const int logical_per_tile = xbar_cols / slices;
  if (logical_per_tile < 1)
    throw std::invalid_argument("slice_weights: weight word wider than crossbar");

  const int64_t w_max = (int64_t{1} << (scheme.weight_bits - 1)) - 1;
  bool any_negative = false;
  for (int r = 0; r < weights.rows; ++r) {
    for (int c = 0; c < weights.cols; ++c) {
      const int64_t w = weights.at(r, c);
      if (w < -w_max || w > w_max)
        throw std::invalid_argument("slice_weights: weight out of range at (" + std::to_string(r) +
                                    "," + std::to_string(c) + ") = " + std::to_string(w));
      if (w < 0) any_negative = true;
    }
  }
  if (any_negative && scheme.bit_slice != 1)
    throw std::invalid_argument("slice_weights: signed weights require bit_slice = 1");

  TileGrid grid;
  grid.xbar_rows = xbar_rows;
  grid.total_rows = weights.rows;
  grid.logical_cols_per_tile = logical_per_tile;
  grid.row_tiles = (weights.rows + xbar_rows - 1) / xbar_rows;
  grid.col_tiles = (weights.cols + logical_per_tile - 1) / logical_per_tile;

  const uint64_t word_mask = (uint64_t{1} << scheme.weight_bits) - 1;
  const uint64_t cell_mask = (uint64_t{1} << scheme.bit_slice) - 1;

  for (int tr = 0; tr < grid.row_tiles; ++tr) {
    for (int tc = 0; tc < grid.col_tiles; ++tc) {
      BitSlicedWeights t;
      t.rows = xbar_rows;
      t.logical_cols =
          std::min(logical_per_tile, weights.cols - tc * logical_per_tile);
      t.slices_per_weight = slices;
      t.bit_slice = scheme.bit_slice;
      t.weight_bits = scheme.weight_bits;
      t.cells.assign(static_cast<size_t>(t.rows) * t.logical_cols * slices, 0);
      const int r0 = tr * xbar_rows;
      const int rows_here = std::min(xbar_rows, weights.rows - r0);
      for (int r = 0; r < rows_here; ++r) {
        for (int lc = 0; lc < t.logical_cols; ++lc) {
          const uint64_t word =
              static_cast<uint64_t>(weights.at(r0 + r, tc * logical_per_tile + lc)) & word_mask;
          for (int k = 0; k < slices; ++k) {
            t.cells[(static_cast<size_t>(r) * t.logical_cols + lc) * slices + k] =
                static_cast<uint8_t>((word >> (k * scheme.bit_slice)) & cell_mask);
          }
        }
      }
      grid.tiles.push_back(std::move(t));
    }
  }
  return grid;
}

BitStreamPlan stream_input(std::span<const int64_t> x, const quant::QuantScheme& scheme) {
  scheme.validate();
  const int64_t in_max = (int64_t{1} << scheme.input_bits) - 1;
  BitStreamPlan plan;
  plan.steps = scheme.steps();
  plan.n = static_cast<int>(x.size());
  plan.digits.assign(static_cast<size_t>(plan.steps) * plan.n, 0);
  const uint64_t digit_mask = (uint64_t{1} << scheme.bit_stream) - 1;
  for (int i = 0; i < plan.n; ++i) {
    if (x[i] < 0 || x[i] > in_max)
      throw std::invalid_argument("stream_input: input out of range at index " +
                                  std::to_string(i) + " = " + std::to_string(x[i]));
    for (int j = 0; j < plan.steps; ++j) {
      plan.digits[static_cast<size_t>(j) * plan.n + i] =
          static_cast<uint32_t>((static_cast<uint64_t>(x[i]) >> (j * scheme.bit_stream)) & digit_mask);
    }
  }
  return plan;
}

std::vector<int64_t> column_sums(const BitSlicedWeights& tile, std::span<const uint32_t> digits) {
  if (static_cast<int>(digits.size()) != tile.rows)
    throw std::invalid_argument("column_sums: digit vector length must equal tile rows");
  std::vector<int64_t> sums(tile.physical_columns(), 0);
  for (int r = 0; r < tile.rows; ++r) {
    const uint32_t d = digits[r];
    if (d == 0) continue;
    const uint8_t* row = &tile.cells[static_cast<size_t>(r) * tile.physical_columns()];
    for (int c = 0; c < tile.physical_columns(); ++c) sums[c] += static_cast<int64_t>(d) * row[c];
  }
  return sums;
}

ComparatorBank ComparatorBank::from_scheme(const quant::QuantScheme& scheme) {
  ComparatorBank b;
  b.mode = scheme.mode;
  b.comparators_per_column = scheme.mode == quant::PsqMode::ternary ? 2 : 1;
  b.alpha = scheme.alpha;
  return b;
}

CompareResult compare(std::span<const int64_t> ps, const ComparatorBank& bank) {
  quant::QuantScheme s;
  s.mode = bank.mode;
  s.alpha = bank.alpha;
  CompareResult r;
  r.codes.reserve(ps.size());
  for (int64_t v : ps) {
    const quant::TernaryCode c = quant::quantize_partial_sum(v, s);
    if (c == quant::TernaryCode::zero) ++r.zero_count;
    r.codes.push_back(c);
  }
  return r;
}

std::vector<int64_t> ideal_adc(std::span<const int64_t> ps, int adc_bits, int64_t clip) {
  if (adc_bits < 1 || adc_bits > 30) throw std::invalid_argument("ideal_adc: bad adc_bits");
  if (clip <= 0) throw std::invalid_argument("ideal_adc: clip must be positive");
  const int64_t levels = int64_t{1} << adc_bits;
  const double delta = 2.0 * static_cast<double>(clip) / static_cast<double>(levels);
  std::vector<int64_t> out;
  out.reserve(ps.size());
  for (int64_t v : ps) {
    int64_t idx = static_cast<int64_t>(
        std::floor((static_cast<double>(v) + static_cast<double>(clip)) / delta));
    idx = std::clamp<int64_t>(idx, 0, levels - 1);
    const double level = -static_cast<double>(clip) + (static_cast<double>(idx) + 0.5) * delta;
    out.push_back(static_cast<int64_t>(std::floor(level + 0.5)));
  }
  return out;
}

}  // namespace hcim::xbar
