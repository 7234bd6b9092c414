#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hcim/mat.hpp"
#include "hcim/quant.hpp"

namespace hcim::xbar {

// One crossbar tile's worth of bit-sliced weights. Cells are raw unsigned
// bit groups; slice significance (including the 2's-complement sign of the
// MSB slice) lives outside the array, folded into the scale factors.
struct BitSlicedWeights {
  int rows = 0;          // padded to the crossbar row count
  int logical_cols = 0;  // weights actually present (no column padding)
  int slices_per_weight = 1;
  int bit_slice = 1;
  int weight_bits = 1;
  std::vector<uint8_t> cells;  // rows x logical_cols x slices

  int physical_columns() const { return logical_cols * slices_per_weight; }
  uint8_t cell(int r, int lc, int k) const {
    return cells[(static_cast<size_t>(r) * logical_cols + lc) * slices_per_weight + k];
  }
  // Positional weight of slice k. With 1-bit slices the MSB slice carries
  // the 2's-complement sign; wider slices are unsigned-only.
  int64_t slice_significance(int k) const;
  // Inverse of slicing; exact for in-range weights.
  int64_t reassemble(int r, int lc) const;
};

struct TileGrid {
  int row_tiles = 0;
  int col_tiles = 0;
  int xbar_rows = 0;
  int logical_cols_per_tile = 0;
  int total_rows = 0;  // unpadded weight matrix rows
  std::vector<BitSlicedWeights> tiles;  // row-major (row tile, col tile)

  const BitSlicedWeights& tile(int tr, int tc) const { return tiles[static_cast<size_t>(tr) * col_tiles + tc]; }
  int row_offset(int tr) const { return tr * xbar_rows; }
  int rows_in_tile(int tr) const;
  int col_offset(int tc) const { return tc * logical_cols_per_tile; }
};

// Partition W into crossbar-sized tiles of bit-sliced cells. Rows are
// zero-padded to the crossbar height; all slices of a logical column stay in
// one tile. Signed weights require bit_slice = 1 so the MSB slice sign can be
// absorbed by a per-column scale-factor sign flip.
TileGrid slice_weights(const Mat& weights, const quant::QuantScheme& scheme, int xbar_rows,
                       int xbar_cols);

// LSB-first radix-2^bit_stream digits of every input element.
struct BitStreamPlan {
  int steps = 0;
  int n = 0;
  std::vector<uint32_t> digits;  // steps x n

  uint32_t digit(int j, int i) const { return digits[static_cast<size_t>(j) * n + i]; }
  std::span<const uint32_t> step(int j) const {
    return {digits.data() + static_cast<size_t>(j) * n, static_cast<size_t>(n)};
  }
};

BitStreamPlan stream_input(std::span<const int64_t> x, const quant::QuantScheme& scheme);

// Raw integer dot products per physical column for one bit-stream step.
std::vector<int64_t> column_sums(const BitSlicedWeights& tile, std::span<const uint32_t> digits);

struct ComparatorBank {
  quant::PsqMode mode = quant::PsqMode::ternary;
  int comparators_per_column = 2;  // 1 binary, 2 ternary
  int64_t alpha = 0;

  static ComparatorBank from_scheme(const quant::QuantScheme& scheme);
};

struct CompareResult {
  std::vector<quant::TernaryCode> codes;
  int64_t zero_count = 0;  // sparsity telemetry
};

CompareResult compare(std::span<const int64_t> ps, const ComparatorBank& bank);

// Mid-rise uniform quantizer over [-clip, clip] with 2^adc_bits levels;
// out-of-range inputs clamp to the end codes. Reconstruction levels are
// rounded half-up to integers. Baseline mode only.
std::vector<int64_t> ideal_adc(std::span<const int64_t> ps, int adc_bits, int64_t clip);

}  // namespace hcim::xbar
