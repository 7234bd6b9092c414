#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hcim/mat.hpp"

namespace hcim::quant {

enum class PsqMode { binary, ternary };

// Precision profile of one layer: input/weight widths, how they are streamed
// and sliced onto the crossbar, and the partial-sum quantizer settings.
struct QuantScheme {
  int input_bits = 4;
  int weight_bits = 4;
  int bit_stream = 1;  // input bits applied per streaming step (DAC precision)
  int bit_slice = 1;   // weight bits stored per memory cell
  int ps_bits = 8;     // partial-sum accumulator width
  int sf_bits = 4;     // scale-factor magnitude width
  PsqMode mode = PsqMode::ternary;
  int64_t alpha = 0;   // ternary dead-zone half-width, raw column-sum units

  int steps() const { return input_bits / bit_stream; }
  int slices_per_weight() const { return weight_bits / bit_slice; }
  void validate() const;

  // 4-bit inputs/weights, 8-bit partial sums, 4-bit scale factors.
  static QuantScheme cifar();
  // 3-bit inputs/weights, 16-bit partial sums, 8-bit scale factors.
  static QuantScheme imagenet();
};

// 2-bit encoding of the quantized partial sum p. Pattern 10 is unused and
// rejected wherever raw bits enter the model.
enum class TernaryCode : uint8_t { zero = 0b00, plus = 0b01, minus = 0b11 };

TernaryCode encode_ternary(int p);            // p in {-1, 0, +1}
int decode_ternary(TernaryCode code);
TernaryCode ternary_from_bits(uint8_t bits);  // rejects pattern 10

// value = sign * magnitude * 2^exponent
struct FixedPoint {
  int sign = 1;  // +1 or -1
  uint32_t magnitude = 0;
  int exponent = 0;

  int64_t signed_magnitude() const { return sign * static_cast<int64_t>(magnitude); }
  double value() const;
};

struct SfQuantResult {
  FixedPoint fp;
  bool saturated = false;
};

// Binary: sign of ps (ties at 0 go to +1). Ternary: dead zone (-alpha, alpha)
// maps to 0, boundaries inclusive on the outside.
TernaryCode quantize_partial_sum(int64_t ps, const QuantScheme& scheme);

SfQuantResult quantize_scale_factor(double s, int sf_bits, int exponent);

// Quantile of |column_sums| so that roughly target_zero_fraction of the
// samples fall strictly inside the dead zone. target 0 yields alpha = 0.
int64_t calibrate_alpha(std::span<const int64_t> column_sums, double target_zero_fraction);

// One calibration observation for a scale-factor entry: the raw partial sum
// (with positional weights already folded in by the caller) and its code.
struct SfSample {
  int64_t ps = 0;
  int p = 0;  // -1, 0, +1
};

// Scale factors for one crossbar tile: (bit-stream step, physical column),
// stored as sign + sf_bits magnitude with one shared per-layer exponent.
// Positional input/slice weights are folded into the stored values.
struct ScaleFactorSet {
  int steps = 0;
  int columns = 0;
  int sf_bits = 0;
  int exponent = 0;
  std::vector<int8_t> sign;         // steps * columns, +1 / -1
  std::vector<uint32_t> magnitude;  // steps * columns, < 2^sf_bits
  int64_t zero_entries = 0;         // entries with no usable calibration pairs
  int64_t saturations = 0;

  size_t index(int j, int c) const { return static_cast<size_t>(j) * columns + c; }
  int64_t signed_magnitude(int j, int c) const {
    return sign[index(j, c)] * static_cast<int64_t>(magnitude[index(j, c)]);
  }
  static ScaleFactorSet zeros(int steps, int columns, int sf_bits);
};

// Closed-form least squares s = sum(p*ps) / sum(p^2) per entry, then
// fixed-point quantization under the smallest shared exponent that keeps the
// largest magnitude representable. samples is indexed (j * columns + c).
ScaleFactorSet calibrate_scale_factors(int steps, int columns, int sf_bits,
                                       const std::vector<std::vector<SfSample>>& samples);

struct GoldenResult {
  Mat ps;  // (input rows) x (physical columns), saturated partial sums
  int64_t overflow_saturations = 0;
  int64_t zero_codes = 0;
  int64_t total_codes = 0;
};

// Pure software reference for one tile: bit-streams the inputs, bit-slices
// the weights, quantizes every column sum and accumulates p * s per physical
// column with ps_bits saturation. The in-memory path must match this
// bit-for-bit.
GoldenResult golden_psq_layer(const Mat& inputs, const Mat& weights,
                              const QuantScheme& scheme, const ScaleFactorSet& sf);

// round(acc * scale) clamped to [0, 2^out_bits - 1]; ReLU is the clamp at 0.
uint32_t requantize_activation(int64_t acc, int out_bits, const FixedPoint& scale);

// Clamp v to the signed `bits`-wide range, bumping *overflow_counter when it
// actually clamps.
int64_t saturate_to_bits(int64_t v, int bits, int64_t* overflow_counter = nullptr);

// Smallest exponent e such that round(maxabs / 2^e) fits in `bits` unsigned.
int choose_exponent(double maxabs, int bits);

}  // namespace hcim::quant
