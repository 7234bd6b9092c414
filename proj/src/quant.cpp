#include "hcim/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hcim/errors.hpp"

namespace hcim::quant {

namespace {

void check(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void QuantScheme::validate() const {
  check(input_bits >= 1 && input_bits <= 30, "input_bits out of range");
  check(weight_bits >= 1 && weight_bits <= 30, "weight_bits out of range");
  check(bit_stream >= 1 && input_bits % bit_stream == 0,
        "input_bits must be a multiple of bit_stream");
  check(bit_slice >= 1 && weight_bits % bit_slice == 0,
        "weight_bits must be a multiple of bit_slice");
  check(ps_bits >= 2 && ps_bits <= 62, "ps_bits out of range");
  check(sf_bits >= 1 && sf_bits < ps_bits, "sf_bits must be >= 1 and < ps_bits");
  check(alpha >= 0, "alpha must be non-negative");
}

QuantScheme QuantScheme::cifar() {
  QuantScheme s;
  s.input_bits = 4;
  s.weight_bits = 4;
  s.bit_stream = 1;
  s.bit_slice = 1;
  s.ps_bits = 8;
  s.sf_bits = 4;
  s.mode = PsqMode::ternary;
  return s;
}

QuantScheme QuantScheme::imagenet() {
  QuantScheme s;
  s.input_bits = 3;
  s.weight_bits = 3;
  s.bit_stream = 1;
  s.bit_slice = 1;
  s.ps_bits = 16;
  s.sf_bits = 8;
  s.mode = PsqMode::ternary;
  return s;
}

TernaryCode encode_ternary(int p) {
  switch (p) {
    case 0: return TernaryCode::zero;
    case 1: return TernaryCode::plus;
    case -1: return TernaryCode::minus;
    default: throw std::invalid_argument("ternary value must be -1, 0 or +1");
  }
}

int decode_ternary(TernaryCode code) {
  switch (code) {
    case TernaryCode::zero: return 0;
    case TernaryCode::plus: return 1;
    case TernaryCode::minus: return -1;
  }
  throw std::invalid_argument("invalid ternary code pattern 10");
}

TernaryCode ternary_from_bits(uint8_t bits) {
  if (bits == 0b00) return TernaryCode::zero;
  if (bits == 0b01) return TernaryCode::plus;
  if (bits == 0b11) return TernaryCode::minus;
  throw std::invalid_argument("invalid ternary code pattern " + std::to_string(bits));
}

double FixedPoint::value() const {
  return std::ldexp(static_cast<double>(sign) * magnitude, exponent);
}

TernaryCode quantize_partial_sum(int64_t ps, const QuantScheme& scheme) {
  if (scheme.mode == PsqMode::binary) {
    return ps >= 0 ? TernaryCode::plus : TernaryCode::minus;
  }
  if (ps >= scheme.alpha) return TernaryCode::plus;
  if (ps <= -scheme.alpha) return TernaryCode::minus;
  return TernaryCode::zero;
}

SfQuantResult quantize_scale_factor(double s, int sf_bits, int exponent) {
  check(sf_bits >= 1 && sf_bits <= 31, "sf_bits out of range");
  const int64_t max_mag = (int64_t{1} << sf_bits) - 1;
  const double mag_real = std::ldexp(std::fabs(s), -exponent);
  SfQuantResult r;
  int64_t mag;
  if (mag_real < static_cast<double>(max_mag) + 0.5) {
    mag = std::llround(mag_real);
  } else {
    mag = max_mag;  // also catches values llround could not represent
    r.saturated = true;
  }
  r.fp.sign = s < 0 ? -1 : 1;
  r.fp.magnitude = static_cast<uint32_t>(mag);
  r.fp.exponent = exponent;
  return r;
}

int64_t calibrate_alpha(std::span<const int64_t> column_sums, double target_zero_fraction) {
  if (column_sums.empty()) throw std::runtime_error("no calibration data");
  check(target_zero_fraction >= 0.0 && target_zero_fraction <= 1.0,
        "target_zero_fraction must be in [0,1]");
  const size_t n = column_sums.size();
  // Nearest-rank quantile of |sums|; rank < 0 means no dead zone requested.
  const int64_t k =
      static_cast<int64_t>(std::ceil(target_zero_fraction * static_cast<double>(n) - 1e-9)) - 1;
  if (k < 0) return 0;
  std::vector<int64_t> mags(column_sums.size());
  std::transform(column_sums.begin(), column_sums.end(), mags.begin(),
                 [](int64_t v) { return v < 0 ? -v : v; });
  std::sort(mags.begin(), mags.end());
  return mags[std::min<size_t>(static_cast<size_t>(k), n - 1)];
}

ScaleFactorSet ScaleFactorSet::zeros(int steps, int columns, int sf_bits) {
  ScaleFactorSet s;
  s.steps = steps;
  s.columns = columns;
  s.sf_bits = sf_bits;
  s.sign.assign(static_cast<size_t>(steps) * columns, 1);
  s.magnitude.assign(static_cast<size_t>(steps) * columns, 0);
  return s;
}

int choose_exponent(double maxabs, int bits) {
  const int64_t max_mag = (int64_t{1} << bits) - 1;
  if (maxabs <= 0.0) return 0;
  int e = static_cast<int>(std::floor(std::log2(maxabs))) - bits - 1;
  while (std::llround(std::ldexp(maxabs, -e)) > max_mag) ++e;
  return e;
}

ScaleFactorSet calibrate_scale_factors(int steps, int columns, int sf_bits,
                                       const std::vector<std::vector<SfSample>>& samples) {
  check(steps >= 1 && columns >= 1, "scale factor shape must be positive");
  check(samples.size() == static_cast<size_t>(steps) * columns,
        "scale factor sample table shape mismatch");

  std::vector<double> raw(samples.size(), 0.0);
  int64_t zero_entries = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    int64_t sum_pps = 0;
    int64_t sum_pp = 0;
    for (const SfSample& s : samples[i]) {
      check(s.p >= -1 && s.p <= 1, "sample p must be -1, 0 or +1");
      sum_pps += s.p * s.ps;
      sum_pp += s.p * s.p;
    }
    if (sum_pp == 0) {
      ++zero_entries;
      raw[i] = 0.0;
    } else {
      raw[i] = static_cast<double>(sum_pps) / static_cast<double>(sum_pp);
    }
  }

  double maxabs = 0.0;
  for (double v : raw) maxabs = std::max(maxabs, std::fabs(v));

  ScaleFactorSet out = ScaleFactorSet::zeros(steps, columns, sf_bits);
  out.exponent = choose_exponent(maxabs, sf_bits);
  out.zero_entries = zero_entries;
  for (size_t i = 0; i < raw.size(); ++i) {
    const SfQuantResult q = quantize_scale_factor(raw[i], sf_bits, out.exponent);
    out.sign[i] = static_cast<int8_t>(q.fp.sign);
    out.magnitude[i] = q.fp.magnitude;
    if (q.saturated) ++out.saturations;
  }
  return out;
}

int64_t saturate_to_bits(int64_t v, int bits, int64_t* overflow_counter) {
  const int64_t max = (int64_t{1} << (bits - 1)) - 1;
  const int64_t min = -max - 1;
  if (v > max) {
    if (overflow_counter) ++*overflow_counter;
    return max;
  }
  if (v < min) {
    if (overflow_counter) ++*overflow_counter;
    return min;
  }
  return v;
}

GoldenResult golden_psq_layer(const Mat& inputs, const Mat& weights,
                              const QuantScheme& scheme, const ScaleFactorSet& sf) {
  scheme.validate();
  if (inputs.cols != weights.rows) throw std::invalid_argument("golden: dimension mismatch");
  const int slices = scheme.slices_per_weight();
  const int phys_cols = weights.cols * slices;
  const int steps = scheme.steps();
  if (sf.steps != steps || sf.columns != phys_cols)
    throw std::invalid_argument("golden: scale factor shape mismatch");

  const int64_t in_max = (int64_t{1} << scheme.input_bits) - 1;
  const int64_t w_max = (int64_t{1} << (scheme.weight_bits - 1)) - 1;
  for (int64_t x : inputs.data)
    if (x < 0 || x > in_max) throw std::invalid_argument("golden: input out of range");
  for (int64_t w : weights.data)
    if (w < -w_max || w > w_max) throw std::invalid_argument("golden: weight out of range");

  const uint64_t word_mask = (uint64_t{1} << scheme.weight_bits) - 1;
  const uint64_t cell_mask = (uint64_t{1} << scheme.bit_slice) - 1;
  const uint64_t digit_mask = (uint64_t{1} << scheme.bit_stream) - 1;

  GoldenResult g;
  g.ps = Mat(inputs.rows, phys_cols);
  for (int i = 0; i < inputs.rows; ++i) {
    for (int lc = 0; lc < weights.cols; ++lc) {
      for (int k = 0; k < slices; ++k) {
        const int c = lc * slices + k;
        int64_t ps = 0;
        for (int j = 0; j < steps; ++j) {
          int64_t column_sum = 0;
          for (int r = 0; r < weights.rows; ++r) {
            const uint64_t digit =
                (static_cast<uint64_t>(inputs.at(i, r)) >> (j * scheme.bit_stream)) & digit_mask;
            const uint64_t cell =
                ((static_cast<uint64_t>(weights.at(r, lc)) & word_mask) >> (k * scheme.bit_slice)) &
                cell_mask;
            column_sum += static_cast<int64_t>(digit * cell);
          }
          const TernaryCode code = quantize_partial_sum(column_sum, scheme);
          const int p = decode_ternary(code);
          if (p == 0) ++g.zero_codes;
          ++g.total_codes;
          ps = saturate_to_bits(ps + p * sf.signed_magnitude(j, c), scheme.ps_bits,
                                &g.overflow_saturations);
        }
        g.ps.at(i, c) = ps;
      }
    }
  }
  return g;
}

uint32_t requantize_activation(int64_t acc, int out_bits, const FixedPoint& scale) {
  check(out_bits >= 1 && out_bits <= 31, "out_bits out of range");
  __int128 v = static_cast<__int128>(acc) * scale.signed_magnitude();
  __int128 scaled;
  if (scale.exponent >= 0) {
    scaled = v << scale.exponent;
  } else {
    // round half away from zero
    const __int128 half = static_cast<__int128>(1) << (-scale.exponent - 1);
    scaled = v >= 0 ? (v + half) >> -scale.exponent : -((-v + half) >> -scale.exponent);
  }
  const __int128 max = (static_cast<__int128>(1) << out_bits) - 1;
  if (scaled < 0) return 0;
  if (scaled > max) return static_cast<uint32_t>(max);
  return static_cast<uint32_t>(scaled);
}

}  // namespace hcim::quant
