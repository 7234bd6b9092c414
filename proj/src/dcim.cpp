#include "hcim/dcim.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hcim::dcim {

BitlineRead bitwise_read(bool a, bool b) {
  BitlineRead r;
  r.bl_or = a || b;
  r.bl_nand = !(a && b);
  r.bl_xor = r.bl_or && r.bl_nand;
  r.bl_and = !r.bl_nand;
  return r;
}

AddBit full_add_bit(bool bl_xor, bool bl_and, bool carry_in) {
  AddBit o;
  o.sum = bl_xor != carry_in;
  o.carry_out = bl_and || (bl_xor && carry_in);
  return o;
}

SubBit full_sub_bit(bool bl_xor, bool b_raw, bool borrow_in) {
  SubBit o;
  o.diff = bl_xor != borrow_in;
  o.borrow_out = (b_raw && bl_xor) || (borrow_in && !bl_xor) || (borrow_in && b_raw);
  return o;
}

std::map<std::string, uint64_t> EventCounters::as_map() const {
  return {
      {"cycles", cycles},
      {"precharge_reads", precharge_reads},
      {"computes", computes},
      {"stores", stores},
      {"raw_b_reads", raw_b_reads},
      {"gated_columns", gated_columns},
      {"overflow_saturations", overflow_saturations},
      {"load_writes", load_writes},
  };
}

TimingResult timing_model(uint64_t ops, int columns, const TimingParams& params) {
  if (columns < 1) throw std::invalid_argument("timing_model: columns must be positive");
  TimingResult r;
  r.cycles = ops * static_cast<uint64_t>(params.phases_per_op);
  if (params.count_fill && ops > 0) r.cycles += static_cast<uint64_t>(params.pipeline_depth - 1);
  r.per_column_latency_ns =
      static_cast<double>(r.cycles) * params.cycle_ns / static_cast<double>(columns);
  return r;
}

DcimArray load_scale_factors(const quant::ScaleFactorSet& sf, int ps_bits,
                             const TimingParams& timing) {
  if (sf.steps < 1 || sf.columns < 1 || sf.sf_bits < 1)
    throw std::invalid_argument("load_scale_factors: bad scale factor shape");
  const size_t n = static_cast<size_t>(sf.steps) * sf.columns;
  if (sf.sign.size() != n || sf.magnitude.size() != n)
    throw std::invalid_argument("load_scale_factors: scale factor shape mismatch");
  if (ps_bits <= sf.sf_bits || ps_bits > 62)
    throw std::invalid_argument("load_scale_factors: ps_bits must exceed sf_bits");

  DcimArray a;
  a.steps_ = sf.steps;
  a.sf_bits_ = sf.sf_bits;
  a.ps_bits_ = ps_bits;
  a.columns_ = sf.columns;
  a.timing_ = timing;
  a.sf_mem_.assign(static_cast<size_t>(sf.steps) * sf.sf_bits * sf.columns, 0);
  a.ps_mem_.assign(static_cast<size_t>(ps_bits) * sf.columns, 0);
  a.sf_sign_.assign(n, 1);
  const uint32_t mag_max = (uint32_t{1} << sf.sf_bits) - 1;
  for (int j = 0; j < sf.steps; ++j) {
    for (int c = 0; c < sf.columns; ++c) {
      const uint32_t mag = sf.magnitude[sf.index(j, c)];
      if (mag > mag_max)
        throw std::invalid_argument("load_scale_factors: magnitude exceeds sf_bits");
      for (int b = 0; b < sf.sf_bits; ++b) {
        a.sf_mem_[(static_cast<size_t>(j) * sf.sf_bits + b) * sf.columns + c] =
            static_cast<uint8_t>((mag >> b) & 1u);
        ++a.counters_.load_writes;
      }
      a.sf_sign_[static_cast<size_t>(j) * sf.columns + c] = sf.sign[sf.index(j, c)];
    }
  }
  return a;
}

int64_t DcimArray::sf_magnitude(int j, int c) const {
  int64_t mag = 0;
  for (int b = 0; b < sf_bits_; ++b)
    if (sf_bit(j, b, c)) mag |= int64_t{1} << b;
  return mag;
}

void DcimArray::store_word(int c, uint64_t bits) {
  for (int b = 0; b < ps_bits_; ++b) set_ps_bit(b, c, (bits >> b) & 1u);
}

void DcimArray::apply_step(std::span<const quant::TernaryCode> p, int step_j) {
  if (static_cast<int>(p.size()) != columns_)
    throw std::invalid_argument("apply_step: p length must equal columns");
  if (step_j < 0 || step_j >= steps_)
    throw std::invalid_argument("apply_step: step index out of range");

  RowOp op;
  op.sf_row_group = step_j;
  op.op_kind.resize(columns_);
  for (int c = 0; c < columns_; ++c) {
    // Rejects forged bit patterns (10) before they reach the array.
    const int pv = quant::decode_ternary(quant::ternary_from_bits(static_cast<uint8_t>(p[c])));
    if (pv == 0) {
      op.op_kind[c] = ColumnOp::skip;
    } else {
      // Effective operation folds the stored sign: subtract when the signs
      // of p and s disagree.
      const bool subtract = pv * sf_sign(step_j, c) < 0;
      op.op_kind[c] = subtract ? ColumnOp::subtract : ColumnOp::add;
    }
  }

  const uint64_t sign_bit = uint64_t{1} << (ps_bits_ - 1);
  const uint64_t word_mask = (uint64_t{1} << ps_bits_) - 1;

  for (int c = 0; c < columns_; ++c) {
    if (op.op_kind[c] == ColumnOp::skip) {
      // Bit-line switches off, peripheral clock-gated, nothing stored.
      ++counters_.gated_columns;
      continue;
    }
    const bool subtract = op.op_kind[c] == ColumnOp::subtract;

    // Read: latch OR/NAND for each bit pair; subtractions also latch the
    // subtrahend raw bits via the idle write path.
    op.stage = Stage::read;
    ++counters_.precharge_reads;
    if (subtract) ++counters_.raw_b_reads;
    std::vector<BitlineRead> latched(ps_bits_);
    std::vector<bool> raw_b(ps_bits_, false);
    for (int b = 0; b < ps_bits_; ++b) {
      const bool a_bit = ps_bit(b, c);
      const bool b_bit = b < sf_bits_ ? sf_bit(step_j, b, c) : false;  // zero-extended magnitude
      latched[b] = bitwise_read(a_bit, b_bit);
      raw_b[b] = b_bit;
    }

    // Compute: ripple the adder/subtractor chain; CB_out is the final
    // carry-or-borrow selected by p through the peripheral MUX.
    op.stage = Stage::compute;
    ++counters_.computes;
    uint64_t result = 0;
    bool cb = false;
    for (int b = 0; b < ps_bits_; ++b) {
      if (subtract) {
        const SubBit s = full_sub_bit(latched[b].bl_xor, raw_b[b], cb);
        if (s.diff) result |= uint64_t{1} << b;
        cb = s.borrow_out;
      } else {
        const AddBit s = full_add_bit(latched[b].bl_xor, latched[b].bl_and, cb);
        if (s.sum) result |= uint64_t{1} << b;
        cb = s.carry_out;
      }
    }
    (void)cb;

    // The operand magnitude is non-negative, so signed overflow shows up as
    // a sign flip in the direction of the operation. Saturate instead of
    // wrapping and count it.
    op.stage = Stage::store;
    ++counters_.stores;
    const bool old_neg = ps_bit(ps_bits_ - 1, c);
    const bool new_neg = (result & sign_bit) != 0;
    if (!subtract && !old_neg && new_neg) {
      ++counters_.overflow_saturations;
      store_word(c, word_mask >> 1);  // +max
    } else if (subtract && old_neg && !new_neg) {
      ++counters_.overflow_saturations;
      store_word(c, sign_bit);  // -max-1
    } else {
      store_word(c, result);
    }
  }

  counters_.cycles += static_cast<uint64_t>(timing_.phases_per_op);
  ++inflight_ops_;
}

void DcimArray::flush() {
  if (timing_.count_fill && inflight_ops_ > 0)
    counters_.cycles += static_cast<uint64_t>(timing_.pipeline_depth - 1);
  inflight_ops_ = 0;
}

std::vector<int64_t> DcimArray::read_partial_sums() const {
  std::vector<int64_t> out(columns_, 0);
  for (int c = 0; c < columns_; ++c) {
    int64_t v = 0;
    for (int b = 0; b < ps_bits_ - 1; ++b)
      if (ps_bit(b, c)) v |= int64_t{1} << b;
    if (ps_bit(ps_bits_ - 1, c)) v -= int64_t{1} << (ps_bits_ - 1);
    out[c] = v;
  }
  return out;
}

void DcimArray::reset_partial_sums() {
  std::fill(ps_mem_.begin(), ps_mem_.end(), 0);
  counters_.stores += static_cast<uint64_t>(columns_);
}

}  // namespace hcim::dcim
