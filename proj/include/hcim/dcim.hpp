#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hcim/quant.hpp"

namespace hcim::dcim {

// Read stage output: activating two read word lines puts the OR and NAND of
// the selected cells on the bit-line pair; XOR and AND are derived in the
// column peripheral.
struct BitlineRead {
  bool bl_or = false;
  bool bl_nand = false;
  bool bl_xor = false;
  bool bl_and = false;
};

BitlineRead bitwise_read(bool a, bool b);

struct AddBit {
  bool sum = false;
  bool carry_out = false;
};

// Full adder over the derived bit-line signals.
AddBit full_add_bit(bool bl_xor, bool bl_and, bool carry_in);

struct SubBit {
  bool diff = false;
  bool borrow_out = false;
};

// Full subtractor. b_raw is the subtrahend bit read in parallel through the
// otherwise-idle write path during the Read cycle; the minuend bit is only
// available as A^B on the bit lines, which is enough:
//   diff = (A^B) ^ Bin
//   Bout = (B & (A^B)) | (Bin & ~(A^B)) | (Bin & B)
// identical to ~A*B + B*Bin + Bin*~A for all inputs.
SubBit full_sub_bit(bool bl_xor, bool b_raw, bool borrow_in);

struct EventCounters {
  uint64_t cycles = 0;
  uint64_t precharge_reads = 0;  // active column Read events
  uint64_t computes = 0;         // active column Compute events
  uint64_t stores = 0;           // active column Store events
  uint64_t raw_b_reads = 0;      // parallel subtrahend reads (subtractions)
  uint64_t gated_columns = 0;    // column slots skipped because p = 0
  uint64_t overflow_saturations = 0;
  uint64_t load_writes = 0;      // one-time scale-factor load, not steady state

  std::map<std::string, uint64_t> as_map() const;
};

enum class Stage { read, compute, store };

enum class ColumnOp : uint8_t { skip = 0, add = 1, subtract = 2 };

// One row operation R_ji: combine scale-factor entry j with the partial-sum
// word, with a per-column op kind decoded from p and the stored sign.
struct RowOp {
  int sf_row_group = 0;
  Stage stage = Stage::read;
  std::vector<ColumnOp> op_kind;
};

struct TimingParams {
  double cycle_ns = 2.0;  // 500 MHz
  int pipeline_depth = 3;
  int phases_per_op = 1;  // 2 models odd/even column phasing
  bool count_fill = false;
};

struct TimingResult {
  uint64_t cycles = 0;
  double per_column_latency_ns = 0.0;
};

// Steady-state cycle count for `ops` row operations; the latency of one
// column is the array latency averaged over the columns it serves.
TimingResult timing_model(uint64_t ops, int columns, const TimingParams& params);

// Digital CiM array: scale-factor memory on top of a partial-sum memory,
// sharing columns, with a 1-bit adder/subtractor chain per column. One row
// operation resolves a whole word add/subtract through the three-stage
// Read-Compute-Store pipeline; issuing steps back to back is modeled as one
// op per phases_per_op cycles with state applied in issue order.
class DcimArray {
 public:
  DcimArray() = default;

  int steps() const { return steps_; }
  int sf_bits() const { return sf_bits_; }
  int ps_bits() const { return ps_bits_; }
  int columns() const { return columns_; }
  int rows() const { return steps_ * sf_bits_ + ps_bits_; }
  const EventCounters& counters() const { return counters_; }
  const TimingParams& timing() const { return timing_; }

  // Apply one bit-stream step: for every column, add/subtract the stored
  // scale-factor magnitude for step_j into the partial sum, or skip when the
  // column's code is 0 (clock-gated: no read, compute or store events).
  void apply_step(std::span<const quant::TernaryCode> p, int step_j);

  // Drain the pipeline; charges the fill cycles when count_fill is set.
  void flush();

  std::vector<int64_t> read_partial_sums() const;
  void reset_partial_sums();

  int64_t sf_magnitude(int j, int c) const;
  int sf_sign(int j, int c) const { return sf_sign_[static_cast<size_t>(j) * columns_ + c]; }

  friend DcimArray load_scale_factors(const quant::ScaleFactorSet& sf, int ps_bits,
                                      const TimingParams& timing);

 private:
  bool sf_bit(int j, int b, int c) const {
    return sf_mem_[(static_cast<size_t>(j) * sf_bits_ + b) * columns_ + c] != 0;
  }
  bool ps_bit(int b, int c) const { return ps_mem_[static_cast<size_t>(b) * columns_ + c] != 0; }
  void set_ps_bit(int b, int c, bool v) {
    ps_mem_[static_cast<size_t>(b) * columns_ + c] = v ? 1 : 0;
  }
  void store_word(int c, uint64_t bits);

  int steps_ = 0;
  int sf_bits_ = 0;
  int ps_bits_ = 0;
  int columns_ = 0;
  std::vector<uint8_t> sf_mem_;   // (steps * sf_bits) rows x columns
  std::vector<uint8_t> ps_mem_;   // ps_bits rows x columns
  std::vector<int8_t> sf_sign_;   // per-entry sign metadata (not a memory row)
  TimingParams timing_;
  EventCounters counters_;
  uint64_t inflight_ops_ = 0;  // ops issued since the last flush
};

// Build an array from a calibrated scale-factor set: magnitudes are written
// bit-serially into the scale-factor rows, partial sums zeroed, counters
// reset. The write cost lands in load_writes only.
DcimArray load_scale_factors(const quant::ScaleFactorSet& sf, int ps_bits,
                             const TimingParams& timing = {});

}  // namespace hcim::dcim
