#include "hcim/selftest.hpp"

#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hcim/dcim.hpp"
#include "hcim/quant.hpp"

namespace hcim::cli {

namespace {

using dcim::SubBit;

SubBit faulty_full_sub_bit(bool bl_xor, bool b_raw, bool borrow_in) {
  SubBit o;
  o.diff = bl_xor != borrow_in;
  // Drops the borrow-propagate term of the borrow expression.
  o.borrow_out = (b_raw && bl_xor) || (borrow_in && b_raw);
  return o;
}

struct Suite {
  std::ostream& log;
  int failures = 0;
  int suites = 0;

  void report(const std::string& name, bool ok, const std::string& detail) {
    ++suites;
    if (!ok) ++failures;
    log << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) log << " (" << detail << ")";
    log << '\n';
  }
};

void gate_truth_tables(Suite& s, bool inject_fault) {
  auto sub_fn = inject_fault ? faulty_full_sub_bit : dcim::full_sub_bit;
  int cases = 0;
  std::string failure;
  for (int a = 0; a <= 1 && failure.empty(); ++a) {
    for (int b = 0; b <= 1 && failure.empty(); ++b) {
      const dcim::BitlineRead r = dcim::bitwise_read(a, b);
      if (r.bl_or != (a || b) || r.bl_nand != !(a && b) || r.bl_xor != (a != b) ||
          r.bl_and != (a && b)) {
        failure = "bitwise_read(" + std::to_string(a) + "," + std::to_string(b) + ")";
        break;
      }
      for (int cin = 0; cin <= 1; ++cin) {
        ++cases;
        const dcim::AddBit add = dcim::full_add_bit(r.bl_xor, r.bl_and, cin);
        const int total = a + b + cin;
        if (add.sum != (total & 1) || add.carry_out != (total >> 1)) {
          failure = "full_add_bit A=" + std::to_string(a) + " B=" + std::to_string(b) +
                    " Cin=" + std::to_string(cin);
          break;
        }
        const SubBit sub = sub_fn(r.bl_xor, b, cin);
        const int diff = a - b - cin;
        const bool want_diff = diff & 1;
        const bool want_borrow = diff < 0;
        // Borrow must also match the canonical ~A*B + B*Bin + Bin*~A form.
        const bool canonical = (!a && b) || (b && cin) || (cin && !a);
        if (sub.diff != want_diff || sub.borrow_out != want_borrow ||
            sub.borrow_out != canonical) {
          failure = "full_sub_bit A=" + std::to_string(a) + " B=" + std::to_string(b) +
                    " Bin=" + std::to_string(cin);
          break;
        }
      }
    }
  }
  s.report("gate_truth_tables", failure.empty(),
           failure.empty() ? std::to_string(cases) + " cases" : failure);
}

void word_level_exhaustive(Suite& s) {
  // Two scale-factor entries per column: a unit entry to preload any PS
  // value, then the operand entry.
  int64_t checked = 0;
  std::string failure;
  for (int64_t ps0 = -128; ps0 <= 127 && failure.empty(); ++ps0) {
    for (int64_t mag = 0; mag <= 15 && failure.empty(); ++mag) {
      for (int op = 0; op < 2; ++op) {
        quant::ScaleFactorSet sf = quant::ScaleFactorSet::zeros(2, 1, 4);
        sf.magnitude[0] = 1;  // step 0: unit preload
        sf.magnitude[1] = static_cast<uint32_t>(mag);
        sf.sign[1] = op == 0 ? 1 : -1;  // subtract via sign disagreement
        dcim::DcimArray array = dcim::load_scale_factors(sf, 8);
        const quant::TernaryCode preload =
            ps0 >= 0 ? quant::TernaryCode::plus : quant::TernaryCode::minus;
        for (int64_t i = 0; i < (ps0 < 0 ? -ps0 : ps0); ++i) array.apply_step({&preload, 1}, 0);
        const quant::TernaryCode go = quant::TernaryCode::plus;
        array.apply_step({&go, 1}, 1);
        int64_t want = op == 0 ? ps0 + mag : ps0 - mag;
        want = quant::saturate_to_bits(want, 8);
        const int64_t got = array.read_partial_sums()[0];
        ++checked;
        if (got != want) {
          failure = "ps=" + std::to_string(ps0) + " sf=" + std::to_string(mag) +
                     (op == 0 ? " add" : " subtract") + ": got " + std::to_string(got) +
                     " want " + std::to_string(want);
          break;
        }
      }
    }
  }
  s.report("word_level_exhaustive", failure.empty(),
           failure.empty() ? std::to_string(checked) + " cases" : failure);
}

void word_level_randomized(Suite& s, uint64_t seed, int64_t cases) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> mag_dist(0, 255);
  std::uniform_int_distribution<int64_t> count_dist(1, 64);
  std::uniform_int_distribution<int> sign_dist(0, 1);
  std::string failure;
  int64_t checked = 0;
  // Random op sequences through one 16-bit column, checked against a
  // saturating integer accumulator.
  while (checked < cases && failure.empty()) {
    const int64_t ops = count_dist(rng);
    quant::ScaleFactorSet sf = quant::ScaleFactorSet::zeros(1, 1, 8);
    sf.magnitude[0] = static_cast<uint32_t>(mag_dist(rng));
    dcim::DcimArray array = dcim::load_scale_factors(sf, 16);
    int64_t want = 0;
    for (int64_t i = 0; i < ops; ++i) {
      const int p = sign_dist(rng) ? 1 : -1;
      const quant::TernaryCode code = quant::encode_ternary(p);
      array.apply_step({&code, 1}, 0);
      want = quant::saturate_to_bits(want + p * static_cast<int64_t>(sf.magnitude[0]), 16);
      ++checked;
    }
    const int64_t got = array.read_partial_sums()[0];
    if (got != want)
      failure = "random sequence diverged: got " + std::to_string(got) + " want " +
                std::to_string(want);
  }
  s.report("word_level_randomized", failure.empty(),
           failure.empty() ? std::to_string(checked) + " ops" : failure);
}

void pipeline_transparency(Suite& s, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> mag_dist(0, 15);
  std::uniform_int_distribution<int> p_dist(-1, 1);
  std::string failure;
  for (int trial = 0; trial < 32 && failure.empty(); ++trial) {
    const int columns = 8;
    const int steps = 4;
    quant::ScaleFactorSet sf = quant::ScaleFactorSet::zeros(steps, columns, 4);
    for (auto& m : sf.magnitude) m = static_cast<uint32_t>(mag_dist(rng));
    std::vector<std::vector<quant::TernaryCode>> codes(steps);
    for (int j = 0; j < steps; ++j)
      for (int c = 0; c < columns; ++c) codes[j].push_back(quant::encode_ternary(p_dist(rng)));

    dcim::DcimArray pipelined = dcim::load_scale_factors(sf, 8);
    for (int j = 0; j < steps; ++j) pipelined.apply_step(codes[j], j);
    pipelined.flush();

    dcim::DcimArray stepped = dcim::load_scale_factors(sf, 8);
    for (int j = 0; j < steps; ++j) {
      stepped.apply_step(codes[j], j);
      stepped.flush();
    }

    if (pipelined.read_partial_sums() != stepped.read_partial_sums())
      failure = "results differ between issue styles";
    else if (pipelined.counters().cycles != stepped.counters().cycles)
      failure = "steady-state cycle counts differ";
  }
  s.report("pipeline_transparency", failure.empty(), failure.empty() ? "32 trials" : failure);
}

}  // namespace

SelftestResult run_selftest(const SelftestOptions& options, std::ostream& log) {
  Suite s{log};
  gate_truth_tables(s, options.inject_full_sub_fault);
  word_level_exhaustive(s);
  word_level_randomized(s, options.seed, 100000);
  pipeline_transparency(s, options.seed);
  log << (s.failures == 0 ? "selftest: all suites passed\n"
                          : "selftest: " + std::to_string(s.failures) + " suite(s) failed\n");
  return {s.suites, s.failures};
}

}  // namespace hcim::cli
