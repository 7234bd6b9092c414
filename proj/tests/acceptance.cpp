// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hcim/config.hpp"
#include "hcim/costmodel.hpp"
#include "hcim/dcim.hpp"
#include "hcim/mapper.hpp"
#include "hcim/quant.hpp"

using namespace hcim;
namespace fs = std::filesystem;

namespace {

const std::string kCli = HCIM_CLI_PATH;
const fs::path kSource = HCIM_SOURCE_DIR;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Exhaustive adder/subtractor truth tables against integer semantics and
//    the canonical borrow form; under one second.
Check criterion1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      for (int cin = 0; cin <= 1; ++cin) {
        const dcim::BitlineRead r = dcim::bitwise_read(a, b);
        const dcim::AddBit add = dcim::full_add_bit(r.bl_xor, r.bl_and, cin);
        const int total = a + b + cin;
        c.require(add.sum == (total & 1) && add.carry_out == ((total >> 1) & 1),
                  "full_add_bit diverges from integer addition");
        const dcim::SubBit sub = dcim::full_sub_bit(r.bl_xor, b, cin);
        const int diff = a - b - cin;
        c.require(sub.diff == (diff & 1) && sub.borrow_out == (diff < 0),
                  "full_sub_bit diverges from integer borrow semantics");
        const bool canonical = (!a && b) || (b && cin) || (cin && !a);
        c.require(sub.borrow_out == canonical,
                  "borrow output differs from the canonical two-input+borrow form");
      }
    }
  }
  c.require(seconds_since(t0) < 1.0, "runtime exceeded 1 s");
  return c;
}

// 2. Word-level Read-Compute-Store arithmetic: all 8192 8-bit cases plus 1e5
//    randomized 16-bit/8-bit cases equal saturating integer arithmetic.
Check criterion2() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  for (int64_t ps0 = -128; ps0 <= 127 && c.ok; ++ps0) {
    for (int64_t mag = 0; mag <= 15 && c.ok; ++mag) {
      for (int op = 0; op < 2; ++op) {
        quant::ScaleFactorSet sf = quant::ScaleFactorSet::zeros(2, 1, 4);
        sf.magnitude[0] = 1;
        sf.magnitude[1] = static_cast<uint32_t>(mag);
        sf.sign[1] = op == 0 ? 1 : -1;
        dcim::DcimArray a = dcim::load_scale_factors(sf, 8);
        const quant::TernaryCode preload =
            ps0 >= 0 ? quant::TernaryCode::plus : quant::TernaryCode::minus;
        for (int64_t i = 0; i < (ps0 < 0 ? -ps0 : ps0); ++i) a.apply_step({&preload, 1}, 0);
        const quant::TernaryCode go = quant::TernaryCode::plus;
        a.apply_step({&go, 1}, 1);
        const int64_t want = quant::saturate_to_bits(op == 0 ? ps0 + mag : ps0 - mag, 8);
        if (a.read_partial_sums()[0] != want) {
          c.fail("8-bit case ps=" + std::to_string(ps0) + " sf=" + std::to_string(mag) +
                 (op ? " subtract" : " add"));
          break;
        }
      }
    }
  }

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<uint32_t> mag_dist(0, 255);
  std::uniform_int_distribution<int> p_dist(0, 1);
  int64_t cases = 0;
  while (cases < 100000 && c.ok) {
    quant::ScaleFactorSet sf = quant::ScaleFactorSet::zeros(1, 1, 8);
    sf.magnitude[0] = mag_dist(rng);
    dcim::DcimArray a = dcim::load_scale_factors(sf, 16);
    int64_t want = 0;
    for (int i = 0; i < 50 && cases < 100000; ++i, ++cases) {
      const int p = p_dist(rng) ? 1 : -1;
      const quant::TernaryCode code = quant::encode_ternary(p);
      a.apply_step({&code, 1}, 0);
      want = quant::saturate_to_bits(want + p * static_cast<int64_t>(sf.magnitude[0]), 16);
      if (a.read_partial_sums()[0] != want) {
        c.fail("16-bit randomized case diverged");
        break;
      }
    }
  }
  c.require(seconds_since(t0) < 10.0, "runtime exceeded 10 s");
  return c;
}

// 3. Hardware path bit-identical to the software reference on the seeded
//    3-layer toy network, binary and ternary, 128x128 and 64x64.
Check criterion3() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  for (const int size : {128, 64}) {
    for (const quant::PsqMode mode : {quant::PsqMode::binary, quant::PsqMode::ternary}) {
      quant::QuantScheme s = quant::QuantScheme::cifar();
      s.mode = mode;
      const mapper::HardwareConfig hw = mapper::HardwareConfig::for_crossbar(size);
      const mapper::ToyNet toy = mapper::make_toy_network(2024, s);
      try {
        const mapper::Calibration cal =
            mapper::calibrate(toy.workload, toy.weights, toy.inputs, s, hw, 0.5);
        mapper::run_functional(toy.workload, toy.weights, toy.inputs, s, hw, cal);
      } catch (const std::exception& e) {
        c.fail(std::string("crossbar ") + std::to_string(size) +
               (mode == quant::PsqMode::binary ? " binary: " : " ternary: ") + e.what());
      }
    }
  }
  c.require(seconds_since(t0) < 30.0, "runtime exceeded 30 s");
  return c;
}

// 4. Default tables reproduce the published per-column macro numbers.
Check criterion4() {
  Check c;
  const cost::CostTable table = cost::CostTable::defaults();
  for (const std::string label : {"A", "B"}) {
    const double per_col = table.at("dcim_" + label).energy_pj;
    const cost::DcimEnergyParams p = cost::DcimEnergyParams::calibrated(4, per_col);
    dcim::EventCounters ec;
    ec.precharge_reads = ec.computes = ec.stores = 4;  // one column, four steps
    const double e = cost::dcim_energy(ec, p);
    c.require(std::abs(e - 0.22) < 1e-12, "config " + label + " per-column energy is not 0.22 pJ");
  }
  const dcim::TimingParams tp;
  const double lat_a = dcim::timing_model(4, 128, tp).per_column_latency_ns;
  c.require(std::abs(lat_a - 0.0625) < 1e-12, "config A per-column latency is not 0.0625 ns");
  c.require(std::abs(lat_a - 0.06) / 0.06 <= 0.10 + 1e-9,
            "config A latency misses the published value by more than 10%");
  const double lat_b = dcim::timing_model(4, 64, tp).per_column_latency_ns;
  c.require(std::abs(lat_b - 0.125) < 1e-12, "config B per-column latency is not 0.125 ns");
  c.require(std::abs(lat_b - 0.1) / 0.1 <= 0.25 + 1e-9,
            "config B latency misses the published value by more than 25%");
  const double vs_sar7 = table.at("sar7").energy_pj / table.at("dcim_A").energy_pj;
  c.require(std::abs(vs_sar7 / 18.6 - 1.0) <= 0.01, "sar7 energy ratio outside 18.6x +-1%");
  const double vs_flash = table.at("flash4").energy_pj / table.at("dcim_A").energy_pj;
  c.require(std::abs(vs_flash / 8.45 - 1.0) <= 0.01, "flash4 energy ratio outside 8.45x +-1%");
  return c;
}

// 5. Injected 0.5 sparsity removes 24% +-1% of DCiM energy; latency is
//    identical at every sparsity point.
Check criterion5() {
  Check c;
  const quant::QuantScheme s = quant::QuantScheme::cifar();
  const mapper::HardwareConfig hw = mapper::HardwareConfig::config_a();
  const cost::CostTable table = cost::CostTable::defaults();
  const mapper::Workload w = mapper::load_workload((kSource / "workloads/resnet20.json").string());
  const mapper::ModeSpec mode = mapper::ModeSpec::parse("hcim_ternary");

  const cost::RunReport r0 = mapper::estimate(w, s, mode, table, {true, 0.0, {}}, hw);
  const cost::RunReport r5 = mapper::estimate(w, s, mode, table, {true, 0.5, {}}, hw);
  const double reduction = 1.0 - r5.component_energy("dcim") / r0.component_energy("dcim");
  c.require(std::abs(reduction - 0.24) <= 0.01,
            "DCiM reduction at 0.5 sparsity is " + std::to_string(reduction));
  double lat = -1.0;
  for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const cost::RunReport r = mapper::estimate(w, s, mode, table, {true, f, {}}, hw);
    if (lat < 0) lat = r.latency_ns();
    c.require(r.latency_ns() == lat, "latency changed with sparsity");
  }
  return c;
}

// 6. System-level orderings and bounded ratios on every bundled workload.
Check criterion6() {
  Check c;
  const quant::QuantScheme s = quant::QuantScheme::cifar();
  const mapper::HardwareConfig hw = mapper::HardwareConfig::config_a();
  const cost::CostTable table = cost::CostTable::defaults();
  const std::vector<std::string> workloads = {"resnet20", "resnet32",      "resnet44",
                                              "vgg9",     "wide_resnet20", "vgg11"};
  for (const std::string& name : workloads) {
    const mapper::Workload w =
        mapper::load_workload((kSource / "workloads" / (name + ".json")).string());
    const mapper::SparsitySpec half{true, 0.5, {}};
    const cost::RunReport ternary =
        mapper::estimate(w, s, mapper::ModeSpec::parse("hcim_ternary"), table, half, hw);
    const cost::RunReport binary =
        mapper::estimate(w, s, mapper::ModeSpec::parse("hcim_binary"), table, half, hw);
    const cost::RunReport adc7 =
        mapper::estimate(w, s, mapper::ModeSpec::parse("adc7"), table, half, hw);
    const cost::RunReport adc6 =
        mapper::estimate(w, s, mapper::ModeSpec::parse("adc6"), table, half, hw);
    const cost::RunReport adc4 =
        mapper::estimate(w, s, mapper::ModeSpec::parse("adc4"), table, half, hw);

    const double t = ternary.energy_pj();
    const double b = binary.energy_pj();
    for (const cost::RunReport* adc : {&adc7, &adc6, &adc4}) {
      c.require(t < adc->energy_pj() && b < adc->energy_pj(),
                name + ": an ADC baseline undercuts the in-memory path");
    }
    c.require(t <= 0.85 * b, name + ": ternary energy above 85% of binary");
    const double vs_sar7 = adc7.energy_pj() / t;
    c.require(vs_sar7 >= 10.0 && vs_sar7 <= 30.0,
              name + ": sar7 ratio " + std::to_string(vs_sar7) + " outside [10,30]");
    const double vs_flash = adc4.energy_pj() / t;
    c.require(vs_flash >= 3.0 && vs_flash <= 15.0,
              name + ": flash4 ratio " + std::to_string(vs_flash) + " outside [3,15]");
    c.require(adc4.latency_ns() < ternary.latency_ns(),
              name + ": flash baseline latency not below the in-memory path");
  }
  return c;
}

// 7. Scale-factor count law on random precisions and the two presets.
Check criterion7() {
  Check c;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000 && c.ok; ++trial) {
    const int bit_stream = 1 + static_cast<int>(rng() % 4);
    const int steps = 1 + static_cast<int>(rng() % 7);
    const int input_bits = bit_stream * steps;  // stays within the 30-bit cap
    const int columns = 1 + static_cast<int>(rng() % 512);
    quant::QuantScheme s;
    s.input_bits = input_bits;
    s.bit_stream = bit_stream;
    s.weight_bits = 2;
    s.bit_slice = 2;  // one slice per weight: physical columns == out_channels
    s.ps_bits = 16;
    s.sf_bits = 4;
    mapper::LayerSpec fc;
    fc.kind = mapper::LayerKind::fc;
    fc.name = "p";
    fc.in_channels = 64;
    fc.out_channels = columns;
    const mapper::TilePlan p = mapper::plan(fc, s, 128, columns);
    int64_t total = 0;
    for (int tc = 0; tc < p.col_tiles; ++tc) {
      total += p.sf_count(tc);
      c.require(p.sf_count(tc) ==
                    static_cast<int64_t>(input_bits / bit_stream) * p.physical_cols[tc],
                "per-tile scale factor count violates the per-crossbar law");
    }
    c.require(total == static_cast<int64_t>(input_bits / bit_stream) * columns,
              "total scale factor count violates the per-crossbar law");
  }

  const quant::QuantScheme cifar = quant::QuantScheme::cifar();
  mapper::LayerSpec fca;
  fca.kind = mapper::LayerKind::fc;
  fca.name = "a";
  fca.in_channels = 128;
  fca.out_channels = 32;  // fills 128 physical columns
  c.require(mapper::plan(fca, cifar, 128, 128).sf_count(0) == 512,
            "config A preset does not produce 512 scale factors");
  mapper::LayerSpec fcb = fca;
  fcb.out_channels = 16;  // fills 64 physical columns
  c.require(mapper::plan(fcb, cifar, 64, 64).sf_count(0) == 256,
            "config B preset does not produce 256 scale factors");
  return c;
}

// 8. Two estimate runs with identical config and seed emit byte-identical
//    CSV bodies.
Check criterion8() {
  Check c;
  const fs::path a = fs::temp_directory_path() / "hcim_acc_det_a";
  const fs::path b = fs::temp_directory_path() / "hcim_acc_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const fs::path cfg = fs::temp_directory_path() / "hcim_acc_det.json";
  {
    std::ofstream out(cfg);
    out << "{\"workload\": \"" << (kSource / "workloads/resnet20.json").string()
        << "\", \"seed\": 9}";
  }
  const auto run = [&](const fs::path& dir) {
    const std::string cmd =
        kCli + " estimate --config " + cfg.string() + " --out " + dir.string() + " >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  c.require(run(a) && run(b), "estimate run failed");
  if (c.ok) {
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      std::ifstream fa(entry.path(), std::ios::binary);
      std::ifstream fb(b / entry.path().filename(), std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      if (sa.str() != sb.str()) c.fail("CSV bodies differ: " + entry.path().filename().string());
    }
    c.require(compared >= 5, "expected at least five CSV outputs");
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Check (*fn)();
  };
  const Criterion criteria[] = {
      {"1 gate-level truth tables and borrow form", criterion1},
      {"2 word-level saturating arithmetic", criterion2},
      {"3 hardware path bit-identical to the reference", criterion3},
      {"4 per-column macro costs reproduced", criterion4},
      {"5 sparsity-energy curve and latency invariance", criterion5},
      {"6 system-level orderings on all bundled workloads", criterion6},
      {"7 scale-factor count law", criterion7},
      {"8 byte-identical reruns", criterion8},
  };
  int failures = 0;
  for (const Criterion& cr : criteria) {
    Check c;
    try {
      c = cr.fn();
    } catch (const std::exception& e) {
      c.fail(e.what());
    }
    if (!c.ok) ++failures;
    std::printf("[%s] criterion %s%s%s\n", c.ok ? "PASS" : "FAIL", cr.name,
                c.ok ? "" : ": ", c.ok ? "" : c.detail.c_str());
  }
  std::printf("acceptance: %d of 8 criteria passed\n", 8 - failures);
  return failures;
}
