#pragma once

#include <cstdint>
#include <iosfwd>

namespace hcim::cli {

struct SelftestOptions {
  uint64_t seed = 1;
  // Testing hook: replace the borrow expression with a broken variant to
  // prove the truth-table suite catches single-gate faults.
  bool inject_full_sub_fault = false;
};

struct SelftestResult {
  int suites_run = 0;
  int failures = 0;
};

// Exhaustive gate truth tables, saturating word-level arithmetic (both the
// 8-bit and 16-bit profiles) and pipeline transparency. Prints one line per
// suite; returns the failure count.
SelftestResult run_selftest(const SelftestOptions& options, std::ostream& log);

}  // namespace hcim::cli
