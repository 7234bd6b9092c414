#pragma once

#include <stdexcept>
#include <string>

namespace hcim {

// Bad user input: config files, workload files, cost tables, CLI flags.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Hardware path disagreed with the software reference.
struct MismatchError : std::runtime_error {
  explicit MismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal consistency check failed (monotonicity, totals, ...).
struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hcim
