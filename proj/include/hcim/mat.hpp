#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hcim {

// Dense row-major integer matrix. int64 everywhere so one type serves raw
// activations, signed weights and wide accumulators.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<int64_t> data;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0) {}

  int64_t& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  int64_t at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
  bool empty() const { return rows == 0 || cols == 0; }
};

}  // namespace hcim
