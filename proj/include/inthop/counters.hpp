#pragma once

#include <cstdint>

namespace inthop {

// Per-run work ledger. One solver run owns one instance; nothing here is
// shared across threads.
struct Counters {
  std::int64_t f_evals = 0;
  std::int64_t g_evals = 0;
  std::int64_t h_evals = 0;
  std::int64_t ih_evals = 0;
  std::int64_t n3_ops = 0;  // Cholesky attempts, factor-for-solve, dense eigen bounds
  std::int64_t iterations = 0;
  std::int64_t refreshes = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

}  // namespace inthop
