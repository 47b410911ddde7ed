// Deterministic block-parallel reduction.
//
// Work is split into fixed-size grains; each grain is reduced sequentially
// and grain results are combined in grain order.  The result is therefore
// bit-identical for every thread count, including 1.
#pragma once

#include "primeforms/numbers.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace primeforms {

// Thread count: explicit argument > PRIMEFORMS_THREADS env var > hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRIMEFORMS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Reduce f over [0, count) in grains of fixed size.  `zero` is the identity,
// `grain_fn(lo, hi)` reduces one half-open grain, `combine` is associative.
// Grains are assigned to threads dynamically but combined strictly in grain
// order, so floating-point results do not depend on the schedule.
template <typename T>
T parallel_reduce(u64 count, u64 grain, int threads, T zero,
                  const std::function<T(u64, u64)>& grain_fn,
                  const std::function<T(const T&, const T&)>& combine) {
  if (count == 0) return zero;
  grain = std::max<u64>(grain, 1);
  const u64 ngrains = (count + grain - 1) / grain;
  threads = std::min<int>(resolve_threads(threads),
                          static_cast<int>(std::min<u64>(ngrains, 256)));
  std::vector<T> partial(ngrains, zero);
  if (threads <= 1) {
    for (u64 g = 0; g < ngrains; ++g) {
      partial[g] = grain_fn(g * grain, std::min(count, (g + 1) * grain));
    }
  } else {
    std::atomic<u64> next{0};
    auto worker = [&] {
      for (;;) {
        u64 g = next.fetch_add(1);
        if (g >= ngrains) return;
        partial[g] = grain_fn(g * grain, std::min(count, (g + 1) * grain));
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  T acc = zero;
  for (u64 g = 0; g < ngrains; ++g) acc = combine(acc, partial[g]);
  return acc;
}

}  // namespace primeforms
