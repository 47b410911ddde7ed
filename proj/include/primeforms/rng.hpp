// Counter-based random numbers for reproducible Monte Carlo.
//
// Every sample is a pure function of (seed, sample index, dimension), so the
// stream a worker thread sees does not depend on how samples are scheduled
// across threads.  Reports produced with the same seed are byte-identical at
// any thread count.
#pragma once

#include "primeforms/numbers.hpp"

namespace primeforms {

// splitmix64 finalizer: a well-mixed 64-bit permutation.
inline u64 mix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform u64 keyed by (seed, index, dim).  The dimension key is followed by
// two mixing rounds: one round leaves a measurable near-collision excess
// between streams whose keys differ by a fixed XOR, which biases statistics
// that compare coordinates of the same sample (slab-volume estimates).
inline u64 rng_u64(u64 seed, u64 index, u64 dim) {
  u64 x = mix64(seed ^ 0x6a09e667f3bcc909ull);
  x = mix64(x ^ index);
  x = mix64(x ^ (dim * 0x9e3779b97f4a7c15ull));
  return mix64(x);
}

// Uniform double in [0,1), 53 random bits.
inline double rng_unit(u64 seed, u64 index, u64 dim) {
  return static_cast<double>(rng_u64(seed, index, dim) >> 11) * 0x1.0p-53;
}

// Uniform double in [lo,hi).
inline double rng_range(u64 seed, u64 index, u64 dim, double lo, double hi) {
  return lo + (hi - lo) * rng_unit(seed, index, dim);
}

// Uniform integer in [0, n).  Multiply-shift; bias is < 2^-64 and irrelevant
// for the sampling uses here.
inline u64 rng_below(u64 seed, u64 index, u64 dim, u64 n) {
  return static_cast<u64>(
      (static_cast<unsigned __int128>(rng_u64(seed, index, dim)) * n) >> 64);
}

}  // namespace primeforms
