#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace rumor_locus {

// SplitMix64 finalizer; full-period bijective mixer.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic generator family: (master seed, substream index) fully
// determines the stream, so per-trial results are independent of thread
// scheduling and of how trials are partitioned. The uniform/exponential
// transforms are pinned here rather than taken from std::*_distribution,
// whose output is implementation-defined.
class RandomStream {
 public:
  RandomStream(uint64_t master_seed, uint64_t substream)
      : engine_(mix64(master_seed ^ mix64(substream + 0xd1b54a32d192ed03ULL))) {}

  uint64_t next_u64() { return engine_(); }

  // Unbiased uniform draw on [0, n) by rejecting the short leading range.
  uint64_t next_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be >= 1");
    const uint64_t cutoff = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    uint64_t x = next_u64();
    while (x < cutoff) x = next_u64();
    return x % n;
  }

  // Uniform on (0, 1]; 53-bit resolution, never zero.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Exponential with rate 1.
  double next_exponential() { return -std::log(next_unit()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rumor_locus
