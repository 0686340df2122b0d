#pragma once

#include <cstdint>
#include <random>

namespace gpid {

// splitmix64 finalizer; the standard constant.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Substream seed for replication `index`: hash-mix of seed and index, so
// replications are independent and order-free (no global state).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// Deterministic uniform stream.  mt19937_64 output is pinned by the standard;
// the bit-to-double mapping is explicit, so sequences are identical across
// platforms (std::uniform_real_distribution would not be).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on the open interval (0,1); never returns an endpoint
  double uniform01() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gpid
