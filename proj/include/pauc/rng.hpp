#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace pauc {

// Identifies an independent, reproducible stream of random numbers. The same
// (seed, stream) pair produces the same draws on every platform: the engine
// is std::mt19937_64 (fully specified by the standard) and all variate
// transforms below are implemented here rather than taken from <random>'s
// implementation-defined distributions.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// SplitMix64-style mixing of a (seed, stream) pair into a single 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(RngStream stream);

  std::uint64_t next() { return engine_(); }
  // Uniform on {0, ..., n-1}, unbiased (multiply-shift with rejection).
  std::size_t uniform_index(std::size_t n);
  // Uniform on the open interval (0, 1).
  double uniform01();
  // Standard normal via the Box-Muller transform.
  double standard_normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pauc
