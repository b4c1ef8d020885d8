#pragma once

#include <cstdint>
#include <random>

namespace subkern {

/// Seeded random stream whose output is identical on every platform.
///
/// std::mt19937_64 has a fully specified output sequence; the standard
/// distributions do not, so every draw below is built directly from the
/// raw 64-bit words.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal via the inverse CDF of one open-uniform draw.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and indices.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

}  // namespace subkern
