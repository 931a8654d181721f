#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace dann {

/// Seeded xoshiro256** generator.
///
/// The 256-bit state is filled from the 64-bit seed with splitmix64, so the
/// stream depends only on integer arithmetic and is identical across
/// platforms. Independent streams for sub-tasks are obtained with
/// derive_seed(master, stream_id), which runs splitmix64 over
/// master + (stream_id + 1) * 0x9e3779b97f4a7c15.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();

  /// Uniform integer in [lo, hi], both inclusive. Unbiased (rejection).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [lo, hi) with 53 random mantissa bits.
  double uniform(double lo, double hi);

  /// Standard normal draw (Marsaglia polar method, no cached spare).
  double gauss();

  /// Fisher-Yates shuffle driven by uniform_int.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(items[i - 1], items[j]);
    }
  }

  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id);

 private:
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace dann
