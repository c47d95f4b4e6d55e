#pragma once

#include <cstdint>
#include <span>

namespace s2s {

/// Stateless counter-based generator: every draw is a pure function of
/// (key, counter), so results do not depend on evaluation order or thread
/// count. Child streams are derived with split().
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x5332534753454544ull)) {}

  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream); }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + 0x9E3779B97F4A7C15ull * (counter + 1));
  }
  /// Uniform in (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal (Box-Muller on two derived words).
  double normal(std::uint64_t counter) const;
  void fill_normal(std::span<float> out, std::uint64_t first_counter = 0) const;
  void fill_uniform(std::span<float> out, std::uint64_t first_counter = 0) const;

  std::uint64_t key() const { return key_; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  CounterRng(std::uint64_t parent_key, std::uint64_t stream)
      : key_(mix(parent_key ^ mix(stream + 0xD1B54A32D192ED03ull))) {}
  std::uint64_t key_;
};

}  // namespace s2s
