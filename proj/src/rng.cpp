#include "s2s/rng.hpp"

#include <cmath>
#include <numbers>

namespace s2s {

namespace {

double to_open_unit(std::uint64_t word) {
  // 53 high bits, shifted by half an ulp so 0 and 1 are never produced.
  return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double CounterRng::uniform(std::uint64_t counter) const { return to_open_unit(bits(counter)); }

double CounterRng::normal(std::uint64_t counter) const {
  const double u1 = to_open_unit(bits(2 * counter));
  const double u2 = to_open_unit(bits(2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void CounterRng::fill_normal(std::span<float> out, std::uint64_t first_counter) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(normal(first_counter + i));
}

void CounterRng::fill_uniform(std::span<float> out, std::uint64_t first_counter) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(uniform(first_counter + i));
}

}  // namespace s2s
