#pragma once

#include <chrono>
#include <exception>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "s2s/pipeline.hpp"

namespace s2s::internal {

inline std::size_t bytes_of(const ChannelGrid& g) { return g.data.size() * sizeof(float); }
inline std::size_t bytes_of(const BinaryMask& m) { return m.data.size(); }
inline std::size_t bytes_of(const FlowField& f) { return f.size() * (2 * sizeof(float) + 1); }
inline std::size_t bytes_of(const PropagationResult& r) {
  return bytes_of(r.latent) + bytes_of(r.coverage) + r.provenance.data.size() * sizeof(std::int32_t);
}
template <typename T>
inline std::size_t bytes_of(const std::vector<T>& v) {
  std::size_t total = 0;
  for (const auto& x : v) total += bytes_of(x);
  return total;
}
inline std::size_t bytes_of(const FlowSet& f) {
  return bytes_of(f.to_past) + bytes_of(f.to_future) + bytes_of(f.hop_forward) +
         bytes_of(f.hop_backward);
}

class StageClock {
 public:
  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      ms_[stage] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto out = fn();
      finish();
      return out;
    }
  }
  const std::map<std::string, double>& ms() const { return ms_; }

 private:
  std::map<std::string, double> ms_;
};

template <typename Fn>
void parallel_for_each(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace s2s::internal
