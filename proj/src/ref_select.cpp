#include "s2s/ref_select.hpp"

#include <algorithm>
#include <string>

#include "s2s/error.hpp"
#include "s2s/kernels.hpp"

namespace s2s {

bool ReferenceChain::contains(std::size_t frame) const {
  return std::binary_search(indices.begin(), indices.end(), frame);
}

std::size_t ReferenceChain::position(std::size_t frame) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), frame);
  if (it == indices.end() || *it != frame) {
    throw ValueError("frame " + std::to_string(frame) + " is not in the reference chain");
  }
  return static_cast<std::size_t>(it - indices.begin());
}

void ReferenceChain::validate() const {
  if (num_frames == 0 || indices.empty()) throw ValueError("reference chain is empty");
  if (indices.front() != 0) throw ValueError("reference chain must start at frame 0");
  if (indices.back() != num_frames - 1) {
    throw ValueError("reference chain must end at the last frame");
  }
  for (std::size_t k = 1; k < indices.size(); ++k) {
    if (indices[k] <= indices[k - 1]) throw ValueError("reference chain is not strictly increasing");
  }
}

ScalarGrid to_grayscale(const ChannelGrid& frame) {
  if (frame.channels != 3) {
    throw DimensionError("to_grayscale: expected 3 channels, got " +
                         std::to_string(frame.channels));
  }
  ScalarGrid out(frame.height, frame.width);
  const auto r = frame.plane(0), g = frame.plane(1), b = frame.plane(2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  }
  return out;
}

ReferenceChain build_reference_chain_gray(std::span<const ScalarGrid> gray, std::size_t window) {
  if (gray.empty()) throw ValueError("build_reference_chain: empty frame sequence");
  if (window == 0) throw ValueError("build_reference_chain: window must be >= 1");
  const std::size_t n = gray.size();
  ReferenceChain chain{{0}, window, n};
  std::size_t current = 0;
  while (current < n - 1) {
    const std::size_t last_candidate = std::min(current + window, n - 1);
    const std::size_t num_candidates = last_candidate - current;
    if (num_candidates < window) {
      chain.indices.push_back(n - 1);
      break;
    }
    std::vector<double> scores(num_candidates);
    for (std::size_t k = 0; k < num_candidates; ++k) {
      scores[k] = ssim_structure_score(gray[current], gray[current + 1 + k]);
    }
    // Scanning from the far end keeps the largest index among equal minima.
    std::size_t best = num_candidates - 1;
    for (std::size_t k = num_candidates - 1; k-- > 0;) {
      if (scores[k] < scores[best]) best = k;
    }
    current = current + 1 + best;
    chain.indices.push_back(current);
  }
  return chain;
}

ReferenceChain build_reference_chain(std::span<const ChannelGrid> frames, std::size_t window) {
  if (frames.empty()) throw ValueError("build_reference_chain: empty frame sequence");
  std::vector<ScalarGrid> gray;
  gray.reserve(frames.size());
  for (const auto& f : frames) gray.push_back(to_grayscale(f));
  return build_reference_chain_gray(gray, window);
}

NearestRefs nearest_refs(const ReferenceChain& chain, std::size_t frame) {
  if (frame >= chain.num_frames) {
    throw ValueError("nearest_refs: frame " + std::to_string(frame) + " outside sequence");
  }
  const auto& idx = chain.indices;
  auto hi = std::lower_bound(idx.begin(), idx.end(), frame);
  if (hi != idx.end() && *hi == frame) return {frame, frame};
  if (hi == idx.begin() || hi == idx.end()) {
    throw ValueError("nearest_refs: chain does not bracket frame " + std::to_string(frame));
  }
  return {*(hi - 1), *hi};
}

ReferenceChain fixed_stride_chain(std::size_t num_frames, std::size_t stride) {
  if (stride == 0) throw ValueError("fixed_stride_chain: stride must be >= 1");
  if (num_frames == 0) throw ValueError("fixed_stride_chain: empty sequence");
  ReferenceChain chain{{}, stride, num_frames};
  for (std::size_t i = 0; i < num_frames; i += stride) chain.indices.push_back(i);
  if (chain.indices.back() != num_frames - 1) chain.indices.push_back(num_frames - 1);
  return chain;
}

}  // namespace s2s
