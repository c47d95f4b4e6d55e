#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "s2s/grid.hpp"

namespace s2s {

/// Strictly increasing frame indices that always start at frame 0 and end at
/// the last frame; consecutive gaps never exceed `window`.
struct ReferenceChain {
  std::vector<std::size_t> indices;
  std::size_t window = 1;
  std::size_t num_frames = 0;

  std::size_t size() const { return indices.size(); }
  bool contains(std::size_t frame) const;
  /// Position of `frame` in `indices`; throws ValueError when absent.
  std::size_t position(std::size_t frame) const;
  void validate() const;

  bool operator==(const ReferenceChain&) const = default;
};

/// BT.601 luma of a 3-channel frame with values in [0, 1].
ScalarGrid to_grayscale(const ChannelGrid& frame);

/// Greedy chain: from the current reference r, pick the candidate in
/// r+1 .. min(r+m, N-1) with the lowest structure score against r, ties going
/// to the later frame. Once fewer than m candidates remain, the last frame is
/// appended and the search stops.
ReferenceChain build_reference_chain(std::span<const ChannelGrid> frames, std::size_t window);

/// Same search on precomputed grayscale frames.
ReferenceChain build_reference_chain_gray(std::span<const ScalarGrid> gray, std::size_t window);

struct NearestRefs {
  std::size_t past;
  std::size_t future;
};

/// past = max{r in chain : r <= i}, future = min{r in chain : r >= i}.
NearestRefs nearest_refs(const ReferenceChain& chain, std::size_t frame);

/// {0, stride, 2 stride, ...} plus the last frame.
ReferenceChain fixed_stride_chain(std::size_t num_frames, std::size_t stride);

}  // namespace s2s
