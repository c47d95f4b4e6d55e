#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "s2s/grid.hpp"
#include "s2s/ref_select.hpp"

namespace s2s {

enum class Direction { past, future };

inline constexpr double kCoverageThreshold = 0.999;

struct IndexGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::int32_t> data;

  IndexGrid() = default;
  IndexGrid(std::size_t h, std::size_t w, std::int32_t fill = -1)
      : height(h), width(w), data(h * w, fill) {}
  std::int32_t at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
  bool operator==(const IndexGrid&) const = default;
};

struct PropagationResult {
  ChannelGrid latent;
  BinaryMask coverage;   // cells filled by propagation
  IndexGrid provenance;  // supplying reference per cell, -1 where unfilled
  std::size_t warp_count = 0;     // latent pulls (backward warps) charged to the frame
  std::size_t compose_count = 0;  // flow compositions charged to the frame
};

/// Completed latent-resolution flows for one sequence and chain.
///   to_past[i]      F_{i -> r-(i)}   (unused, may be empty, when i is a reference)
///   to_future[i]    F_{i -> r+(i)}
///   hop_forward[t]  F_{r_t -> r_t+1}
///   hop_backward[t] F_{r_t+1 -> r_t}
struct FlowSet {
  std::vector<FlowField> to_past;
  std::vector<FlowField> to_future;
  std::vector<FlowField> hop_forward;
  std::vector<FlowField> hop_backward;
};

/// Contract: output has the input dimensions and equals z_orig wherever
/// m_outpaint = 0.
class Aligner {
 public:
  virtual ~Aligner() = default;
  virtual ChannelGrid align(const ChannelGrid& z_orig, const ChannelGrid& z_prop,
                            const BinaryMask& m_outpaint, const BinaryMask& m_prop) const = 0;
};

/// Contract: where exactly one direction has coverage, the output equals that
/// direction's values.
class Fuser {
 public:
  virtual ~Fuser() = default;
  virtual ChannelGrid fuse(const ChannelGrid& forward, const ChannelGrid& backward,
                           const BinaryMask& cov_f, const BinaryMask& cov_b, std::size_t dist_f,
                           std::size_t dist_b) const = 0;
};

/// z_orig on the source region, z_prop on covered outpainting cells, z_orig
/// (the canvas fill) on the remaining holes.
ChannelGrid align_baseline(const ChannelGrid& z_orig, const ChannelGrid& z_prop,
                           const BinaryMask& m_outpaint, const BinaryMask& m_prop);

/// Single-coverage cells copy their direction; doubly covered cells blend
/// with forward weight dist_b / (dist_f + dist_b) (0.5 when both are zero);
/// uncovered cells keep the forward value.
ChannelGrid fuse_baseline(const ChannelGrid& forward, const ChannelGrid& backward,
                          const BinaryMask& cov_f, const BinaryMask& cov_b, std::size_t dist_f,
                          std::size_t dist_b);

class BaselineAligner final : public Aligner {
 public:
  ChannelGrid align(const ChannelGrid& z_orig, const ChannelGrid& z_prop,
                    const BinaryMask& m_outpaint, const BinaryMask& m_prop) const override {
    return align_baseline(z_orig, z_prop, m_outpaint, m_prop);
  }
};

class BaselineFuser final : public Fuser {
 public:
  ChannelGrid fuse(const ChannelGrid& forward, const ChannelGrid& backward,
                   const BinaryMask& cov_f, const BinaryMask& cov_b, std::size_t dist_f,
                   std::size_t dist_b) const override {
    return fuse_baseline(forward, backward, cov_f, cov_b, dist_f, dist_b);
  }
};

struct PropagationInputs {
  const ReferenceChain& chain;
  std::span<const ChannelGrid> latents;  // placed on the latent canvas
  std::span<const BinaryMask> masks;     // outpainting masks, latent resolution
  const FlowSet& flows;
  double coverage_threshold = kCoverageThreshold;
};

/// One-shot pull for frame i along the chain in one temporal direction.
/// References are visited nearest first; each one fills only cells that are
/// still uncovered and where its warped source mask reaches the threshold.
/// If i itself is a reference it covers its own source region without a warp.
PropagationResult propagate_direction(std::size_t frame, const PropagationInputs& in,
                                      Direction direction);

/// Both directions, per-direction alignment, then fusion.
PropagationResult propagate_frame(std::size_t frame, const PropagationInputs& in,
                                  const Aligner& aligner, const Fuser& fuser);

struct WarpCounts {
  std::size_t guided = 0;      // one pull per (frame, other chain member)
  std::size_t sequential = 0;  // every frame treated as a reference
  std::size_t all_pairs = 0;   // N (N - 1) direct pairwise pulls
};

WarpCounts analytic_warp_counts(const ReferenceChain& chain);

struct SequenceResult {
  std::vector<PropagationResult> frames;
  std::size_t total_warps = 0;
  std::size_t total_compositions = 0;
  WarpCounts analytic;
};

/// Runs propagate_frame for every frame (frames in parallel).
SequenceResult propagate_sequence(const PropagationInputs& in, const Aligner& aligner,
                                  const Fuser& fuser);

/// Checks that latents, masks and flows agree with the chain and each other.
void validate_inputs(const PropagationInputs& in);

}  // namespace s2s
