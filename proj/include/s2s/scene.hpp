#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "s2s/grid.hpp"

namespace s2s {

enum class TrajectoryKind { fixed, pan, ping_pong };

std::string to_string(TrajectoryKind kind);
TrajectoryKind parse_trajectory(const std::string& name);

/// Per-frame top-left position of the original frame inside the world.
///   fixed      origin = start for every frame
///   pan        origin = start + i * (dx, dy)
///   ping_pong  moves by (dx, dy) for `leg` frames, then back, and repeats
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::pan;
  double dx = 0.0;
  double dy = 0.0;
  double start_x = 0.0;
  double start_y = 0.0;
  std::size_t leg = 8;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::size_t world_h = 0;
  std::size_t world_w = 0;
  std::size_t channels = 3;
  std::size_t num_frames = 1;
  CanvasSpec canvas;
  TrajectorySpec trajectory;
};

struct Origin {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Origin&) const = default;
};

struct SyntheticScene {
  SceneSpec spec;
  ChannelGrid world;
  std::vector<Origin> origins;

  std::size_t num_frames() const { return origins.size(); }
  /// Original-size crop at the frame's origin.
  ChannelGrid frame(std::size_t i) const;
  /// Canvas-size crop: what a perfect outpainting of frame i would show.
  ChannelGrid expanded_truth(std::size_t i) const;
  std::vector<ChannelGrid> frames() const;
  /// Backward-warp flow that lets `target` sample `reference`
  /// (frame_target(p) = frame_reference(p + flow)). It is constant and equals
  /// origin_target - origin_reference; equivalently, the displacement from
  /// frame `reference` to frame `target` is origin_target - origin_reference.
  FlowField flow(std::size_t target, std::size_t reference) const;
  /// True when the whole world pixel block under canvas cell (y, x) of frame
  /// `target` at latent factor s lies inside the original crop of `source`.
  bool visible_in(std::size_t target, std::size_t y, std::size_t x, std::size_t source,
                  std::size_t s) const;
};

/// Deterministic value-noise world (several octaves per channel, values in
/// [0, 1]) and the trajectory's origins. Throws ValueError when any expanded
/// crop leaves the world.
SyntheticScene generate_scene(const SceneSpec& spec);

ChannelGrid value_noise_world(std::uint64_t seed, std::size_t channels, std::size_t h,
                              std::size_t w);

}  // namespace s2s
