#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace s2s {

// All grids are row-major; ChannelGrid is channel-major (c, y, x).

struct ScalarGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  ScalarGrid() = default;
  ScalarGrid(std::size_t h, std::size_t w, float fill = 0.0f);
  ScalarGrid(std::size_t h, std::size_t w, std::vector<float> values);

  float& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  float at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
  std::size_t size() const { return data.size(); }

  bool operator==(const ScalarGrid&) const = default;
};

struct ChannelGrid {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  ChannelGrid() = default;
  ChannelGrid(std::size_t c, std::size_t h, std::size_t w, float fill = 0.0f);
  ChannelGrid(std::size_t c, std::size_t h, std::size_t w, std::vector<float> values);

  float& at(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * height + y) * width + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * height + y) * width + x];
  }
  std::span<float> plane(std::size_t c) {
    return {data.data() + c * height * width, height * width};
  }
  std::span<const float> plane(std::size_t c) const {
    return {data.data() + c * height * width, height * width};
  }
  std::size_t plane_size() const { return height * width; }
  bool same_shape(const ChannelGrid& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }

  bool operator==(const ChannelGrid&) const = default;
};

struct BinaryMask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(std::size_t h, std::size_t w, std::uint8_t fill = 0);
  BinaryMask(std::size_t h, std::size_t w, std::vector<std::uint8_t> values);

  std::uint8_t& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
  std::size_t size() const { return data.size(); }
  std::size_t count() const;
  BinaryMask inverted() const;

  bool operator==(const BinaryMask&) const = default;
};

/// Per-pixel displacement in pixels. `u` is along x (columns), `v` along y.
/// Sampling convention: a flow attached to target frame i and reference r
/// tells where target coordinate p finds its content in r, namely p + (u, v).
struct FlowField {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> u;
  std::vector<float> v;
  std::vector<std::uint8_t> valid;

  FlowField() = default;
  FlowField(std::size_t h, std::size_t w);  // zero, fully valid
  static FlowField constant(std::size_t h, std::size_t w, float du, float dv);
  static FlowField invalid(std::size_t h, std::size_t w);

  std::size_t index(std::size_t y, std::size_t x) const { return y * width + x; }
  std::size_t size() const { return u.size(); }
  std::size_t valid_count() const;
  bool same_shape(const FlowField& o) const { return height == o.height && width == o.width; }

  bool operator==(const FlowField&) const = default;
};

/// Placement of an h x w original frame on an H x W canvas, plus the
/// latent downsampling factor.
struct CanvasSpec {
  std::size_t orig_h = 0;
  std::size_t orig_w = 0;
  std::size_t canvas_h = 0;
  std::size_t canvas_w = 0;
  std::size_t offset_y = 0;
  std::size_t offset_x = 0;
  std::size_t downsample = 1;

  /// Throws ValueError when an invariant is violated.
  void validate() const;
  /// The same layout at latent resolution (every field divided by the
  /// downsampling factor, which becomes 1).
  CanvasSpec latent() const;

  /// Centered horizontal layout with the requested outpainting fraction of
  /// the canvas width (frame width = (1 - ratio) * canvas width).
  static CanvasSpec horizontal(std::size_t h, std::size_t canvas_w, double mask_ratio,
                               std::size_t downsample = 1);

  bool operator==(const CanvasSpec&) const = default;
};

ChannelGrid place_on_canvas(const ChannelGrid& frame, const CanvasSpec& spec, float fill = 0.0f);
ChannelGrid crop_from_canvas(const ChannelGrid& canvas, const CanvasSpec& spec);

/// 1 outside the placed original rectangle, 0 inside.
BinaryMask make_outpaint_mask(const CanvasSpec& spec);

/// s x s block averaging over valid cells; magnitudes are divided by s. An
/// output cell is valid only when every covered input cell is valid.
FlowField downscale_flow(const FlowField& flow, std::size_t s);

/// Max-pooling: an output cell is 1 iff any covered input cell is 1.
BinaryMask downscale_mask(const BinaryMask& mask, std::size_t s);

ScalarGrid mask_to_scalar(const BinaryMask& mask);

bool all_finite(std::span<const float> values);

}  // namespace s2s
