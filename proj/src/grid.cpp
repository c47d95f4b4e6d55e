#include "s2s/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "s2s/error.hpp"

namespace s2s {

namespace {

void require_size(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw DimensionError(std::string(what) + ": payload has " + std::to_string(actual) +
                         " values, expected " + std::to_string(expected));
  }
}

void require_divisible(std::size_t h, std::size_t w, std::size_t s, const char* what) {
  if (s == 0 || h % s != 0 || w % s != 0) {
    throw DimensionError(std::string(what) + ": factor " + std::to_string(s) +
                         " does not divide " + std::to_string(h) + "x" + std::to_string(w));
  }
}

}  // namespace

ScalarGrid::ScalarGrid(std::size_t h, std::size_t w, float fill)
    : height(h), width(w), data(h * w, fill) {}

ScalarGrid::ScalarGrid(std::size_t h, std::size_t w, std::vector<float> values)
    : height(h), width(w), data(std::move(values)) {
  require_size(h * w, data.size(), "ScalarGrid");
}

ChannelGrid::ChannelGrid(std::size_t c, std::size_t h, std::size_t w, float fill)
    : channels(c), height(h), width(w), data(c * h * w, fill) {}

ChannelGrid::ChannelGrid(std::size_t c, std::size_t h, std::size_t w, std::vector<float> values)
    : channels(c), height(h), width(w), data(std::move(values)) {
  require_size(c * h * w, data.size(), "ChannelGrid");
}

BinaryMask::BinaryMask(std::size_t h, std::size_t w, std::uint8_t fill)
    : height(h), width(w), data(h * w, fill ? 1 : 0) {}

BinaryMask::BinaryMask(std::size_t h, std::size_t w, std::vector<std::uint8_t> values)
    : height(h), width(w), data(std::move(values)) {
  require_size(h * w, data.size(), "BinaryMask");
  for (auto value : data) {
    if (value > 1) throw ValueError("BinaryMask: entries must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::inverted() const {
  BinaryMask out(height, width);
  for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] ? 0 : 1;
  return out;
}

FlowField::FlowField(std::size_t h, std::size_t w)
    : height(h), width(w), u(h * w, 0.0f), v(h * w, 0.0f), valid(h * w, 1) {}

FlowField FlowField::constant(std::size_t h, std::size_t w, float du, float dv) {
  FlowField f(h, w);
  std::fill(f.u.begin(), f.u.end(), du);
  std::fill(f.v.begin(), f.v.end(), dv);
  return f;
}

FlowField FlowField::invalid(std::size_t h, std::size_t w) {
  FlowField f(h, w);
  std::fill(f.valid.begin(), f.valid.end(), std::uint8_t{0});
  return f;
}

std::size_t FlowField::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

void CanvasSpec::validate() const {
  if (orig_h == 0 || orig_w == 0) throw ValueError("CanvasSpec: original frame is empty");
  if (canvas_h < orig_h || canvas_w < orig_w) {
    throw ValueError("CanvasSpec: canvas smaller than original frame");
  }
  if (offset_y + orig_h > canvas_h || offset_x + orig_w > canvas_w) {
    throw ValueError("CanvasSpec: original frame does not fit inside the canvas at the offset");
  }
  if (downsample == 0) throw ValueError("CanvasSpec: downsample must be >= 1");
  const std::size_t s = downsample;
  if (orig_h % s || orig_w % s || canvas_h % s || canvas_w % s || offset_y % s || offset_x % s) {
    throw ValueError("CanvasSpec: downsample factor " + std::to_string(s) +
                     " must divide all sizes and offsets");
  }
}

CanvasSpec CanvasSpec::latent() const {
  validate();
  const std::size_t s = downsample;
  return CanvasSpec{orig_h / s, orig_w / s, canvas_h / s, canvas_w / s,
                    offset_y / s, offset_x / s, 1};
}

CanvasSpec CanvasSpec::horizontal(std::size_t h, std::size_t canvas_w, double mask_ratio,
                                  std::size_t downsample) {
  if (!(mask_ratio >= 0.0 && mask_ratio < 1.0)) {
    throw ValueError("CanvasSpec::horizontal: mask ratio must lie in [0, 1)");
  }
  const double w_exact = (1.0 - mask_ratio) * static_cast<double>(canvas_w);
  const auto w = static_cast<std::size_t>(std::llround(w_exact));
  CanvasSpec spec{h, w, h, canvas_w, 0, (canvas_w - w) / 2, downsample};
  spec.validate();
  return spec;
}

ChannelGrid place_on_canvas(const ChannelGrid& frame, const CanvasSpec& spec, float fill) {
  spec.validate();
  if (frame.height != spec.orig_h || frame.width != spec.orig_w) {
    throw DimensionError("place_on_canvas: frame is " + std::to_string(frame.height) + "x" +
                         std::to_string(frame.width) + ", canvas spec expects " +
                         std::to_string(spec.orig_h) + "x" + std::to_string(spec.orig_w));
  }
  ChannelGrid out(frame.channels, spec.canvas_h, spec.canvas_w, fill);
  for (std::size_t c = 0; c < frame.channels; ++c) {
    for (std::size_t y = 0; y < frame.height; ++y) {
      const float* src = &frame.data[(c * frame.height + y) * frame.width];
      std::copy(src, src + frame.width, &out.at(c, y + spec.offset_y, spec.offset_x));
    }
  }
  return out;
}

ChannelGrid crop_from_canvas(const ChannelGrid& canvas, const CanvasSpec& spec) {
  spec.validate();
  if (canvas.height != spec.canvas_h || canvas.width != spec.canvas_w) {
    throw DimensionError("crop_from_canvas: canvas dimensions do not match spec");
  }
  ChannelGrid out(canvas.channels, spec.orig_h, spec.orig_w);
  for (std::size_t c = 0; c < canvas.channels; ++c) {
    for (std::size_t y = 0; y < spec.orig_h; ++y) {
      const float* src = canvas.data.data() + (c * canvas.height + y + spec.offset_y) * canvas.width + spec.offset_x;
      std::copy(src, src + spec.orig_w, &out.at(c, y, 0));
    }
  }
  return out;
}

BinaryMask make_outpaint_mask(const CanvasSpec& spec) {
  spec.validate();
  BinaryMask mask(spec.canvas_h, spec.canvas_w, 1);
  for (std::size_t y = spec.offset_y; y < spec.offset_y + spec.orig_h; ++y) {
    std::fill_n(&mask.at(y, spec.offset_x), spec.orig_w, std::uint8_t{0});
  }
  return mask;
}

FlowField downscale_flow(const FlowField& flow, std::size_t s) {
  require_divisible(flow.height, flow.width, s, "downscale_flow");
  const std::size_t oh = flow.height / s;
  const std::size_t ow = flow.width / s;
  FlowField out(oh, ow);
  const double inv_s = 1.0 / static_cast<double>(s);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double su = 0.0, sv = 0.0;
      std::size_t n_valid = 0;
      for (std::size_t dy = 0; dy < s; ++dy) {
        for (std::size_t dx = 0; dx < s; ++dx) {
          const std::size_t i = flow.index(y * s + dy, x * s + dx);
          if (!flow.valid[i]) continue;
          su += flow.u[i];
          sv += flow.v[i];
          ++n_valid;
        }
      }
      const std::size_t o = out.index(y, x);
      out.valid[o] = n_valid == s * s ? 1 : 0;
      if (n_valid > 0) {
        out.u[o] = static_cast<float>(su / static_cast<double>(n_valid) * inv_s);
        out.v[o] = static_cast<float>(sv / static_cast<double>(n_valid) * inv_s);
      } else {
        out.u[o] = 0.0f;
        out.v[o] = 0.0f;
      }
    }
  }
  return out;
}

BinaryMask downscale_mask(const BinaryMask& mask, std::size_t s) {
  require_divisible(mask.height, mask.width, s, "downscale_mask");
  BinaryMask out(mask.height / s, mask.width / s, 0);
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (mask.at(y, x)) out.at(y / s, x / s) = 1;
    }
  }
  return out;
}

ScalarGrid mask_to_scalar(const BinaryMask& mask) {
  ScalarGrid out(mask.height, mask.width);
  for (std::size_t i = 0; i < mask.data.size(); ++i) out.data[i] = mask.data[i] ? 1.0f : 0.0f;
  return out;
}

bool all_finite(std::span<const float> values) {
  return std::all_of(values.begin(), values.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace s2s
