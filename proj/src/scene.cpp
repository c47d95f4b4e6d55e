#include "s2s/scene.hpp"

#include <algorithm>
#include <cmath>

#include "s2s/error.hpp"
#include "s2s/rng.hpp"

namespace s2s {

namespace {

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinear crop of the world at a possibly fractional origin; exact copy for
// integer origins.
ChannelGrid crop(const ChannelGrid& world, double ox, double oy, std::size_t h, std::size_t w) {
  ChannelGrid out(world.channels, h, w);
  const double fx = ox - std::floor(ox), fy = oy - std::floor(oy);
  const auto x0 = static_cast<std::size_t>(std::floor(ox));
  const auto y0 = static_cast<std::size_t>(std::floor(oy));
  for (std::size_t c = 0; c < world.channels; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t wy = y0 + y, wx = x0 + x;
        if (fx == 0.0 && fy == 0.0) {
          out.at(c, y, x) = world.at(c, wy, wx);
          continue;
        }
        const std::size_t wx1 = fx > 0.0 ? wx + 1 : wx;
        const std::size_t wy1 = fy > 0.0 ? wy + 1 : wy;
        const double top = (1.0 - fx) * world.at(c, wy, wx) + fx * world.at(c, wy, wx1);
        const double bot = (1.0 - fx) * world.at(c, wy1, wx) + fx * world.at(c, wy1, wx1);
        out.at(c, y, x) = static_cast<float>((1.0 - fy) * top + fy * bot);
      }
    }
  }
  return out;
}

bool fits(double ox, double oy, std::size_t h, std::size_t w, const ChannelGrid& world) {
  if (ox < 0.0 || oy < 0.0) return false;
  const double max_x = std::ceil(ox) + static_cast<double>(w) - 1.0;
  const double max_y = std::ceil(oy) + static_cast<double>(h) - 1.0;
  return max_x <= static_cast<double>(world.width) - 1.0 &&
         max_y <= static_cast<double>(world.height) - 1.0;
}

}  // namespace

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::fixed: return "static";
    case TrajectoryKind::pan: return "pan";
    case TrajectoryKind::ping_pong: return "pingpong";
  }
  return "unknown";
}

TrajectoryKind parse_trajectory(const std::string& name) {
  if (name == "static") return TrajectoryKind::fixed;
  if (name == "pan") return TrajectoryKind::pan;
  if (name == "pingpong") return TrajectoryKind::ping_pong;
  throw ValueError("unknown trajectory '" + name + "' (expected static, pan or pingpong)");
}

ChannelGrid value_noise_world(std::uint64_t seed, std::size_t channels, std::size_t h,
                              std::size_t w) {
  // Lattice spacings from coarse to per-pixel; the finest octave keeps every
  // local window textured.
  static constexpr std::size_t kSpacing[] = {32, 16, 8, 4, 2};
  static constexpr double kAmplitude[] = {0.40, 0.25, 0.15, 0.12, 0.08};
  const CounterRng root(seed);
  ChannelGrid world(channels, h, w, 0.0f);
  std::vector<double> acc(h * w);
  for (std::size_t c = 0; c < channels; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t o = 0; o < std::size(kSpacing); ++o) {
      const CounterRng rng = root.split(c).split(o);
      const std::size_t sp = kSpacing[o];
      const std::size_t gw = w / sp + 2;
      auto lattice = [&](std::size_t gy, std::size_t gx) { return rng.uniform(gy * gw + gx); };
      for (std::size_t y = 0; y < h; ++y) {
        const std::size_t gy = y / sp;
        const double ty = smooth(static_cast<double>(y % sp) / static_cast<double>(sp));
        for (std::size_t x = 0; x < w; ++x) {
          const std::size_t gx = x / sp;
          const double tx = smooth(static_cast<double>(x % sp) / static_cast<double>(sp));
          const double top = lattice(gy, gx) * (1 - tx) + lattice(gy, gx + 1) * tx;
          const double bot = lattice(gy + 1, gx) * (1 - tx) + lattice(gy + 1, gx + 1) * tx;
          acc[y * w + x] += kAmplitude[o] * (top * (1 - ty) + bot * ty);
        }
      }
    }
    auto plane = world.plane(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      plane[i] = static_cast<float>(std::clamp(acc[i], 0.0, 1.0));
    }
  }
  return world;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
  spec.canvas.validate();
  if (spec.num_frames == 0) throw ValueError("generate_scene: need at least one frame");
  if (spec.channels == 0) throw ValueError("generate_scene: need at least one channel");
  SyntheticScene scene{spec, value_noise_world(spec.seed, spec.channels, spec.world_h, spec.world_w), {}};
  const auto& t = spec.trajectory;
  if (t.kind == TrajectoryKind::ping_pong && t.leg == 0) {
    throw ValueError("generate_scene: ping-pong leg must be >= 1");
  }
  for (std::size_t i = 0; i < spec.num_frames; ++i) {
    double steps = 0.0;
    switch (t.kind) {
      case TrajectoryKind::fixed: steps = 0.0; break;
      case TrajectoryKind::pan: steps = static_cast<double>(i); break;
      case TrajectoryKind::ping_pong: {
        const std::size_t phase = i % (2 * t.leg);
        steps = static_cast<double>(phase <= t.leg ? phase : 2 * t.leg - phase);
        break;
      }
    }
    Origin o{t.start_x + steps * t.dx, t.start_y + steps * t.dy};
    const double ex = o.x - static_cast<double>(spec.canvas.offset_x);
    const double ey = o.y - static_cast<double>(spec.canvas.offset_y);
    if (!fits(ex, ey, spec.canvas.canvas_h, spec.canvas.canvas_w, scene.world)) {
      throw ValueError("generate_scene: expanded crop of frame " + std::to_string(i) +
                       " leaves the world");
    }
    scene.origins.push_back(o);
  }
  return scene;
}

ChannelGrid SyntheticScene::frame(std::size_t i) const {
  const Origin& o = origins.at(i);
  return crop(world, o.x, o.y, spec.canvas.orig_h, spec.canvas.orig_w);
}

ChannelGrid SyntheticScene::expanded_truth(std::size_t i) const {
  const Origin& o = origins.at(i);
  return crop(world, o.x - static_cast<double>(spec.canvas.offset_x),
              o.y - static_cast<double>(spec.canvas.offset_y), spec.canvas.canvas_h,
              spec.canvas.canvas_w);
}

std::vector<ChannelGrid> SyntheticScene::frames() const {
  std::vector<ChannelGrid> out;
  out.reserve(origins.size());
  for (std::size_t i = 0; i < origins.size(); ++i) out.push_back(frame(i));
  return out;
}

FlowField SyntheticScene::flow(std::size_t target, std::size_t reference) const {
  const Origin& a = origins.at(target);
  const Origin& b = origins.at(reference);
  return FlowField::constant(spec.canvas.orig_h, spec.canvas.orig_w, static_cast<float>(a.x - b.x),
                             static_cast<float>(a.y - b.y));
}

bool SyntheticScene::visible_in(std::size_t target, std::size_t y, std::size_t x,
                                std::size_t source, std::size_t s) const {
  const Origin& t = origins.at(target);
  const Origin& r = origins.at(source);
  // World position of the cell's top-left pixel, then relative to source's crop.
  const double wx = t.x - static_cast<double>(spec.canvas.offset_x) + static_cast<double>(x * s);
  const double wy = t.y - static_cast<double>(spec.canvas.offset_y) + static_cast<double>(y * s);
  const double rx = wx - r.x, ry = wy - r.y;
  return rx >= 0.0 && ry >= 0.0 && rx + static_cast<double>(s) <= static_cast<double>(spec.canvas.orig_w) &&
         ry + static_cast<double>(s) <= static_cast<double>(spec.canvas.orig_h);
}

}  // namespace s2s
