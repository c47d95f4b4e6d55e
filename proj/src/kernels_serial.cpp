#include <cmath>
#include <string>

#include "s2s/error.hpp"
#include "s2s/kernels.hpp"

namespace s2s::serial {

namespace {

void require_same(std::size_t h0, std::size_t w0, std::size_t h1, std::size_t w1, const char* op) {
  if (h0 != h1 || w0 != w1) throw DimensionError(std::string(op) + ": dimension mismatch");
}

// Up to four bilinear corners; corners with zero weight are never read.
struct Sample {
  long cx[2], cy[2];
  double wx[2], wy[2];
};

bool make_sample(double sx, double sy, std::size_t h, std::size_t w, Sample& s) {
  if (!std::isfinite(sx) || !std::isfinite(sy)) return false;
  const double fx0 = std::floor(sx), fy0 = std::floor(sy);
  s.cx[0] = static_cast<long>(fx0);
  s.cx[1] = s.cx[0] + 1;
  s.cy[0] = static_cast<long>(fy0);
  s.cy[1] = s.cy[0] + 1;
  s.wx[1] = sx - fx0;
  s.wx[0] = 1.0 - s.wx[1];
  s.wy[1] = sy - fy0;
  s.wy[0] = 1.0 - s.wy[1];
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      if (s.wx[i] == 0.0 || s.wy[j] == 0.0) continue;
      if (s.cx[i] < 0 || s.cy[j] < 0 || s.cx[i] >= static_cast<long>(w) ||
          s.cy[j] >= static_cast<long>(h)) {
        return false;
      }
    }
  }
  return true;
}

template <typename Visit>
void for_used_corners(const Sample& s, std::size_t w, Visit visit) {
  for (int j = 0; j < 2; ++j) {
    if (s.wy[j] == 0.0) continue;
    for (int i = 0; i < 2; ++i) {
      if (s.wx[i] == 0.0) continue;
      visit(static_cast<std::size_t>(s.cy[j]) * w + static_cast<std::size_t>(s.cx[i]));
    }
  }
}

double interpolate(const float* plane, const Sample& s, std::size_t w) {
  // Same association order as a row-then-column lerp.
  double row[2] = {0.0, 0.0};
  for (int j = 0; j < 2; ++j) {
    if (s.wy[j] == 0.0) continue;
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      if (s.wx[i] == 0.0) continue;
      acc += s.wx[i] * plane[static_cast<std::size_t>(s.cy[j]) * w + static_cast<std::size_t>(s.cx[i])];
    }
    row[j] = acc;
  }
  return s.wy[0] * row[0] + s.wy[1] * row[1];
}

struct Moments {
  double mean_a, mean_b, var_a, var_b, cov;
};

Moments window_moments(const ScalarGrid& a, const ScalarGrid& b, std::size_t oy, std::size_t ox) {
  constexpr std::size_t k = kSsimWindow;
  constexpr double n = static_cast<double>(k * k);
  Moments m{0, 0, 0, 0, 0};
  for (std::size_t y = oy; y < oy + k; ++y) {
    for (std::size_t x = ox; x < ox + k; ++x) {
      m.mean_a += a.at(y, x);
      m.mean_b += b.at(y, x);
    }
  }
  m.mean_a /= n;
  m.mean_b /= n;
  for (std::size_t y = oy; y < oy + k; ++y) {
    for (std::size_t x = ox; x < ox + k; ++x) {
      const double da = a.at(y, x) - m.mean_a;
      const double db = b.at(y, x) - m.mean_b;
      m.var_a += da * da;
      m.var_b += db * db;
      m.cov += da * db;
    }
  }
  m.var_a /= n;
  m.var_b /= n;
  m.cov /= n;
  return m;
}

template <typename Score>
double mean_over_windows(const ScalarGrid& a, const ScalarGrid& b, Score score, const char* op) {
  require_same(a.height, a.width, b.height, b.width, op);
  if (a.height < kSsimWindow || a.width < kSsimWindow) {
    throw DimensionError(std::string(op) + ": grid smaller than the local window");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t oy = 0; oy + kSsimWindow <= a.height; ++oy) {
    for (std::size_t ox = 0; ox + kSsimWindow <= a.width; ++ox) {
      total += score(window_moments(a, b, oy, ox));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace

WarpResult backward_warp(const ChannelGrid& src, const FlowField& flow) {
  require_same(src.height, src.width, flow.height, flow.width, "serial::backward_warp");
  const std::size_t h = src.height, w = src.width;
  WarpResult out{ChannelGrid(src.channels, h, w, 0.0f), BinaryMask(h, w, 0)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      Sample s;
      if (!flow.valid[i]) continue;
      if (!make_sample(static_cast<double>(x) + flow.u[i], static_cast<double>(y) + flow.v[i], h,
                       w, s)) {
        continue;
      }
      out.valid.at(y, x) = 1;
      for (std::size_t c = 0; c < src.channels; ++c) {
        out.image.at(c, y, x) = static_cast<float>(interpolate(src.plane(c).data(), s, w));
      }
    }
  }
  return out;
}

FlowField warp_flow(const FlowField& f, const FlowField& through) {
  require_same(f.height, f.width, through.height, through.width, "serial::warp_flow");
  const std::size_t h = f.height, w = f.width;
  FlowField out = FlowField::invalid(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (!through.valid[i]) continue;
      Sample s;
      if (!make_sample(static_cast<double>(x) + through.u[i], static_cast<double>(y) + through.v[i],
                       h, w, s)) {
        continue;
      }
      bool ok = true;
      for_used_corners(s, w, [&](std::size_t j) { ok = ok && f.valid[j]; });
      if (!ok) continue;
      out.u[i] = static_cast<float>(interpolate(f.u.data(), s, w));
      out.v[i] = static_cast<float>(interpolate(f.v.data(), s, w));
      out.valid[i] = 1;
    }
  }
  return out;
}

double ssim_structure_score(const ScalarGrid& a, const ScalarGrid& b) {
  constexpr double c3 = detail::kSsimC2 / 2.0;
  return mean_over_windows(
      a, b, [](const Moments& m) { return (m.cov + c3) / (std::sqrt(m.var_a * m.var_b) + c3); },
      "serial::ssim_structure_score");
}

double ssim_full_score(const ScalarGrid& a, const ScalarGrid& b, double dynamic_range) {
  const double l2 = dynamic_range * dynamic_range;
  const double c1 = detail::kSsimC1 * l2, c2 = detail::kSsimC2 * l2, c3 = c2 / 2.0;
  return mean_over_windows(
      a, b,
      [=](const Moments& m) {
        const double sab = std::sqrt(m.var_a * m.var_b);
        return (2.0 * m.mean_a * m.mean_b + c1) / (m.mean_a * m.mean_a + m.mean_b * m.mean_b + c1) *
               (2.0 * sab + c2) / (m.var_a + m.var_b + c2) * (m.cov + c3) / (sab + c3);
      },
      "serial::ssim_full_score");
}

}  // namespace s2s::serial
