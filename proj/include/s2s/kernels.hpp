#pragma once

#include <cmath>
#include <cstddef>

#include "s2s/grid.hpp"

namespace s2s {

struct WarpResult {
  ChannelGrid image;
  BinaryMask valid;
};

/// out(p) = src(p + flow(p)), bilinear. A cell is valid only when the flow is
/// valid there and every interpolation corner with nonzero weight lies inside
/// src. Invalid cells hold 0.
WarpResult backward_warp(const ChannelGrid& src, const FlowField& flow);

/// result(p) = f(p + through(p)) on both planes. Valid where `through` is
/// valid, all corners are in bounds, and f is valid at every used corner.
FlowField warp_flow(const FlowField& f, const FlowField& through);

inline constexpr std::size_t kSsimWindow = 8;

/// Mean over all 8x8 stride-1 windows of (cov + C3) / (sd_a * sd_b + C3),
/// with C3 = (0.03 L)^2 / 2, L = 1 and population (1/n) moments.
double ssim_structure_score(const ScalarGrid& a, const ScalarGrid& b);

/// Mean over the same windows of luminance * contrast * structure with
/// C1 = (0.01 L)^2, C2 = (0.03 L)^2, C3 = C2 / 2.
double ssim_full_score(const ScalarGrid& a, const ScalarGrid& b, double dynamic_range = 1.0);

/// Single-threaded direct implementations of the kernels above. They share
/// no code with the parallel versions and exist so tests and the kernel
/// benchmark can check them against each other.
namespace serial {

WarpResult backward_warp(const ChannelGrid& src, const FlowField& flow);
FlowField warp_flow(const FlowField& f, const FlowField& through);
double ssim_structure_score(const ScalarGrid& a, const ScalarGrid& b);
double ssim_full_score(const ScalarGrid& a, const ScalarGrid& b, double dynamic_range = 1.0);

}  // namespace serial

namespace detail {

struct BilinearTaps {
  std::size_t i00, i01, i10, i11;
  double fx, fy;
};

// Corners with zero weight collapse onto the lower corner, so an exact
// integer sample on the last row/column stays in bounds.
inline bool bilinear_taps(double sx, double sy, std::size_t h, std::size_t w, BilinearTaps& t) {
  if (!std::isfinite(sx) || !std::isfinite(sy)) return false;
  const double x0f = std::floor(sx);
  const double y0f = std::floor(sy);
  if (x0f < 0.0 || y0f < 0.0) return false;
  if (x0f > static_cast<double>(w - 1) || y0f > static_cast<double>(h - 1)) return false;
  const auto x0 = static_cast<std::size_t>(x0f);
  const auto y0 = static_cast<std::size_t>(y0f);
  t.fx = sx - x0f;
  t.fy = sy - y0f;
  const std::size_t x1 = t.fx > 0.0 ? x0 + 1 : x0;
  const std::size_t y1 = t.fy > 0.0 ? y0 + 1 : y0;
  if (x1 >= w || y1 >= h) return false;
  t.i00 = y0 * w + x0;
  t.i01 = y0 * w + x1;
  t.i10 = y1 * w + x0;
  t.i11 = y1 * w + x1;
  return true;
}

inline double bilinear(const float* plane, const BilinearTaps& t) {
  const double top = (1.0 - t.fx) * plane[t.i00] + t.fx * plane[t.i01];
  const double bottom = (1.0 - t.fx) * plane[t.i10] + t.fx * plane[t.i11];
  return (1.0 - t.fy) * top + t.fy * bottom;
}

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

}  // namespace detail

}  // namespace s2s
