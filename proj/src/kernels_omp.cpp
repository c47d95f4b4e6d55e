#include <omp.h>

#include <array>
#include <string>
#include <vector>

#include "s2s/error.hpp"
#include "s2s/kernels.hpp"

namespace s2s {

namespace {

using detail::BilinearTaps;

void require_same(std::size_t h0, std::size_t w0, std::size_t h1, std::size_t w1, const char* op) {
  if (h0 != h1 || w0 != w1) {
    throw DimensionError(std::string(op) + ": " + std::to_string(h0) + "x" + std::to_string(w0) +
                         " vs " + std::to_string(h1) + "x" + std::to_string(w1));
  }
}

struct WindowMoments {
  double mean_a, mean_b, var_a, var_b, cov;
};

// Evaluates `score` on every kSsimWindow x kSsimWindow window and returns the
// mean. Rows are reduced in index order so the result does not depend on the
// thread count.
template <typename Score>
double mean_window_score(const ScalarGrid& a, const ScalarGrid& b, Score score, const char* op) {
  require_same(a.height, a.width, b.height, b.width, op);
  constexpr std::size_t k = kSsimWindow;
  if (a.height < k || a.width < k) {
    throw DimensionError(std::string(op) + ": grid smaller than the " + std::to_string(k) + "x" +
                         std::to_string(k) + " local window");
  }
  const std::size_t rows = a.height - k + 1;
  const std::size_t cols = a.width - k + 1;
  const std::size_t w = a.width;
  constexpr double n = static_cast<double>(k * k);
  std::vector<double> row_sums(rows, 0.0);

#pragma omp parallel
  {
    std::vector<std::array<double, 5>> col(w);
#pragma omp for schedule(static)
    for (std::ptrdiff_t oy_s = 0; oy_s < static_cast<std::ptrdiff_t>(rows); ++oy_s) {
      const auto oy = static_cast<std::size_t>(oy_s);
      for (std::size_t x = 0; x < w; ++x) {
        std::array<double, 5> s{};
        for (std::size_t dy = 0; dy < k; ++dy) {
          const double va = a.data[(oy + dy) * w + x];
          const double vb = b.data[(oy + dy) * w + x];
          s[0] += va;
          s[1] += vb;
          s[2] += va * va;
          s[3] += vb * vb;
          s[4] += va * vb;
        }
        col[x] = s;
      }
      double row_total = 0.0;
      for (std::size_t ox = 0; ox < cols; ++ox) {
        std::array<double, 5> s{};
        for (std::size_t dx = 0; dx < k; ++dx) {
          for (std::size_t q = 0; q < 5; ++q) s[q] += col[ox + dx][q];
        }
        WindowMoments m;
        m.mean_a = s[0] / n;
        m.mean_b = s[1] / n;
        m.var_a = std::max(0.0, s[2] / n - m.mean_a * m.mean_a);
        m.var_b = std::max(0.0, s[3] / n - m.mean_b * m.mean_b);
        m.cov = s[4] / n - m.mean_a * m.mean_b;
        row_total += score(m);
      }
      row_sums[oy] = row_total;
    }
  }
  double total = 0.0;
  for (double r : row_sums) total += r;
  return total / static_cast<double>(rows * cols);
}

}  // namespace

WarpResult backward_warp(const ChannelGrid& src, const FlowField& flow) {
  require_same(src.height, src.width, flow.height, flow.width, "backward_warp");
  const std::size_t h = src.height, w = src.width, plane = h * w;
  WarpResult out{ChannelGrid(src.channels, h, w, 0.0f), BinaryMask(h, w, 0)};

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t y_s = 0; y_s < static_cast<std::ptrdiff_t>(h); ++y_s) {
    const auto y = static_cast<std::size_t>(y_s);
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (!flow.valid[i]) continue;
      BilinearTaps t;
      const double sx = static_cast<double>(x) + flow.u[i];
      const double sy = static_cast<double>(y) + flow.v[i];
      if (!detail::bilinear_taps(sx, sy, h, w, t)) continue;
      out.valid.data[i] = 1;
      for (std::size_t c = 0; c < src.channels; ++c) {
        out.image.data[c * plane + i] =
            static_cast<float>(detail::bilinear(src.data.data() + c * plane, t));
      }
    }
  }
  return out;
}

FlowField warp_flow(const FlowField& f, const FlowField& through) {
  require_same(f.height, f.width, through.height, through.width, "warp_flow");
  const std::size_t h = f.height, w = f.width;
  FlowField out = FlowField::invalid(h, w);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t y_s = 0; y_s < static_cast<std::ptrdiff_t>(h); ++y_s) {
    const auto y = static_cast<std::size_t>(y_s);
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (!through.valid[i]) continue;
      BilinearTaps t;
      const double sx = static_cast<double>(x) + through.u[i];
      const double sy = static_cast<double>(y) + through.v[i];
      if (!detail::bilinear_taps(sx, sy, h, w, t)) continue;
      if (!(f.valid[t.i00] && f.valid[t.i01] && f.valid[t.i10] && f.valid[t.i11])) continue;
      out.u[i] = static_cast<float>(detail::bilinear(f.u.data(), t));
      out.v[i] = static_cast<float>(detail::bilinear(f.v.data(), t));
      out.valid[i] = 1;
    }
  }
  return out;
}

double ssim_structure_score(const ScalarGrid& a, const ScalarGrid& b) {
  constexpr double c3 = detail::kSsimC2 / 2.0;
  return mean_window_score(
      a, b,
      [](const WindowMoments& m) {
        return (m.cov + c3) / (std::sqrt(m.var_a) * std::sqrt(m.var_b) + c3);
      },
      "ssim_structure_score");
}

double ssim_full_score(const ScalarGrid& a, const ScalarGrid& b, double dynamic_range) {
  if (!(dynamic_range > 0.0)) throw ValueError("ssim_full_score: dynamic range must be > 0");
  const double l2 = dynamic_range * dynamic_range;
  const double c1 = detail::kSsimC1 * l2;
  const double c2 = detail::kSsimC2 * l2;
  const double c3 = c2 / 2.0;
  return mean_window_score(
      a, b,
      [=](const WindowMoments& m) {
        const double sa = std::sqrt(m.var_a), sb = std::sqrt(m.var_b);
        const double lum = (2.0 * m.mean_a * m.mean_b + c1) /
                           (m.mean_a * m.mean_a + m.mean_b * m.mean_b + c1);
        const double con = (2.0 * sa * sb + c2) / (m.var_a + m.var_b + c2);
        const double str = (m.cov + c3) / (sa * sb + c3);
        return lum * con * str;
      },
      "ssim_full_score");
}

}  // namespace s2s
