#include "s2s/metrics.hpp"

#include <cmath>

#include "s2s/error.hpp"
#include "s2s/kernels.hpp"

namespace s2s {

namespace {

double psnr_from_mse(double mse, double peak) {
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(peak * peak / mse);
}

void require_match(const ChannelGrid& a, const ChannelGrid& b, const char* op) {
  if (!a.same_shape(b)) throw DimensionError(std::string(op) + ": grid shapes differ");
}

}  // namespace

double psnr(const ChannelGrid& a, const ChannelGrid& b, double peak) {
  require_match(a, b, "psnr");
  if (!(peak > 0.0)) throw ValueError("psnr: peak must be > 0");
  if (a.data.empty()) throw ValueError("psnr: empty grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    sum += d * d;
  }
  return psnr_from_mse(sum / static_cast<double>(a.data.size()), peak);
}

double psnr_masked(const ChannelGrid& a, const ChannelGrid& b, const BinaryMask& mask, double peak) {
  require_match(a, b, "psnr_masked");
  if (mask.height != a.height || mask.width != a.width) {
    throw DimensionError("psnr_masked: mask does not match grid");
  }
  if (!(peak > 0.0)) throw ValueError("psnr_masked: peak must be > 0");
  const std::size_t plane = a.plane_size();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < a.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      if (!mask.data[i]) continue;
      const double d = static_cast<double>(a.data[c * plane + i]) - b.data[c * plane + i];
      sum += d * d;
      ++n;
    }
  }
  if (n == 0) throw ValueError("psnr_masked: mask selects no cells");
  return psnr_from_mse(sum / static_cast<double>(n), peak);
}

ScalarGrid channel_plane(const ChannelGrid& g, std::size_t c) {
  auto p = g.plane(c);
  return ScalarGrid(g.height, g.width, std::vector<float>(p.begin(), p.end()));
}

double ssim_full(const ChannelGrid& a, const ChannelGrid& b, double dynamic_range) {
  require_match(a, b, "ssim_full");
  if (a.channels == 0) throw ValueError("ssim_full: no channels");
  double total = 0.0;
  for (std::size_t c = 0; c < a.channels; ++c) {
    total += ssim_full_score(channel_plane(a, c), channel_plane(b, c), dynamic_range);
  }
  return total / static_cast<double>(a.channels);
}

}  // namespace s2s
