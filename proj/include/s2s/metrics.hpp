#pragma once

#include <limits>

#include "s2s/grid.hpp"

namespace s2s {

/// Returned by psnr for identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(peak^2 / MSE) over every element.
double psnr(const ChannelGrid& a, const ChannelGrid& b, double peak = 1.0);

/// PSNR restricted to cells with mask = 1 (all channels). Throws ValueError on
/// an empty mask.
double psnr_masked(const ChannelGrid& a, const ChannelGrid& b, const BinaryMask& mask,
                   double peak = 1.0);

/// Full three-term SSIM on 8x8 windows, averaged over channels.
double ssim_full(const ChannelGrid& a, const ChannelGrid& b, double dynamic_range = 1.0);

ScalarGrid channel_plane(const ChannelGrid& g, std::size_t c);

}  // namespace s2s
