#include "s2s/codec.hpp"

#include <string>

#include "s2s/error.hpp"

namespace s2s {

ChannelGrid stand_in_encode(const ChannelGrid& frame, std::size_t s) {
  if (s == 0) throw ValueError("stand_in_encode: factor must be >= 1");
  if (frame.height % s || frame.width % s) {
    throw DimensionError("stand_in_encode: factor " + std::to_string(s) + " does not divide " +
                         std::to_string(frame.height) + "x" + std::to_string(frame.width));
  }
  const std::size_t oh = frame.height / s, ow = frame.width / s;
  ChannelGrid out(frame.channels, oh, ow);
  const double n = static_cast<double>(s * s);
  for (std::size_t c = 0; c < frame.channels; ++c) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double sum = 0.0;
        for (std::size_t dy = 0; dy < s; ++dy) {
          for (std::size_t dx = 0; dx < s; ++dx) sum += frame.at(c, y * s + dy, x * s + dx);
        }
        out.at(c, y, x) = static_cast<float>(sum / n);
      }
    }
  }
  return out;
}

ChannelGrid stand_in_decode(const ChannelGrid& latent, std::size_t s) {
  if (s == 0) throw ValueError("stand_in_decode: factor must be >= 1");
  ChannelGrid out(latent.channels, latent.height * s, latent.width * s);
  for (std::size_t c = 0; c < latent.channels; ++c) {
    for (std::size_t y = 0; y < out.height; ++y) {
      for (std::size_t x = 0; x < out.width; ++x) out.at(c, y, x) = latent.at(c, y / s, x / s);
    }
  }
  return out;
}

}  // namespace s2s
