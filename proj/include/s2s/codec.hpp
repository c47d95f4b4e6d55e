#pragma once

#include <cstddef>

#include "s2s/grid.hpp"

namespace s2s {

// Spatially aligned stand-in for a latent autoencoder: s x s block mean per
// channel down, nearest-neighbour up. decode(encode(x)) == x for images that
// are constant on every s x s block.

ChannelGrid stand_in_encode(const ChannelGrid& frame, std::size_t s);
ChannelGrid stand_in_decode(const ChannelGrid& latent, std::size_t s);

}  // namespace s2s
