#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "s2s/grid.hpp"

namespace s2s {

// S2SG layout (little-endian, no padding):
//   "S2SG" | version u16 | kind u8 | channels u32 | height u32 | width u32 | f32 payload
// Flow payload is the u plane, then v, then validity (channels = 3).
// Mask and validity planes hold exactly 0.0 or 1.0.

enum class GridKind : std::uint8_t { scalar = 0, channel = 1, flow = 2, mask = 3 };

inline constexpr std::uint16_t kGridFormatVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 19;

struct GridHeader {
  GridKind kind = GridKind::scalar;
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
};

using AnyGrid = std::variant<ScalarGrid, ChannelGrid, FlowField, BinaryMask>;

std::vector<std::uint8_t> encode_grid(const ScalarGrid& grid);
std::vector<std::uint8_t> encode_grid(const ChannelGrid& grid);
std::vector<std::uint8_t> encode_grid(const FlowField& flow);
std::vector<std::uint8_t> encode_grid(const BinaryMask& mask);

GridHeader decode_header(std::span<const std::uint8_t> bytes);
AnyGrid decode_grid(std::span<const std::uint8_t> bytes);

template <typename Grid>
void write_grid(const std::filesystem::path& path, const Grid& grid);

AnyGrid read_grid(const std::filesystem::path& path);

/// Typed readers; throw FormatError when the file holds a different kind.
ScalarGrid read_scalar_grid(const std::filesystem::path& path);
ChannelGrid read_channel_grid(const std::filesystem::path& path);
FlowField read_flow(const std::filesystem::path& path);
BinaryMask read_mask(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace s2s
