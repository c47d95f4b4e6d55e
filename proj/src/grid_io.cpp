#include "s2s/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "s2s/error.hpp"

namespace s2s {

namespace {

constexpr char kMagic[4] = {'S', '2', 'S', 'G'};
// 16 GiB of payload; anything larger is treated as a corrupt header.
constexpr std::uint64_t kMaxPayloadBytes = std::uint64_t{1} << 34;

class Writer {
 public:
  explicit Writer(std::size_t payload_values) {
    bytes_.reserve(kGridHeaderBytes + 4 * payload_values);
  }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void header(GridKind kind, std::size_t c, std::size_t h, std::size_t w) {
    for (char ch : kMagic) u8(static_cast<std::uint8_t>(ch));
    u16(kGridFormatVersion);
    u8(static_cast<std::uint8_t>(kind));
    u32(checked_u32(c));
    u32(checked_u32(h));
    u32(checked_u32(w));
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  static std::uint32_t checked_u32(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
      throw FormatError("S2SG: dimension " + std::to_string(v) + " exceeds u32");
    }
    return static_cast<std::uint32_t>(v);
  }
  std::vector<std::uint8_t> bytes_;
};

std::uint32_t load_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

float load_f32(const std::uint8_t* p) { return std::bit_cast<float>(load_u32(p)); }

void require_finite(std::span<const float> values, const char* what) {
  if (!all_finite(values)) throw ValueError(std::string("write_grid: non-finite value in ") + what);
}

std::vector<float> load_plane(const std::uint8_t* p, std::size_t n) {
  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = load_f32(p + 4 * i);
  return out;
}

std::vector<std::uint8_t> load_binary_plane(const std::uint8_t* p, std::size_t n,
                                            const char* what) {
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float v = load_f32(p + 4 * i);
    if (v == 0.0f) {
      out[i] = 0;
    } else if (v == 1.0f) {
      out[i] = 1;
    } else {
      throw FormatError(std::string("S2SG: ") + what + " plane holds a value other than 0 or 1");
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_grid(const ScalarGrid& grid) {
  require_finite(grid.data, "scalar grid");
  Writer w(grid.size());
  w.header(GridKind::scalar, 1, grid.height, grid.width);
  for (float v : grid.data) w.f32(v);
  return w.take();
}

std::vector<std::uint8_t> encode_grid(const ChannelGrid& grid) {
  require_finite(grid.data, "channel grid");
  Writer w(grid.data.size());
  w.header(GridKind::channel, grid.channels, grid.height, grid.width);
  for (float v : grid.data) w.f32(v);
  return w.take();
}

std::vector<std::uint8_t> encode_grid(const FlowField& flow) {
  require_finite(flow.u, "flow u plane");
  require_finite(flow.v, "flow v plane");
  Writer w(3 * flow.size());
  w.header(GridKind::flow, 3, flow.height, flow.width);
  for (float v : flow.u) w.f32(v);
  for (float v : flow.v) w.f32(v);
  for (auto v : flow.valid) w.f32(v ? 1.0f : 0.0f);
  return w.take();
}

std::vector<std::uint8_t> encode_grid(const BinaryMask& mask) {
  Writer w(mask.size());
  w.header(GridKind::mask, 1, mask.height, mask.width);
  for (auto v : mask.data) w.f32(v ? 1.0f : 0.0f);
  return w.take();
}

GridHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kGridHeaderBytes) throw FormatError("S2SG: file shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("S2SG: bad magic");
  const std::uint16_t version =
      static_cast<std::uint16_t>(bytes[4] | (static_cast<std::uint16_t>(bytes[5]) << 8));
  if (version != kGridFormatVersion) {
    throw FormatError("S2SG: unsupported version " + std::to_string(version));
  }
  const std::uint8_t kind = bytes[6];
  if (kind > 3) throw FormatError("S2SG: unknown kind " + std::to_string(kind));
  GridHeader h;
  h.kind = static_cast<GridKind>(kind);
  h.channels = load_u32(bytes.data() + 7);
  h.height = load_u32(bytes.data() + 11);
  h.width = load_u32(bytes.data() + 15);
  const std::uint32_t expected_channels =
      h.kind == GridKind::flow ? 3u : (h.kind == GridKind::channel ? h.channels : 1u);
  if (h.channels != expected_channels) {
    throw FormatError("S2SG: channel count " + std::to_string(h.channels) +
                      " invalid for kind " + std::to_string(kind));
  }
  return h;
}

AnyGrid decode_grid(std::span<const std::uint8_t> bytes) {
  const GridHeader h = decode_header(bytes);
  // Computed in 64 bits from 32-bit factors; three u32 factors can overflow,
  // so reject before multiplying the last one.
  const std::uint64_t plane = std::uint64_t{h.height} * std::uint64_t{h.width};
  if (h.channels != 0 && plane > kMaxPayloadBytes / 4 / h.channels) {
    throw FormatError("S2SG: declared dimensions overflow the payload limit");
  }
  const std::uint64_t values = plane * h.channels;
  const std::uint64_t payload = bytes.size() - kGridHeaderBytes;
  if (payload < 4 * values) throw FormatError("S2SG: truncated payload");
  if (payload > 4 * values) throw FormatError("S2SG: trailing bytes after payload");

  const std::uint8_t* p = bytes.data() + kGridHeaderBytes;
  const std::size_t n = static_cast<std::size_t>(plane);
  switch (h.kind) {
    case GridKind::scalar:
      return ScalarGrid(h.height, h.width, load_plane(p, n));
    case GridKind::channel:
      return ChannelGrid(h.channels, h.height, h.width, load_plane(p, n * h.channels));
    case GridKind::flow: {
      FlowField f;
      f.height = h.height;
      f.width = h.width;
      f.u = load_plane(p, n);
      f.v = load_plane(p + 4 * n, n);
      f.valid = load_binary_plane(p + 8 * n, n, "flow validity");
      return f;
    }
    case GridKind::mask:
      return BinaryMask(h.height, h.width, load_binary_plane(p, n, "mask"));
  }
  throw FormatError("S2SG: unreachable kind");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

template <typename Grid>
void write_grid(const std::filesystem::path& path, const Grid& grid) {
  write_file_bytes(path, encode_grid(grid));
}

template void write_grid(const std::filesystem::path&, const ScalarGrid&);
template void write_grid(const std::filesystem::path&, const ChannelGrid&);
template void write_grid(const std::filesystem::path&, const FlowField&);
template void write_grid(const std::filesystem::path&, const BinaryMask&);

AnyGrid read_grid(const std::filesystem::path& path) {
  try {
    return decode_grid(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

template <typename Grid>
Grid read_typed(const std::filesystem::path& path, const char* kind_name) {
  AnyGrid any = read_grid(path);
  if (auto* g = std::get_if<Grid>(&any)) return std::move(*g);
  throw FormatError(path.string() + ": expected a " + kind_name + " grid");
}

}  // namespace

ScalarGrid read_scalar_grid(const std::filesystem::path& path) {
  return read_typed<ScalarGrid>(path, "scalar");
}
ChannelGrid read_channel_grid(const std::filesystem::path& path) {
  return read_typed<ChannelGrid>(path, "channel");
}
FlowField read_flow(const std::filesystem::path& path) { return read_typed<FlowField>(path, "flow"); }
BinaryMask read_mask(const std::filesystem::path& path) { return read_typed<BinaryMask>(path, "mask"); }

}  // namespace s2s
