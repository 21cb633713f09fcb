#include "aad/flow_cache.hpp"

#include <cstring>
#include <fstream>

#include "aad/errors.hpp"
#include "wire.hpp"

namespace aad {

std::size_t write_flow_cache(const FlowField& flow, const FlowCacheHeader& header,
                             std::vector<unsigned char>& sink) {
  if (static_cast<int>(header.width) != flow.width ||
      static_cast<int>(header.height) != flow.height) {
    throw ShapeError("flow cache header " + std::to_string(header.width) + "x" +
                     std::to_string(header.height) + " does not match flow " +
                     std::to_string(flow.width) + "x" + std::to_string(flow.height));
  }
  const std::size_t start = sink.size();
  sink.insert(sink.end(), kFlowCacheMagic, kFlowCacheMagic + 4);
  wire::put_u32(sink, header.version);
  wire::put_u32(sink, header.width);
  wire::put_u32(sink, header.height);
  wire::put_u32(sink, header.src_frame);
  wire::put_u32(sink, header.dst_frame);
  wire::put_u32(sink, header.planes);
  sink.reserve(sink.size() + 8 * flow.pixel_count());
  for (float v : flow.vx) wire::put_f32(sink, v);
  for (float v : flow.vy) wire::put_f32(sink, v);
  return sink.size() - start;
}

std::pair<FlowCacheHeader, FlowField> read_flow_cache(std::span<const unsigned char> bytes) {
  if (bytes.size() < kFlowCacheHeaderBytes) throw FormatError("flow cache truncated before header");
  if (std::memcmp(bytes.data(), kFlowCacheMagic, 4) != 0)
    throw FormatError("flow cache magic mismatch (want AADF)");
  FlowCacheHeader header;
  header.version = wire::get_u32(bytes.data() + 4);
  header.width = wire::get_u32(bytes.data() + 8);
  header.height = wire::get_u32(bytes.data() + 12);
  header.src_frame = wire::get_u32(bytes.data() + 16);
  header.dst_frame = wire::get_u32(bytes.data() + 20);
  header.planes = wire::get_u32(bytes.data() + 24);
  if (header.version != 1)
    throw FormatError("flow cache version " + std::to_string(header.version) + " unsupported");
  if (header.planes != 2)
    throw FormatError("flow cache declares " + std::to_string(header.planes) +
                      " planes, want 2 (Vx, Vy)");
  const std::uint64_t pixels = static_cast<std::uint64_t>(header.width) * header.height;
  const std::uint64_t want = kFlowCacheHeaderBytes + 8 * pixels;
  if (bytes.size() != want) {
    throw FormatError("flow cache payload is " + std::to_string(bytes.size()) + " bytes, want " +
                      std::to_string(want));
  }
  FlowField flow(static_cast<int>(header.width), static_cast<int>(header.height));
  const unsigned char* p = bytes.data() + kFlowCacheHeaderBytes;
  for (std::uint64_t i = 0; i < pixels; ++i, p += 4) flow.vx[i] = wire::get_f32(p);
  for (std::uint64_t i = 0; i < pixels; ++i, p += 4) flow.vy[i] = wire::get_f32(p);
  return {header, std::move(flow)};
}

void save_flow_cache(const std::filesystem::path& path, const FlowField& flow,
                     const FlowCacheHeader& header) {
  std::vector<unsigned char> bytes;
  write_flow_cache(flow, header, bytes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::pair<FlowCacheHeader, FlowField> load_flow_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return read_flow_cache(bytes);
}

}  // namespace aad
