#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "aad/flow_field.hpp"

namespace aad {

// On-disk flow record: 4-byte ASCII magic "AADF", then version, width,
// height, source frame index, target frame index, and plane count (always 2)
// as 32-bit little-endian unsigned integers — seven 4-byte fields, 28 bytes —
// followed by the Vx plane and then the Vy plane as row-major little-endian
// 32-bit floats.
struct FlowCacheHeader {
  std::uint32_t version = 1;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t src_frame = 0;  // earlier frame of the pair
  std::uint32_t dst_frame = 0;  // later frame of the pair
  std::uint32_t planes = 2;     // Vx and Vy

  bool operator==(const FlowCacheHeader&) const = default;
};

inline constexpr char kFlowCacheMagic[4] = {'A', 'A', 'D', 'F'};
inline constexpr std::size_t kFlowCacheHeaderBytes = 28;

// Appends the serialized record to `sink` and returns the byte count written.
// Throws ShapeError if the header dimensions disagree with the flow planes.
std::size_t write_flow_cache(const FlowField& flow, const FlowCacheHeader& header,
                             std::vector<unsigned char>& sink);

// Parses a complete record. Throws FormatError on bad magic/version, a
// truncated payload, or trailing bytes. Round-trips written records
// bit-exactly.
std::pair<FlowCacheHeader, FlowField> read_flow_cache(std::span<const unsigned char> bytes);

// File-backed variants of the above. load_flow_cache throws IoError if the
// file cannot be read.
void save_flow_cache(const std::filesystem::path& path, const FlowField& flow,
                     const FlowCacheHeader& header);
std::pair<FlowCacheHeader, FlowField> load_flow_cache(const std::filesystem::path& path);

}  // namespace aad
