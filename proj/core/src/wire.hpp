#pragma once

// Internal little-endian byte (de)serialization used by the binary cache and
// snapshot formats. Byte-order explicit so round-trips are bit-exact on any
// host.

#include <bit>
#include <cstdint>
#include <vector>

namespace aad::wire {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xffu));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xffu));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xffu));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xffu));
}

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

inline void put_f32(std::vector<unsigned char>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline void put_f64(std::vector<unsigned char>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }
inline double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace aad::wire
