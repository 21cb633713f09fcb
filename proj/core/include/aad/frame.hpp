#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aad/errors.hpp"

namespace aad {

// Single grayscale frame. Values are real-valued luminance in [0, 255],
// row-major. Dimensions of 1x1 and up are representable; the optical flow
// entry points additionally require at least 8x8.
struct FrameBuffer {
  int width = 0;
  int height = 0;
  int index = 0;  // 0-based ordinal within its sequence
  std::vector<float> data;

  FrameBuffer() = default;
  FrameBuffer(int w, int h, float fill = 0.0f, int idx = 0)
      : width(w), height(h), index(idx),
        data(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Decodes a netpbm PGM image (binary P5 or ASCII P2). Comments are accepted
// wherever whitespace is. Samples are rescaled to [0, 255] by 255/maxval;
// maxval above 255 selects two-byte big-endian samples.
// Throws FormatError on malformed or truncated input.
FrameBuffer decode_pgm(std::span<const unsigned char> bytes);

// Encodes to binary P5 with maxval 255; values are clamped and rounded.
std::vector<unsigned char> encode_pgm(const FrameBuffer& frame);

FrameBuffer load_pgm(const std::filesystem::path& file);
void save_pgm(const FrameBuffer& frame, const std::filesystem::path& file);

// BT.601 luminance from equal-sized color planes.
// Throws ShapeError if plane sizes disagree with width*height.
FrameBuffer to_grayscale(int width, int height, std::span<const float> r,
                         std::span<const float> g, std::span<const float> b);

// An ordered image sequence on disk. Files are matched against a glob
// pattern, sorted in natural numeric order, and decoded lazily; indices run
// 0..size()-1. Construction validates the set: at least 3 frames, uniform
// dimensions.
class FrameSequence {
 public:
  int size() const { return static_cast<int>(files_.size()); }
  int width() const { return width_; }
  int height() const { return height_; }
  FrameBuffer load(int index) const;
  const std::filesystem::path& file(int index) const { return files_.at(index); }

 private:
  friend FrameSequence load_sequence(const std::filesystem::path&, const std::string&);
  std::vector<std::filesystem::path> files_;
  int width_ = 0;
  int height_ = 0;
};

// Throws IoError if the directory is missing, StateError if fewer than 3
// files match, ShapeError on mixed dimensions.
FrameSequence load_sequence(const std::filesystem::path& directory,
                            const std::string& pattern = "*.pgm");

// Natural-order comparison ("f2" before "f10"); used for sequence ordering.
bool natural_less(const std::string& a, const std::string& b);

// Shell-style glob match supporting '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& name);

}  // namespace aad
