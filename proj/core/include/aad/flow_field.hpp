#pragma once

#include <cstddef>
#include <vector>

namespace aad {

// Dense per-pixel displacement between two frames, in pixels per frame pair.
// vx/vy are row-major planes of width*height floats; values must stay finite.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> vx;
  std::vector<float> vy;

  FlowField() = default;
  FlowField(int w, int h)
      : width(w), height(h),
        vx(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0f),
        vy(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0f) {}

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  float& vx_at(int x, int y) { return vx[static_cast<std::size_t>(y) * width + x]; }
  float& vy_at(int x, int y) { return vy[static_cast<std::size_t>(y) * width + x]; }
  float vx_at(int x, int y) const { return vx[static_cast<std::size_t>(y) * width + x]; }
  float vy_at(int x, int y) const { return vy[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const FlowField&) const = default;
};

}  // namespace aad
