#pragma once

#include <cstddef>
#include <vector>

#include "aad/flow_field.hpp"

namespace aad {

// Block-level flow after both pooling stages: one cell per 4x4 pixel region
// (grid dims = frame dims / 4, trailing remainder dropped). Each cell keeps
// the representative displacement vector and its Euclidean magnitude.
struct BlockFlowGrid {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<float> vx;
  std::vector<float> vy;
  std::vector<float> magnitude;

  BlockFlowGrid() = default;
  BlockFlowGrid(int w, int h)
      : grid_w(w), grid_h(h),
        vx(static_cast<std::size_t>(w) * h, 0.0f),
        vy(static_cast<std::size_t>(w) * h, 0.0f),
        magnitude(static_cast<std::size_t>(w) * h, 0.0f) {}

  std::size_t cell_count() const { return static_cast<std::size_t>(grid_w) * grid_h; }
  std::size_t cell_index(int x, int y) const { return static_cast<std::size_t>(y) * grid_w + x; }
};

// Mean of each non-overlapping 2x2 block, vx and vy independently; odd
// trailing row/column dropped. Throws ShapeError if either dim < 2.
FlowField average_pool_2x2(const FlowField& flow);

// Per 2x2 block keeps the vector with the largest Euclidean magnitude (ties:
// first in row-major order). Throws ShapeError if either dim < 2.
BlockFlowGrid max_pool_2x2(const FlowField& flow);

// Both stages composed: average_pool then max_pool, one cell per 4x4 pixels.
BlockFlowGrid pool_flow(const FlowField& flow);

}  // namespace aad
