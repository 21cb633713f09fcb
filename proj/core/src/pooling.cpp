#include "aad/pooling.hpp"

#include <cmath>
#include <string>

#include "aad/errors.hpp"

namespace aad {
namespace {

void require_poolable(const FlowField& flow) {
  if (flow.width < 2 || flow.height < 2)
    throw ShapeError("cannot 2x2-pool a " + std::to_string(flow.width) + "x" +
                     std::to_string(flow.height) + " field");
}

}  // namespace

FlowField average_pool_2x2(const FlowField& flow) {
  require_poolable(flow);
  FlowField out(flow.width / 2, flow.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const int sx = 2 * x, sy = 2 * y;
      out.vx_at(x, y) = (flow.vx_at(sx, sy) + flow.vx_at(sx + 1, sy) + flow.vx_at(sx, sy + 1) +
                         flow.vx_at(sx + 1, sy + 1)) /
                        4.0f;
      out.vy_at(x, y) = (flow.vy_at(sx, sy) + flow.vy_at(sx + 1, sy) + flow.vy_at(sx, sy + 1) +
                         flow.vy_at(sx + 1, sy + 1)) /
                        4.0f;
    }
  }
  return out;
}

BlockFlowGrid max_pool_2x2(const FlowField& flow) {
  require_poolable(flow);
  BlockFlowGrid out(flow.width / 2, flow.height / 2);
  for (int y = 0; y < out.grid_h; ++y) {
    for (int x = 0; x < out.grid_w; ++x) {
      float best_vx = 0.0f, best_vy = 0.0f;
      double best_mag = -1.0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const float cx = flow.vx_at(2 * x + dx, 2 * y + dy);
          const float cy = flow.vy_at(2 * x + dx, 2 * y + dy);
          const double mag = std::sqrt(static_cast<double>(cx) * cx +
                                       static_cast<double>(cy) * cy);
          if (mag > best_mag) {  // strict: row-major first occurrence wins ties
            best_mag = mag;
            best_vx = cx;
            best_vy = cy;
          }
        }
      }
      const std::size_t idx = out.cell_index(x, y);
      out.vx[idx] = best_vx;
      out.vy[idx] = best_vy;
      out.magnitude[idx] = static_cast<float>(best_mag);
    }
  }
  return out;
}

BlockFlowGrid pool_flow(const FlowField& flow) { return max_pool_2x2(average_pool_2x2(flow)); }

}  // namespace aad
