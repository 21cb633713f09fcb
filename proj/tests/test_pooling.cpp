#include <cmath>
#include <random>
#include <vector>

#include "aad/errors.hpp"
#include "aad/pooling.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace aad;

namespace {

FlowField field_from(int width, int height, const std::vector<float>& vx,
                     const std::vector<float>& vy) {
  FlowField flow(width, height);
  flow.vx = vx;
  flow.vy = vy;
  return flow;
}

}  // namespace

TEST_CASE("average_pool_2x2 takes the block mean per channel") {
  const FlowField flow = field_from(2, 2, {1, 2, 3, 4}, {8, 8, 8, 8});
  const FlowField pooled = average_pool_2x2(flow);
  REQUIRE(pooled.width == 1);
  REQUIRE(pooled.height == 1);
  CHECK(pooled.vx[0] == doctest::Approx(2.5));
  CHECK(pooled.vy[0] == doctest::Approx(8.0));
}

TEST_CASE("average_pool_2x2 preserves constant fields at half resolution") {
  FlowField flow(6, 4);
  for (float& v : flow.vx) v = 3.25f;
  for (float& v : flow.vy) v = -1.5f;
  const FlowField pooled = average_pool_2x2(flow);
  REQUIRE(pooled.width == 3);
  REQUIRE(pooled.height == 2);
  for (std::size_t i = 0; i < pooled.vx.size(); ++i) {
    CHECK(pooled.vx[i] == doctest::Approx(3.25));
    CHECK(pooled.vy[i] == doctest::Approx(-1.5));
  }
}

TEST_CASE("average_pool_2x2 drops trailing odd rows and columns") {
  const FlowField pooled = average_pool_2x2(test::random_flow(5, 5, 4));
  CHECK(pooled.width == 2);
  CHECK(pooled.height == 2);
}

TEST_CASE("pooling rejects inputs below 2x2") {
  CHECK_THROWS_AS(average_pool_2x2(FlowField(1, 4)), ShapeError);
  CHECK_THROWS_AS(max_pool_2x2(FlowField(4, 1)), ShapeError);
}

TEST_CASE("max_pool_2x2 keeps the vector with the largest magnitude") {
  // |(0,3)| = 3 beats |(2,2)| ~ 2.83, |(1,0)| = 1, |(0,0)| = 0.
  const FlowField flow = field_from(2, 2, {1, 0, 2, 0}, {0, 3, 2, 0});
  const BlockFlowGrid grid = max_pool_2x2(flow);
  REQUIRE(grid.grid_w == 1);
  REQUIRE(grid.grid_h == 1);
  CHECK(grid.vx[0] == doctest::Approx(0.0));
  CHECK(grid.vy[0] == doctest::Approx(3.0));
  CHECK(grid.magnitude[0] == doctest::Approx(3.0));
}

TEST_CASE("max_pool_2x2 maps an all-zero block to the zero vector") {
  const BlockFlowGrid grid = max_pool_2x2(FlowField(2, 2));
  CHECK(grid.vx[0] == 0.0f);
  CHECK(grid.vy[0] == 0.0f);
  CHECK(grid.magnitude[0] == 0.0f);
}

TEST_CASE("max_pool_2x2 breaks magnitude ties by row-major first occurrence") {
  const FlowField a = field_from(2, 2, {3, 0, 0, 0}, {0, 3, 0, 0});
  const BlockFlowGrid ga = max_pool_2x2(a);
  CHECK(ga.vx[0] == doctest::Approx(3.0));  // (3,0) read first
  CHECK(ga.vy[0] == doctest::Approx(0.0));

  const FlowField b = field_from(2, 2, {0, 3, 0, 0}, {3, 0, 0, 0});
  const BlockFlowGrid gb = max_pool_2x2(b);
  CHECK(gb.vx[0] == doctest::Approx(0.0));  // (0,3) read first this time
  CHECK(gb.vy[0] == doctest::Approx(3.0));
}

TEST_CASE("pool_flow output grid is frame dims over 4") {
  const BlockFlowGrid grid = pool_flow(test::random_flow(38, 26, 8));
  CHECK(grid.grid_w == 9);
  CHECK(grid.grid_h == 6);
}

TEST_CASE("max-pooled cells hold one of their source vectors exactly") {
  const FlowField flow = test::random_flow(16, 16, 12);
  const FlowField avg = average_pool_2x2(flow);
  const BlockFlowGrid grid = max_pool_2x2(avg);
  for (int cy = 0; cy < grid.grid_h; ++cy) {
    for (int cx = 0; cx < grid.grid_w; ++cx) {
      const std::size_t ci = grid.cell_index(cx, cy);
      bool found = false;
      float best = 0.0f;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const std::size_t si =
              static_cast<std::size_t>(cy * 2 + dy) * avg.width + (cx * 2 + dx);
          const float mag = std::hypot(avg.vx[si], avg.vy[si]);
          best = std::max(best, mag);
          if (avg.vx[si] == grid.vx[ci] && avg.vy[si] == grid.vy[ci]) found = true;
        }
      }
      CHECK(found);
      // The winning magnitude is exactly the max source magnitude.
      CHECK(std::hypot(grid.vx[ci], grid.vy[ci]) == doctest::Approx(best).epsilon(1e-6));
    }
  }
}

TEST_CASE("each pooled cell reads only its own 4x4 pixel footprint") {
  const FlowField flow = test::random_flow(16, 16, 30);
  const BlockFlowGrid before = pool_flow(flow);

  FlowField poked = flow;
  poked.vx[5 * 16 + 6] += 100.0f;  // inside cell (1,1)'s footprint (pixels 4..7)
  const BlockFlowGrid after = pool_flow(poked);

  for (int cy = 0; cy < before.grid_h; ++cy) {
    for (int cx = 0; cx < before.grid_w; ++cx) {
      const std::size_t ci = before.cell_index(cx, cy);
      if (cx == 1 && cy == 1) {
        CHECK(after.vx[ci] != before.vx[ci]);  // the poked cell must react
      } else {
        CHECK(after.vx[ci] == before.vx[ci]);
        CHECK(after.vy[ci] == before.vy[ci]);
      }
    }
  }
}

TEST_CASE("pooling is equivariant under positive scaling") {
  const FlowField flow = test::random_flow(24, 16, 44);
  const float c = 2.5f;
  FlowField scaled = flow;
  for (float& v : scaled.vx) v *= c;
  for (float& v : scaled.vy) v *= c;

  const BlockFlowGrid base = pool_flow(flow);
  const BlockFlowGrid big = pool_flow(scaled);
  for (std::size_t i = 0; i < base.vx.size(); ++i) {
    CHECK(big.vx[i] == doctest::Approx(base.vx[i] * c).epsilon(1e-5));
    CHECK(big.vy[i] == doctest::Approx(base.vy[i] * c).epsilon(1e-5));
    CHECK(big.magnitude[i] == doctest::Approx(base.magnitude[i] * c).epsilon(1e-5));
  }
}

TEST_CASE("stored magnitude equals the vector norm at every cell") {
  const BlockFlowGrid grid = pool_flow(test::random_flow(32, 32, 3));
  for (std::size_t i = 0; i < grid.vx.size(); ++i)
    CHECK(grid.magnitude[i] == doctest::Approx(std::hypot(grid.vx[i], grid.vy[i])).epsilon(1e-6));
}
