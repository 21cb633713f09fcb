#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "aad/errors.hpp"
#include "aad/motion_stats.hpp"
#include "aad/pooling.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace aad;

namespace {

// Independent oracle: textbook two-pass mean and variance (denominator N-1).
std::pair<double, double> two_pass(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
  return {mean, var};
}

CellStats stream(const std::vector<double>& xs) {
  CellStats s;
  for (double x : xs) s = update_cell(s, x);
  return s;
}

BlockFlowGrid single_cell_blocks(int grid_w, int grid_h, int cx, int cy, float vx, float vy) {
  BlockFlowGrid blocks(grid_w, grid_h);
  const std::size_t i = blocks.cell_index(cx, cy);
  blocks.vx[i] = vx;
  blocks.vy[i] = vy;
  blocks.magnitude[i] = std::hypot(vx, vy);
  return blocks;
}

}  // namespace

TEST_CASE("update_cell seeds all fields from the first sample") {
  const CellStats s = update_cell(CellStats{}, 5.0);
  CHECK(s.mean == 5.0);
  CHECK(s.max == 5.0);
  CHECK(s.min == 5.0);
  CHECK(s.variance == 0.0);
  CHECK(s.count == 1.0);
}

TEST_CASE("update_cell matches the hand-derived small sequences") {
  const CellStats ab = stream({2.0, 4.0});
  CHECK(ab.mean == 2.0 + 1.0);  // exactly 3
  CHECK(ab.variance == 2.0);    // (1 + 1) / 1
  CHECK(ab.min == 2.0);
  CHECK(ab.max == 4.0);
  CHECK(ab.count == 2.0);

  const CellStats abc = stream({1.0, 2.0, 3.0});
  CHECK(abc.mean == 2.0);
  CHECK(abc.variance == 1.0);
}

TEST_CASE("update_cell rejects non-finite samples") {
  CHECK_THROWS_AS(update_cell(CellStats{}, std::numeric_limits<double>::quiet_NaN()),
                  InputError);
  CHECK_THROWS_AS(update_cell(CellStats{}, std::numeric_limits<double>::infinity()),
                  InputError);
}

TEST_CASE("adapt_on_anomaly halves the history weight") {
  CellStats s;
  s.mean = 3.0;
  s.max = 4.0;
  s.min = 2.0;
  s.variance = 0.5;
  s.count = 5.0;

  const CellStats a = adapt_on_anomaly(s, 7.0);
  CHECK(a.mean == 13.0 / 3.0);  // (3*2 + 7) / 3, exact in doubles
  CHECK(a.count == 3.0);        // (5-1)/2 + 1
  CHECK(a.variance == 0.5);     // carried through unchanged
  CHECK(a.max == 7.0);
  CHECK(a.min == 2.0);
}

TEST_CASE("adapt_on_anomaly with a single-sample history forgets it") {
  CellStats s;
  s.mean = 42.0;
  s.max = 42.0;
  s.min = 42.0;
  s.count = 1.0;
  const CellStats a = adapt_on_anomaly(s, 9.0);
  CHECK(a.mean == 9.0);  // (N-1)/2 = 0 leaves no history weight
  CHECK(a.count == 1.0);
}

TEST_CASE("adapt_on_anomaly damps large histories as 10/51") {
  CellStats s;
  s.mean = 0.0;
  s.count = 101.0;
  const CellStats a = adapt_on_anomaly(s, 10.0);
  CHECK(a.mean == 10.0 / 51.0);  // (0*50 + 10) / 51, exact
  CHECK(a.count == 51.0);
}

TEST_CASE("adapt_on_anomaly requires history") {
  CHECK_THROWS_AS(adapt_on_anomaly(CellStats{}, 1.0), StateError);
  CellStats s;
  s.count = 3.0;
  CHECK_THROWS_AS(adapt_on_anomaly(s, std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("adapt_on_anomaly with full weight reduces to update_cell") {
  // Substituting weight N for (N-1)/2 in the adaptation formula gives the
  // plain running mean; both sides must agree bit-for-bit.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    CellStats s;
    s.mean = u(rng);
    s.count = 1.0 + static_cast<double>(rng() % 400);
    s.min = s.mean;
    s.max = s.mean;
    const double x = u(rng);
    const double full_weight_mean = (s.mean * s.count + x) / (s.count + 1.0);
    CHECK(update_cell(s, x).mean == full_weight_mean);
  }
}

TEST_CASE("zscore normalizes by sigma with a floor") {
  CellStats s;
  s.mean = 4.0;
  s.variance = 9.0;
  s.count = 10.0;
  CHECK(zscore(s, 4.0, 0.01) == 0.0);

  s.mean = 0.0;
  s.variance = 4.0;
  CHECK(zscore(s, 6.0, 0.01) == 3.0);

  s.variance = 0.0;
  CHECK(zscore(s, 1.0, 0.5) == 2.0);  // floor engages: 1 / 0.5

  s.count = 1.0;
  CHECK_THROWS_AS(zscore(s, 1.0, 0.01), StateError);
}

TEST_CASE("streaming variance matches the two-pass oracle across scales") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 500);
    const double scale = std::pow(10.0, -3.0 + 9.0 * (rng() % 1000) / 999.0);  // 1e-3..1e6
    std::uniform_real_distribution<double> u(0.5, 1.5);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (double& x : xs) x = scale * u(rng);

    const CellStats s = stream(xs);
    const auto [mean, var] = two_pass(xs);
    CHECK(s.count == static_cast<double>(n));
    CHECK(std::abs(s.mean - mean) <= 1e-9 * std::abs(mean));
    CHECK(std::abs(s.variance - var) <= 1e-9 * std::max(var, 1e-300));
    CHECK(s.min == *std::min_element(xs.begin(), xs.end()));
    CHECK(s.max == *std::max_element(xs.begin(), xs.end()));
  }
}

TEST_CASE("update_cell statistics are permutation invariant") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> xs(60);
  for (double& x : xs) x = u(rng);
  const CellStats base = stream(xs);

  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(xs.begin(), xs.end(), rng);
    const CellStats s = stream(xs);
    CHECK(s.count == base.count);
    CHECK(s.min == base.min);
    CHECK(s.max == base.max);
    CHECK(std::abs(s.mean - base.mean) <= 1e-9 * (1.0 + std::abs(base.mean)));
    CHECK(std::abs(s.variance - base.variance) <= 1e-9 * (1.0 + base.variance));
  }
}

TEST_CASE("min <= mean <= max survives any interleaving of both updates") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  CellStats s = update_cell(CellStats{}, u(rng));
  for (int step = 0; step < 500; ++step) {
    const double x = u(rng);
    s = (rng() % 4 == 0) ? adapt_on_anomaly(s, x) : update_cell(s, x);
    CHECK(s.min <= s.mean);
    CHECK(s.mean <= s.max);
    CHECK(s.count >= 1.0);
    CHECK(s.variance >= 0.0);
  }
}

TEST_CASE("adaptation reaches a regime change faster than plain updates") {
  // Same history, same incoming constant stream of the new value; the
  // adapted branch must need strictly fewer steps to get close to it.
  for (double n : {3.0, 11.0, 41.0, 101.0}) {
    CellStats plain;
    plain.mean = 10.0;
    plain.min = 9.0;
    plain.max = 11.0;
    plain.variance = 0.25;
    plain.count = n;
    CellStats adapted = adapt_on_anomaly(plain, 0.0);

    const double eps = 0.5;
    int plain_steps = 0, adapted_steps = 0;
    CellStats s = plain;
    while (std::abs(s.mean) >= eps && plain_steps < 10000) {
      s = update_cell(s, 0.0);
      ++plain_steps;
    }
    s = adapted;
    while (std::abs(s.mean) >= eps && adapted_steps < 10000) {
      s = update_cell(s, 0.0);
      ++adapted_steps;
    }
    CAPTURE(n);
    CHECK(adapted_steps < plain_steps);
  }
}

TEST_CASE("update_grid leaves still cells untouched") {
  StatsGrid grid(3, 2);
  const BlockFlowGrid blocks(3, 2);  // all zero magnitude
  update_grid(grid, blocks, nullptr, 0.1);
  CHECK(grid.frames_seen == 1);
  for (int ch = 0; ch < kStatsChannels; ++ch)
    for (int cy = 0; cy < 2; ++cy)
      for (int cx = 0; cx < 3; ++cx)
        CHECK(grid.at(cx, cy, static_cast<StatsChannel>(ch)).count == 0.0);
}

TEST_CASE("update_grid gate is strict: magnitude exactly at epsilon stays still") {
  // 0.125 is exact in both float and double, so the boundary really is hit.
  StatsGrid grid(1, 1);
  BlockFlowGrid blocks(1, 1);
  blocks.magnitude[0] = 0.125f;
  update_grid(grid, blocks, nullptr, 0.125);
  CHECK(grid.at(0, 0, StatsChannel::magnitude).count == 0.0);

  blocks.magnitude[0] = 0.25f;
  update_grid(grid, blocks, nullptr, 0.125);
  CHECK(grid.at(0, 0, StatsChannel::magnitude).count == 1.0);
}

TEST_CASE("update_grid touches exactly the moving cell") {
  StatsGrid grid(4, 3);
  const BlockFlowGrid blocks = single_cell_blocks(4, 3, 2, 1, 2.0f, 0.0f);
  update_grid(grid, blocks, nullptr, 0.1);

  for (int cy = 0; cy < 3; ++cy) {
    for (int cx = 0; cx < 4; ++cx) {
      const double want = (cx == 2 && cy == 1) ? 1.0 : 0.0;
      CHECK(grid.at(cx, cy, StatsChannel::vx).count == want);
      CHECK(grid.at(cx, cy, StatsChannel::magnitude).count == want);
    }
  }
  CHECK(grid.at(2, 1, StatsChannel::vx).mean == 2.0);
  CHECK(grid.at(2, 1, StatsChannel::magnitude).mean == 2.0);
}

TEST_CASE("update_grid applies the adaptation formula to flagged cells") {
  StatsGrid grid(2, 1);
  for (int ch = 0; ch < kStatsChannels; ++ch) {
    CellStats& s = grid.at(0, 0, static_cast<StatsChannel>(ch));
    s.mean = 3.0;
    s.min = 3.0;
    s.max = 3.0;
    s.count = 5.0;
  }
  BlockFlowGrid blocks = single_cell_blocks(2, 1, 0, 0, 7.0f, 0.0f);
  std::vector<CellLabel> flags(2, CellLabel::normal);
  flags[0] = CellLabel::anomalous;
  update_grid(grid, blocks, &flags, 0.1);

  CHECK(grid.at(0, 0, StatsChannel::vx).count == 3.0);  // (5-1)/2 + 1
  CHECK(grid.at(0, 0, StatsChannel::vx).mean == 13.0 / 3.0);
  CHECK(grid.at(0, 0, StatsChannel::magnitude).mean == 13.0 / 3.0);
}

TEST_CASE("update_grid rejects mismatched dimensions") {
  StatsGrid grid(2, 2);
  const BlockFlowGrid blocks(3, 2);
  CHECK_THROWS_AS(update_grid(grid, blocks, nullptr, 0.1), ShapeError);
}

TEST_CASE("stats snapshots round-trip bit-exactly") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int trial = 0; trial < 20; ++trial) {
    StatsGrid grid(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6));
    grid.frames_seen = static_cast<std::uint32_t>(rng() % 100000);
    for (CellStats& s : grid.cells) {
      s.mean = u(rng);
      s.max = u(rng);
      s.min = u(rng);
      s.variance = std::abs(u(rng));
      s.count = std::abs(u(rng));
    }
    std::vector<unsigned char> bytes;
    write_stats_snapshot(grid, bytes);
    CHECK(read_stats_snapshot(bytes) == grid);
  }
}

TEST_CASE("stats snapshot files round-trip and reject corruption") {
  test::TempDir dir("stats");
  StatsGrid grid(3, 2);
  grid.cells[0].mean = 1.5;
  grid.cells[0].count = 4.0;
  grid.frames_seen = 9;
  save_stats_snapshot(dir / "s.aads", grid);
  CHECK(load_stats_snapshot(dir / "s.aads") == grid);

  std::vector<unsigned char> bytes;
  write_stats_snapshot(grid, bytes);

  std::vector<unsigned char> bad = bytes;
  bad[0] = 'Z';
  CHECK_THROWS_AS(read_stats_snapshot(bad), FormatError);  // magic

  bad = bytes;
  bad[4] = 7;
  CHECK_THROWS_AS(read_stats_snapshot(bad), FormatError);  // version

  bad = bytes;
  bad[16] = 9;
  CHECK_THROWS_AS(read_stats_snapshot(bad), FormatError);  // channel count

  bad = bytes;
  bad[20] = 4;
  CHECK_THROWS_AS(read_stats_snapshot(bad), FormatError);  // tuple length

  bad = bytes;
  bad.resize(bad.size() - 8);
  CHECK_THROWS_AS(read_stats_snapshot(bad), FormatError);  // truncated

  CHECK_THROWS_AS(load_stats_snapshot(dir / "missing.aads"), IoError);
}
