#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aad/pooling.hpp"

namespace aad {

// Streaming 5-tuple for one cell channel. Variance uses the online (Welford)
// recurrence with an N-1 denominator; count is real-valued because anomaly
// adaptation halves it, which quickly leaves the integers.
struct CellStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double variance = 0.0;
  double count = 0.0;

  bool operator==(const CellStats&) const = default;
};

// Cell verdict for one frame. Numeric values double as the PGM dump levels.
enum class CellLabel : unsigned char { normal = 0, warmup = 128, anomalous = 255 };

// Per-cell channels tracked by the distribution grid.
inline constexpr int kStatsChannels = 3;  // vx, vy, magnitude
enum class StatsChannel : int { vx = 0, vy = 1, magnitude = 2 };

// grid_w x grid_h cells, each holding kStatsChannels independent CellStats.
struct StatsGrid {
  int grid_w = 0;
  int grid_h = 0;
  std::uint32_t frames_seen = 0;  // number of update_grid passes applied
  std::vector<CellStats> cells;   // cell-major: (y*grid_w + x)*kStatsChannels + ch

  StatsGrid() = default;
  StatsGrid(int w, int h)
      : grid_w(w), grid_h(h),
        cells(static_cast<std::size_t>(w) * h * kStatsChannels) {}

  std::size_t cell_count() const { return static_cast<std::size_t>(grid_w) * grid_h; }
  CellStats& at(int x, int y, StatsChannel ch) {
    return cells[(static_cast<std::size_t>(y) * grid_w + x) * kStatsChannels +
                 static_cast<int>(ch)];
  }
  const CellStats& at(int x, int y, StatsChannel ch) const {
    return cells[(static_cast<std::size_t>(y) * grid_w + x) * kStatsChannels +
                 static_cast<int>(ch)];
  }

  bool operator==(const StatsGrid&) const = default;
};

// Folds one observation into the tuple: count+1, running mean, Welford
// variance update, max/min extension. Throws InputError for non-finite x.
CellStats update_cell(const CellStats& stats, double x);

// Anomaly response: re-weights the mean with half the history,
// count' = (N-1)/2 + 1, so the new regime dominates quickly. Variance is
// carried over unchanged; max/min still extend. Throws StateError when there
// is no history (count < 1), InputError for non-finite x.
CellStats adapt_on_anomaly(const CellStats& stats, double x);

// |x - mean| / max(sqrt(variance), sigma_floor). Throws StateError when
// count < 2 (variance undefined).
double zscore(const CellStats& stats, double x, double sigma_floor);

// Streams one pooled frame into the grid. Cells with magnitude at or below
// motion_epsilon are untouched; moving cells apply update_cell per channel,
// or adapt_on_anomaly when `flags` marks them anomalous. `flags` may be null
// (no adaptation anywhere). Throws ShapeError on dim mismatch.
void update_grid(StatsGrid& grid, const BlockFlowGrid& blocks,
                 const std::vector<CellLabel>* flags, double motion_epsilon);

// Snapshot format: 4-byte ASCII magic "AADS", then version, grid_w, grid_h,
// channel count, tuple length (always 5), frames_seen as u32 little-endian
// (28 bytes total), then per cell (row-major) per channel the 5-tuple
// (mean, max, min, variance, count) as little-endian f64. Round-trips
// bit-exactly.
inline constexpr char kStatsSnapshotMagic[4] = {'A', 'A', 'D', 'S'};

std::size_t write_stats_snapshot(const StatsGrid& grid, std::vector<unsigned char>& sink);
StatsGrid read_stats_snapshot(std::span<const unsigned char> bytes);
void save_stats_snapshot(const std::filesystem::path& path, const StatsGrid& grid);
StatsGrid load_stats_snapshot(const std::filesystem::path& path);

}  // namespace aad
