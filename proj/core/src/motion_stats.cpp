#include "aad/motion_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "aad/errors.hpp"
#include "wire.hpp"

namespace aad {
namespace {

void require_finite(double x) {
  if (!std::isfinite(x)) throw InputError("observation must be finite");
}

}  // namespace

CellStats update_cell(const CellStats& stats, double x) {
  require_finite(x);
  if (stats.count <= 0.0) return CellStats{x, x, x, 0.0, 1.0};

  CellStats out;
  out.count = stats.count + 1.0;
  out.mean = (stats.mean * stats.count + x) / out.count;
  // Welford with real-valued counts: the N-1 weighted residual product.
  out.variance = out.count >= 2.0
                     ? ((out.count - 2.0) * stats.variance + (x - out.mean) * (x - stats.mean)) /
                           (out.count - 1.0)
                     : 0.0;
  out.max = std::max(stats.max, x);
  out.min = std::min(stats.min, x);
  return out;
}

CellStats adapt_on_anomaly(const CellStats& stats, double x) {
  require_finite(x);
  if (stats.count < 1.0) throw StateError("adaptation requires at least one prior observation");

  const double half_history = (stats.count - 1.0) / 2.0;
  CellStats out;
  out.mean = (stats.mean * half_history + x) / (half_history + 1.0);
  out.count = half_history + 1.0;
  out.variance = stats.variance;  // only the mean's weight is rebalanced
  out.max = std::max(stats.max, x);
  out.min = std::min(stats.min, x);
  return out;
}

double zscore(const CellStats& stats, double x, double sigma_floor) {
  if (stats.count < 2.0) throw StateError("z-score needs at least two observations");
  const double sigma = std::max(std::sqrt(stats.variance), sigma_floor);
  if (sigma <= 0.0) {
    // Degenerate spread with no floor: any deviation is infinitely surprising.
    return x == stats.mean ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(x - stats.mean) / sigma;
}

void update_grid(StatsGrid& grid, const BlockFlowGrid& blocks,
                 const std::vector<CellLabel>* flags, double motion_epsilon) {
  if (grid.grid_w != blocks.grid_w || grid.grid_h != blocks.grid_h)
    throw ShapeError("stats grid " + std::to_string(grid.grid_w) + "x" +
                     std::to_string(grid.grid_h) + " vs block grid " +
                     std::to_string(blocks.grid_w) + "x" + std::to_string(blocks.grid_h));
  if (flags && flags->size() != blocks.cell_count())
    throw ShapeError("anomaly flag count does not match block grid");

  for (std::size_t i = 0; i < blocks.cell_count(); ++i) {
    if (blocks.magnitude[i] <= motion_epsilon) continue;
    const double obs[kStatsChannels] = {blocks.vx[i], blocks.vy[i], blocks.magnitude[i]};
    for (int ch = 0; ch < kStatsChannels; ++ch) {
      CellStats& s = grid.cells[i * kStatsChannels + ch];
      // A flagged cell with no history yet cannot adapt; fold it in normally.
      if (flags && (*flags)[i] == CellLabel::anomalous && s.count >= 1.0)
        s = adapt_on_anomaly(s, obs[ch]);
      else
        s = update_cell(s, obs[ch]);
    }
  }
  ++grid.frames_seen;
}

std::size_t write_stats_snapshot(const StatsGrid& grid, std::vector<unsigned char>& sink) {
  const std::size_t start = sink.size();
  sink.insert(sink.end(), kStatsSnapshotMagic, kStatsSnapshotMagic + 4);
  wire::put_u32(sink, 1);
  wire::put_u32(sink, static_cast<std::uint32_t>(grid.grid_w));
  wire::put_u32(sink, static_cast<std::uint32_t>(grid.grid_h));
  wire::put_u32(sink, static_cast<std::uint32_t>(kStatsChannels));
  wire::put_u32(sink, 5);  // values per cell-channel tuple
  wire::put_u32(sink, grid.frames_seen);
  sink.reserve(sink.size() + grid.cells.size() * 5 * 8);
  for (const CellStats& s : grid.cells) {
    wire::put_f64(sink, s.mean);
    wire::put_f64(sink, s.max);
    wire::put_f64(sink, s.min);
    wire::put_f64(sink, s.variance);
    wire::put_f64(sink, s.count);
  }
  return sink.size() - start;
}

StatsGrid read_stats_snapshot(std::span<const unsigned char> bytes) {
  if (bytes.size() < 28) throw FormatError("stats snapshot truncated before header");
  if (std::memcmp(bytes.data(), kStatsSnapshotMagic, 4) != 0)
    throw FormatError("stats snapshot magic mismatch (want AADS)");
  const std::uint32_t version = wire::get_u32(bytes.data() + 4);
  if (version != 1)
    throw FormatError("stats snapshot version " + std::to_string(version) + " unsupported");
  const std::uint32_t w = wire::get_u32(bytes.data() + 8);
  const std::uint32_t h = wire::get_u32(bytes.data() + 12);
  const std::uint32_t channels = wire::get_u32(bytes.data() + 16);
  if (channels != kStatsChannels)
    throw FormatError("stats snapshot has " + std::to_string(channels) + " channels, want " +
                      std::to_string(kStatsChannels));
  const std::uint32_t tuple_len = wire::get_u32(bytes.data() + 20);
  if (tuple_len != 5)
    throw FormatError("stats snapshot tuple length " + std::to_string(tuple_len) + ", want 5");
  const std::uint64_t tuples = static_cast<std::uint64_t>(w) * h * channels;
  const std::uint64_t want = 28 + tuples * 5 * 8;
  if (bytes.size() != want)
    throw FormatError("stats snapshot payload is " + std::to_string(bytes.size()) +
                      " bytes, want " + std::to_string(want));

  StatsGrid grid(static_cast<int>(w), static_cast<int>(h));
  grid.frames_seen = wire::get_u32(bytes.data() + 24);
  const unsigned char* p = bytes.data() + 28;
  for (CellStats& s : grid.cells) {
    s.mean = wire::get_f64(p);
    s.max = wire::get_f64(p + 8);
    s.min = wire::get_f64(p + 16);
    s.variance = wire::get_f64(p + 24);
    s.count = wire::get_f64(p + 32);
    p += 40;
  }
  return grid;
}

void save_stats_snapshot(const std::filesystem::path& path, const StatsGrid& grid) {
  std::vector<unsigned char> bytes;
  write_stats_snapshot(grid, bytes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

StatsGrid load_stats_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return read_stats_snapshot(bytes);
}

}  // namespace aad
