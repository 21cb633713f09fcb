#include "aad/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aad/errors.hpp"

namespace aad {

void DetectorConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  if (warmup < 2.0) throw ConfigError("warmup must be >= 2");
  if (sigma_floor < 0.0) throw ConfigError("sigma_floor must be >= 0");
  if (motion_epsilon < 0.0) throw ConfigError("motion_epsilon must be >= 0");
  if (min_cells < 1) throw ConfigError("min_cells must be >= 1");
  if (!(p_rare > 0.0 && p_rare < 1.0)) throw ConfigError("p_rare must lie in (0, 1)");
  if (min_total < 1) throw ConfigError("min_total must be >= 1");
}

namespace {

bool outside_window(const CellStats& s, double x, const DetectorConfig& cfg) {
  const double sigma = std::max(std::sqrt(s.variance), cfg.sigma_floor);
  return std::abs(x - s.mean) > cfg.k * sigma;
}

}  // namespace

CellLabel classify_cell(const CellStats& stats, double x, const DetectorConfig& cfg) {
  if (stats.count < cfg.warmup) return CellLabel::warmup;
  return outside_window(stats, x, cfg) ? CellLabel::anomalous : CellLabel::normal;
}

AnomalyMap detect_frame(const StatsGrid& grid, const BlockFlowGrid& blocks,
                        const std::vector<bool>* object_flags, const DetectorConfig& cfg) {
  if (grid.grid_w != blocks.grid_w || grid.grid_h != blocks.grid_h)
    throw ShapeError("stats grid " + std::to_string(grid.grid_w) + "x" +
                     std::to_string(grid.grid_h) + " vs block grid " +
                     std::to_string(blocks.grid_w) + "x" + std::to_string(blocks.grid_h));
  if (object_flags && object_flags->size() != blocks.cell_count())
    throw ShapeError("object flag count does not match block grid");

  AnomalyMap map(grid.grid_w, grid.grid_h);
  for (std::size_t i = 0; i < blocks.cell_count(); ++i) {
    const double mag = blocks.magnitude[i];
    CellLabel label = CellLabel::normal;
    if (mag > cfg.motion_epsilon) {
      const double obs[kStatsChannels] = {blocks.vx[i], blocks.vy[i], blocks.magnitude[i]};
      if (cfg.per_channel_or) {
        bool any_anomalous = false, any_warmup = false;
        for (int ch = 0; ch < kStatsChannels; ++ch) {
          const CellLabel l = classify_cell(grid.cells[i * kStatsChannels + ch], obs[ch], cfg);
          any_anomalous |= l == CellLabel::anomalous;
          any_warmup |= l == CellLabel::warmup;
        }
        label = any_anomalous ? CellLabel::anomalous
                              : (any_warmup ? CellLabel::warmup : CellLabel::normal);
      } else {
        const int ch = static_cast<int>(cfg.channel);
        label = classify_cell(grid.cells[i * kStatsChannels + ch], obs[ch], cfg);
      }

      // Track the strongest standardized deviation among cells allowed to fire.
      const int zch = static_cast<int>(cfg.channel);
      const CellStats& s = grid.cells[i * kStatsChannels + zch];
      if (s.count >= cfg.warmup && s.count >= 2.0)
        map.max_zscore = std::max(map.max_zscore, zscore(s, obs[zch], cfg.sigma_floor));
    }
    if (cfg.use_objects && object_flags && (*object_flags)[i]) label = CellLabel::anomalous;
    map.labels[i] = label;
    if (label == CellLabel::anomalous) ++map.frame_score;
  }
  map.frame_flag = map.frame_score >= cfg.min_cells;
  return map;
}

std::vector<bool> cell_flags_from_objects(const std::vector<DetectionRecord>& frame_records,
                                          const ObjectMap& map, int grid_w, int grid_h,
                                          const DetectorConfig& cfg) {
  std::vector<bool> flags(static_cast<std::size_t>(grid_w) * grid_h, false);
  for (const DetectionRecord& rec : frame_records) {
    if (!object_anomaly(map, rec, cfg.p_rare, cfg.min_total)) continue;
    const PixelRect r = bbox_pixels(rec, map.width, map.height);
    if (r.empty()) continue;
    // Cells cover 4x4 pixel footprints; mark every cell the bbox touches.
    const int cx0 = std::clamp(r.x_begin / 4, 0, grid_w - 1);
    const int cy0 = std::clamp(r.y_begin / 4, 0, grid_h - 1);
    const int cx1 = std::clamp((r.x_end - 1) / 4, 0, grid_w - 1);
    const int cy1 = std::clamp((r.y_end - 1) / 4, 0, grid_h - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx)
        flags[static_cast<std::size_t>(cy) * grid_w + cx] = true;
  }
  return flags;
}

}  // namespace aad
