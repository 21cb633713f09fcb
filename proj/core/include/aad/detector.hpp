#pragma once

#include <vector>

#include "aad/motion_stats.hpp"
#include "aad/object_map.hpp"
#include "aad/pooling.hpp"

namespace aad {

// Knobs for the k-sigma window test and the motion/object fusion.
struct DetectorConfig {
  double k = 3.0;                // window half-width in sigmas
  double warmup = 30.0;          // min cell count before a cell may fire
  double sigma_floor = 0.01;     // lower bound on sigma in the test
  double motion_epsilon = 0.1;   // cells at or below this magnitude stay normal
  StatsChannel channel = StatsChannel::magnitude;
  bool per_channel_or = false;   // fire when ANY of vx/vy/magnitude is outside
  int min_cells = 1;             // anomalous cells needed to flag the frame
  bool adapt = true;             // apply count-halving to anomalous cells
  bool use_objects = false;      // fuse object-rarity flags
  double p_rare = 0.05;
  int min_total = 20;

  // Throws ConfigError on out-of-range values (k > 0, warmup >= 2, ...).
  void validate() const;
};

// One frame's verdicts: a label per cell plus the frame-level rollup.
struct AnomalyMap {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<CellLabel> labels;
  int frame_score = 0;       // count of anomalous cells
  bool frame_flag = false;   // frame_score >= min_cells
  double max_zscore = 0.0;   // largest z among fire-eligible cells

  AnomalyMap() = default;
  AnomalyMap(int w, int h)
      : grid_w(w), grid_h(h),
        labels(static_cast<std::size_t>(w) * h, CellLabel::normal) {}
};

// warmup while count < cfg.warmup; otherwise anomalous iff
// |x - mean| > k * max(sqrt(variance), sigma_floor).
CellLabel classify_cell(const CellStats& stats, double x, const DetectorConfig& cfg);

// Labels every cell (motion-gated k-sigma test, then OR with the optional
// per-cell object flags) and fills the frame rollup. Throws ShapeError on
// dim mismatch.
AnomalyMap detect_frame(const StatsGrid& grid, const BlockFlowGrid& blocks,
                        const std::vector<bool>* object_flags, const DetectorConfig& cfg);

// Projects object-anomalous bboxes onto the cell grid: every cell whose
// 4x4-pixel footprint intersects an anomalous record's bbox is flagged.
// `frame_records` must all belong to the frame being detected.
std::vector<bool> cell_flags_from_objects(const std::vector<DetectionRecord>& frame_records,
                                          const ObjectMap& map, int grid_w, int grid_h,
                                          const DetectorConfig& cfg);

}  // namespace aad
