#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aad/detector.hpp"
#include "aad/frame.hpp"
#include "aad/motion_stats.hpp"
#include "aad/object_map.hpp"
#include "aad/optical_flow.hpp"
#include "aad/pooling.hpp"

namespace aad {

// Everything the detection and evaluation stages need from a sequence:
// pooled block flow per frame pair plus the detection stream.
struct SequenceRun {
  int frame_width = 0;
  int frame_height = 0;
  int grid_w = 0;
  int grid_h = 0;
  int frame_count = 0;
  int stride = 2;
  std::vector<int> targets;                // target frame index of each pair
  std::vector<BlockFlowGrid> blocks;       // pooled flow, one per pair
  std::vector<DetectionRecord> detections; // sorted by frame; may be empty
  int num_classes = 21;
  int computed_pairs = 0;  // flow computed fresh during build
  int cached_pairs = 0;    // flow served from valid cache files
};

// Computes flow for every (t - stride, t) pair and pools it to the block
// grid. With a cache_dir, valid flow_<src>_<dst>.aadf files are reused and
// fresh results are written back; unreadable cache files trigger a warning
// and a recompute. Throws StateError for sequences shorter than one pair.
SequenceRun build_run(const FrameSequence& frames, const FlowParams& params,
                      const std::filesystem::path* cache_dir);

// Result of streaming a DetectorConfig over a SequenceRun.
struct DetectionResult {
  std::vector<AnomalyMap> maps;  // one per pair, aligned with run.targets
  std::vector<int> targets;
  int eval_start = -1;  // first pair whose grid had any warmed-up cell; -1 if none
  StatsGrid stats;      // final grid state
  ObjectMap objects;    // final object history (dims set only when used)
};

// The streaming loop: per pair, project object flags from that frame's
// detections (history excludes the frame itself), detect against the current
// stats, then fold the frame into the stats (adapting flagged cells when
// cfg.adapt). Throws ConfigError when cfg.use_objects but the run carries no
// detections.
DetectionResult run_detection(const SequenceRun& run, const DetectorConfig& cfg);

// Per-frame CSV: header "frame,score,flag,max_zscore", one row per pair.
std::string detection_csv_text(const DetectionResult& result);
void write_detection_csv(const std::filesystem::path& path, const DetectionResult& result);

// Cache file name for one pair: flow_<src>_<dst>.aadf.
std::string flow_cache_name(int src, int dst);

}  // namespace aad
