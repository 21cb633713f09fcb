#include "aad/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "aad/errors.hpp"
#include "aad/flow_cache.hpp"

namespace aad {

std::string flow_cache_name(int src, int dst) {
  return "flow_" + std::to_string(src) + "_" + std::to_string(dst) + ".aadf";
}

namespace {

// Loads a cached pair if it is present and consistent; nullopt means compute.
std::optional<FlowField> try_cache(const std::filesystem::path& file, int src, int dst, int w,
                                   int h) {
  if (!std::filesystem::is_regular_file(file)) return std::nullopt;
  try {
    auto [header, flow] = load_flow_cache(file);
    if (static_cast<int>(header.width) != w || static_cast<int>(header.height) != h ||
        static_cast<int>(header.src_frame) != src || static_cast<int>(header.dst_frame) != dst)
      throw FormatError("cache header does not describe this pair");
    return std::move(flow);
  } catch (const Error& e) {
    std::cerr << "warning: ignoring cache " << file.string() << " (" << e.what()
              << "); recomputing\n";
    return std::nullopt;
  }
}

}  // namespace

SequenceRun build_run(const FrameSequence& frames, const FlowParams& params,
                      const std::filesystem::path* cache_dir) {
  params.validate();
  SequenceRun run;
  run.frame_width = frames.width();
  run.frame_height = frames.height();
  run.grid_w = frames.width() / 4;
  run.grid_h = frames.height() / 4;
  run.frame_count = frames.size();
  run.stride = params.frame_stride;

  const auto pairs = frame_pairing(frames.size(), params.frame_stride);
  if (pairs.empty())
    throw StateError("sequence of " + std::to_string(frames.size()) +
                     " frames yields no pairs at stride " + std::to_string(params.frame_stride));
  if (cache_dir) std::filesystem::create_directories(*cache_dir);

  // Each frame serves as src of one pair and dst of another; a sliding
  // window keyed by index keeps every frame decoded exactly once.
  std::map<int, FrameBuffer> window;
  auto load_frame = [&](int index) -> const FrameBuffer& {
    auto it = window.find(index);
    if (it == window.end()) it = window.emplace(index, frames.load(index)).first;
    return it->second;
  };

  for (const auto& [src, dst] : pairs) {
    FlowField flow;
    bool from_cache = false;
    const std::filesystem::path cache_file =
        cache_dir ? *cache_dir / flow_cache_name(src, dst) : std::filesystem::path{};
    if (cache_dir) {
      if (auto cached = try_cache(cache_file, src, dst, frames.width(), frames.height())) {
        flow = std::move(*cached);
        from_cache = true;
      }
    }
    if (!from_cache) {
      flow = farneback_flow(load_frame(src), load_frame(dst), params);
      if (cache_dir) {
        FlowCacheHeader header;
        header.width = static_cast<std::uint32_t>(flow.width);
        header.height = static_cast<std::uint32_t>(flow.height);
        header.src_frame = static_cast<std::uint32_t>(src);
        header.dst_frame = static_cast<std::uint32_t>(dst);
        save_flow_cache(cache_file, flow, header);
      }
      ++run.computed_pairs;
    } else {
      ++run.cached_pairs;
    }
    run.targets.push_back(dst);
    run.blocks.push_back(pool_flow(flow));
    window.erase(window.begin(), window.lower_bound(src + 1));  // src never needed again
  }
  return run;
}

DetectionResult run_detection(const SequenceRun& run, const DetectorConfig& cfg) {
  cfg.validate();
  if (cfg.use_objects && run.detections.empty())
    throw ConfigError("use_objects requires a detection stream in the run");

  DetectionResult result;
  result.targets = run.targets;
  result.stats = StatsGrid(run.grid_w, run.grid_h);
  if (cfg.use_objects)
    result.objects = ObjectMap(run.frame_width, run.frame_height, run.num_classes);

  std::size_t cursor = 0;  // next unaccumulated detection record
  for (std::size_t i = 0; i < run.blocks.size(); ++i) {
    const int target = run.targets[i];

    std::vector<bool> object_flags;
    if (cfg.use_objects) {
      // History strictly precedes the frame being judged.
      while (cursor < run.detections.size() &&
             run.detections[cursor].frame_index < target) {
        accumulate(result.objects, {run.detections[cursor]});
        ++cursor;
      }
      std::vector<DetectionRecord> frame_records;
      for (std::size_t j = cursor;
           j < run.detections.size() && run.detections[j].frame_index == target; ++j)
        frame_records.push_back(run.detections[j]);
      object_flags = cell_flags_from_objects(frame_records, result.objects, run.grid_w,
                                             run.grid_h, cfg);
    }

    if (result.eval_start < 0) {
      for (std::size_t c = 0; c < result.stats.cells.size(); c += kStatsChannels) {
        if (result.stats.cells[c].count >= cfg.warmup) {
          result.eval_start = static_cast<int>(i);
          break;
        }
      }
    }

    AnomalyMap map = detect_frame(result.stats, run.blocks[i],
                                  cfg.use_objects ? &object_flags : nullptr, cfg);
    update_grid(result.stats, run.blocks[i], cfg.adapt ? &map.labels : nullptr,
                cfg.motion_epsilon);
    result.maps.push_back(std::move(map));
  }
  return result;
}

std::string detection_csv_text(const DetectionResult& result) {
  std::string out = "frame,score,flag,max_zscore\n";
  char buf[96];
  for (std::size_t i = 0; i < result.maps.size(); ++i) {
    const AnomalyMap& m = result.maps[i];
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.9g\n", result.targets[i], m.frame_score,
                  m.frame_flag ? 1 : 0, m.max_zscore);
    out += buf;
  }
  return out;
}

void write_detection_csv(const std::filesystem::path& path, const DetectionResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << detection_csv_text(result);
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace aad
