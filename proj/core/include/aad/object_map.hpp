#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aad {

// One externally supplied detection. Boxes are pixel-unit, x0 < x1, y0 < y1;
// they are clamped to frame bounds when rasterized.
struct DetectionRecord {
  int frame_index = 0;
  int class_id = 0;
  double score = 0.0;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool operator==(const DetectionRecord&) const = default;
};

// Per-pixel class-occurrence history: num_classes counters plus one total per
// pixel, so each pixel carries num_classes + 1 integers. total always equals
// the sum of the class counters.
struct ObjectMap {
  int width = 0;
  int height = 0;
  int num_classes = 21;
  std::vector<std::uint32_t> counts;  // (y*width + x)*(num_classes+1) + class; last slot = total

  ObjectMap() = default;
  ObjectMap(int w, int h, int classes)
      : width(w), height(h), num_classes(classes),
        counts(static_cast<std::size_t>(w) * h * (classes + 1), 0) {}

  std::uint32_t class_count(int x, int y, int class_id) const {
    return counts[(static_cast<std::size_t>(y) * width + x) * (num_classes + 1) + class_id];
  }
  std::uint32_t total(int x, int y) const {
    return counts[(static_cast<std::size_t>(y) * width + x) * (num_classes + 1) + num_classes];
  }
};

// Parses JSON-lines detections: one object per non-blank line with keys
// frame, class_id, score, bbox (4-element [x0,y0,x1,y1]). Records scoring
// below `score_threshold` are dropped; the rest come back sorted by frame.
// Throws FormatError naming the line on malformed JSON, out-of-range
// class_id/score, or a degenerate bbox.
std::vector<DetectionRecord> parse_detections(const std::string& text, int num_classes,
                                              double score_threshold = 0.8);

// Increments the record's class counter and the total at every pixel inside
// each bbox (clamped to the map; boxes entirely outside contribute nothing).
void accumulate(ObjectMap& map, const std::vector<DetectionRecord>& records);

// class counter / total counter at one pixel. Throws StateError when the
// pixel has no history (total == 0).
double class_probability(const ObjectMap& map, int x, int y, int class_id);

// True when the record's class is rare where it appeared: the mean class
// probability over bbox pixels with total >= min_total is below p_rare AND at
// least half the bbox pixels have that much history. Cold regions stay normal.
bool object_anomaly(const ObjectMap& map, const DetectionRecord& record, double p_rare,
                    int min_total);

// Pixel footprint of a bbox after clamping to [0,w) x [0,h): half-open
// integer ranges [x_begin, x_end) x [y_begin, y_end). Empty when the box
// misses the frame.
struct PixelRect {
  int x_begin = 0, x_end = 0, y_begin = 0, y_end = 0;
  bool empty() const { return x_begin >= x_end || y_begin >= y_end; }
  long pixel_count() const {
    return empty() ? 0 : static_cast<long>(x_end - x_begin) * (y_end - y_begin);
  }
};
PixelRect bbox_pixels(const DetectionRecord& record, int width, int height);

}  // namespace aad
