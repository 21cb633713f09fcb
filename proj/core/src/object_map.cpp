#include "aad/object_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "aad/errors.hpp"

namespace aad {

std::vector<DetectionRecord> parse_detections(const std::string& text, int num_classes,
                                              double score_threshold) {
  std::vector<DetectionRecord> records;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // blank line

    const std::string where = "detections line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    }

    DetectionRecord rec;
    try {
      rec.frame_index = j.at("frame").get<int>();
      rec.class_id = j.at("class_id").get<int>();
      rec.score = j.at("score").get<double>();
      const auto& bbox = j.at("bbox");
      if (!bbox.is_array() || bbox.size() != 4)
        throw FormatError(where + "bbox must be a 4-element array");
      rec.x0 = bbox[0].get<double>();
      rec.y0 = bbox[1].get<double>();
      rec.x1 = bbox[2].get<double>();
      rec.y1 = bbox[3].get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + e.what());
    }

    if (rec.frame_index < 0) throw FormatError(where + "frame index must be >= 0");
    if (rec.class_id < 0 || rec.class_id >= num_classes)
      throw FormatError(where + "class_id " + std::to_string(rec.class_id) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    if (!(rec.score >= 0.0 && rec.score <= 1.0))
      throw FormatError(where + "score must lie in [0, 1]");
    if (!(rec.x0 < rec.x1 && rec.y0 < rec.y1))
      throw FormatError(where + "degenerate bbox (need x0 < x1 and y0 < y1)");

    if (rec.score < score_threshold) continue;  // low-confidence detections are dropped
    records.push_back(rec);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const DetectionRecord& a, const DetectionRecord& b) {
                     return a.frame_index < b.frame_index;
                   });
  return records;
}

PixelRect bbox_pixels(const DetectionRecord& record, int width, int height) {
  PixelRect r;
  r.x_begin = std::max(0, static_cast<int>(std::floor(record.x0)));
  r.y_begin = std::max(0, static_cast<int>(std::floor(record.y0)));
  r.x_end = std::min(width, static_cast<int>(std::ceil(record.x1)));
  r.y_end = std::min(height, static_cast<int>(std::ceil(record.y1)));
  return r;
}

void accumulate(ObjectMap& map, const std::vector<DetectionRecord>& records) {
  const int slots = map.num_classes + 1;
  for (const DetectionRecord& rec : records) {
    if (rec.class_id < 0 || rec.class_id >= map.num_classes)
      throw FormatError("detection class_id " + std::to_string(rec.class_id) +
                        " outside map's class range");
    const PixelRect r = bbox_pixels(rec, map.width, map.height);
    for (int y = r.y_begin; y < r.y_end; ++y) {
      for (int x = r.x_begin; x < r.x_end; ++x) {
        const std::size_t base = (static_cast<std::size_t>(y) * map.width + x) * slots;
        ++map.counts[base + rec.class_id];
        ++map.counts[base + map.num_classes];
      }
    }
  }
}

double class_probability(const ObjectMap& map, int x, int y, int class_id) {
  const std::uint32_t total = map.total(x, y);
  if (total == 0) throw StateError("no object history at pixel (" + std::to_string(x) + ", " +
                                   std::to_string(y) + ")");
  return static_cast<double>(map.class_count(x, y, class_id)) / total;
}

bool object_anomaly(const ObjectMap& map, const DetectionRecord& record, double p_rare,
                    int min_total) {
  const PixelRect r = bbox_pixels(record, map.width, map.height);
  if (r.empty()) return false;

  long seen = 0;
  double prob_sum = 0.0;
  for (int y = r.y_begin; y < r.y_end; ++y) {
    for (int x = r.x_begin; x < r.x_end; ++x) {
      const std::uint32_t total = map.total(x, y);
      if (total < static_cast<std::uint32_t>(min_total)) continue;
      ++seen;
      prob_sum += static_cast<double>(map.class_count(x, y, record.class_id)) / total;
    }
  }
  if (seen == 0 || 2 * seen < r.pixel_count()) return false;  // not enough history
  return prob_sum / seen < p_rare;
}

}  // namespace aad
