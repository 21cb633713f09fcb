#include "aad/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "aad/errors.hpp"

namespace aad {

std::vector<unsigned char> encode_ppm(const RgbImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void save_ppm(const RgbImage& image, const std::filesystem::path& file) {
  const auto bytes = encode_ppm(image);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + file.string());
}

RgbImage render_mean_flow(const StatsGrid& grid) {
  if (grid.cell_count() == 0) throw StateError("cannot render an empty stats grid");

  double max_vx = 0.0, max_vy = 0.0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    max_vx = std::max(max_vx, std::abs(grid.cells[i * kStatsChannels + 0].mean));
    max_vy = std::max(max_vy, std::abs(grid.cells[i * kStatsChannels + 1].mean));
  }

  RgbImage image(grid.grid_w, grid.grid_h);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const double gx = grid.cells[i * kStatsChannels + 0].mean;
    const double gy = grid.cells[i * kStatsChannels + 1].mean;
    const double green = max_vx > 0.0 ? std::abs(gx) / max_vx * 255.0 : 0.0;
    const double blue = max_vy > 0.0 ? std::abs(gy) / max_vy * 255.0 : 0.0;
    image.rgb[i * 3 + 1] = static_cast<unsigned char>(std::lround(green));
    image.rgb[i * 3 + 2] = static_cast<unsigned char>(std::lround(blue));
  }
  return image;
}

FrameBuffer render_class_probability(const ObjectMap& map, int class_id) {
  if (map.width <= 0 || map.height <= 0) throw StateError("cannot render an empty object map");
  if (class_id < 0 || class_id >= map.num_classes)
    throw ConfigError("class id " + std::to_string(class_id) + " outside [0, " +
                      std::to_string(map.num_classes) + ")");

  FrameBuffer out(map.width, map.height);
  double max_prob = 0.0;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::uint32_t total = map.total(x, y);
      const double prob =
          total > 0 ? static_cast<double>(map.class_count(x, y, class_id)) / total : 0.0;
      out.at(x, y) = static_cast<float>(prob);
      max_prob = std::max(max_prob, prob);
    }
  }
  if (max_prob > 0.0)
    for (float& v : out.data) v = static_cast<float>(v / max_prob * 255.0);
  return out;
}

FrameBuffer render_anomaly_cells(const AnomalyMap& map) {
  FrameBuffer out(map.grid_w, map.grid_h);
  for (std::size_t i = 0; i < map.labels.size(); ++i)
    out.data[i] = static_cast<float>(static_cast<unsigned char>(map.labels[i]));
  return out;
}

}  // namespace aad
