#pragma once

#include <filesystem>
#include <vector>

#include "aad/detector.hpp"
#include "aad/frame.hpp"
#include "aad/motion_stats.hpp"
#include "aad/object_map.hpp"

namespace aad {

// Small RGB raster for the color map exports.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> rgb;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}
};

// Binary P6 PPM, maxval 255.
std::vector<unsigned char> encode_ppm(const RgbImage& image);
void save_ppm(const RgbImage& image, const std::filesystem::path& file);

// Mean-flow visualization: per cell, |mean vx| drives green and |mean vy|
// drives blue, each normalized to [0,255] by that channel's max absolute
// mean (all-zero channel stays black). Throws StateError for an empty grid.
RgbImage render_mean_flow(const StatsGrid& grid);

// Per-pixel probability of one class as a grayscale heat map, normalized to
// [0,255] by the image's max probability; pixels with no history are black.
FrameBuffer render_class_probability(const ObjectMap& map, int class_id);

// Cell labels as grayscale levels: normal 0, warmup 128, anomalous 255.
FrameBuffer render_anomaly_cells(const AnomalyMap& map);

}  // namespace aad
