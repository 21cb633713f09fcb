#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "aad/frame.hpp"

namespace aad {

// A fast foreign agent crossing the scene during [entry, exit] (inclusive).
struct IntruderSpec {
  int entry = 150;
  int exit = 180;
  double speed = 5.0;          // px/frame, must exceed walker_speed
  double dir_x = 1.0, dir_y = 0.0;  // direction, normalized internally
};

// Ground-truthed scene description. Walkers are soft Gaussian blobs on
// bounded random walks; everything is a pure function of the seed.
struct SceneSpec {
  int width = 160;
  int height = 128;
  int frames = 200;
  int walkers = 12;
  double walker_speed = 1.0;   // max px/frame for the slow agents
  std::optional<IntruderSpec> intruder;
  double noise_sigma = 2.0;    // additive intensity noise, clipped to [0,255]
  std::uint64_t seed = 1;

  // Throws ConfigError on inconsistent values (frames < 3, slow intruder...).
  void validate() const;
};

struct RenderedScene {
  std::vector<FrameBuffer> frames;
  std::vector<int> truth;  // 1 exactly on the intruder's [entry, exit] frames
};

// Renders the whole sequence. Deterministic: the same spec (seed included)
// yields bit-identical frames.
RenderedScene render_sequence(const SceneSpec& spec);

// Writes frame_0000.pgm ... plus truth.txt (one 0/1 per line) into out_dir,
// creating it if needed.
void write_scene(const RenderedScene& scene, const std::filesystem::path& out_dir);

}  // namespace aad
