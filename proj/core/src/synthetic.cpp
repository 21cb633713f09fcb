#include "aad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "aad/errors.hpp"

namespace aad {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Deterministic scalar sampler: uniforms straight off mt19937_64 bits and a
// hand-rolled Box-Muller transform, so sequences depend only on the seed and
// the draw order (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct Blob {
  double x = 0.0, y = 0.0;
  double sigma = 3.0;
  double amplitude = 120.0;
};

// Reflect a coordinate into [lo, hi], flipping the matching velocity sign.
void reflect(double& pos, double& vel, double lo, double hi) {
  if (pos < lo) {
    pos = 2.0 * lo - pos;
    vel = -vel;
  } else if (pos > hi) {
    pos = 2.0 * hi - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, lo, hi);  // safety for pathological overshoot
}

void splat(FrameBuffer& frame, const Blob& blob) {
  const int radius = static_cast<int>(std::ceil(4.0 * blob.sigma));
  const int x0 = std::max(0, static_cast<int>(std::floor(blob.x)) - radius);
  const int x1 = std::min(frame.width - 1, static_cast<int>(std::ceil(blob.x)) + radius);
  const int y0 = std::max(0, static_cast<int>(std::floor(blob.y)) - radius);
  const int y1 = std::min(frame.height - 1, static_cast<int>(std::ceil(blob.y)) + radius);
  const double inv = 1.0 / (2.0 * blob.sigma * blob.sigma);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - blob.x;
      const double dy = y - blob.y;
      frame.at(x, y) += static_cast<float>(blob.amplitude * std::exp(-(dx * dx + dy * dy) * inv));
    }
  }
}

}  // namespace

void SceneSpec::validate() const {
  if (width < 8 || height < 8) throw ConfigError("scene must be at least 8x8");
  if (frames < 3) throw ConfigError("scene needs at least 3 frames");
  if (walkers < 0) throw ConfigError("walker count must be >= 0");
  if (walker_speed < 0.0) throw ConfigError("walker_speed must be >= 0");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (intruder) {
    if (!(intruder->speed > walker_speed))
      throw ConfigError("intruder speed must exceed walker_speed");
    if (intruder->entry < 0 || intruder->entry > intruder->exit || intruder->exit >= frames)
      throw ConfigError("intruder interval must satisfy 0 <= entry <= exit < frames");
    if (intruder->dir_x == 0.0 && intruder->dir_y == 0.0)
      throw ConfigError("intruder direction must be non-zero");
  }
}

RenderedScene render_sequence(const SceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const double margin = std::min({10.0, spec.width / 4.0, spec.height / 4.0});
  const double xlo = margin, xhi = spec.width - 1.0 - margin;
  const double ylo = margin, yhi = spec.height - 1.0 - margin;

  // Walker trajectories first (fixed draw order), then pixels.
  struct Walker {
    double x, y, heading, speed, amplitude;
  };
  std::vector<Walker> walkers(static_cast<std::size_t>(spec.walkers));
  for (Walker& w : walkers) {
    w.x = rng.uniform(xlo, xhi);
    w.y = rng.uniform(ylo, yhi);
    w.heading = rng.uniform(0.0, 2.0 * kPi);
    w.speed = spec.walker_speed * rng.uniform(0.5, 1.0);
    w.amplitude = rng.uniform(90.0, 140.0);
  }
  std::vector<std::vector<Blob>> walker_frames(static_cast<std::size_t>(spec.frames));
  for (int f = 0; f < spec.frames; ++f) {
    auto& blobs = walker_frames[f];
    blobs.reserve(walkers.size());
    for (Walker& w : walkers)
      blobs.push_back(Blob{w.x, w.y, 3.0, w.amplitude});
    for (Walker& w : walkers) {  // advance for the next frame
      w.heading += 0.3 * rng.gaussian();
      double vx = w.speed * std::cos(w.heading);
      double vy = w.speed * std::sin(w.heading);
      w.x += vx;
      w.y += vy;
      reflect(w.x, vx, xlo, xhi);
      reflect(w.y, vy, ylo, yhi);
      if (vx != 0.0 || vy != 0.0) w.heading = std::atan2(vy, vx);
    }
  }

  // Intruder path: starts at the frame edge along its direction, bounces off
  // the margins so it stays visible for the whole [entry, exit] window.
  std::vector<Blob> intruder_frames;
  if (spec.intruder) {
    const IntruderSpec& in = *spec.intruder;
    const double norm = std::hypot(in.dir_x, in.dir_y);
    double vx = in.speed * in.dir_x / norm;
    double vy = in.speed * in.dir_y / norm;
    double x = std::abs(in.dir_x) >= std::abs(in.dir_y) ? (in.dir_x > 0.0 ? xlo : xhi)
                                                        : spec.width / 2.0;
    double y = std::abs(in.dir_x) >= std::abs(in.dir_y) ? spec.height / 2.0
                                                        : (in.dir_y > 0.0 ? ylo : yhi);
    for (int f = in.entry; f <= in.exit; ++f) {
      intruder_frames.push_back(Blob{x, y, 6.0, 200.0});
      x += vx;
      y += vy;
      reflect(x, vx, xlo, xhi);
      reflect(y, vy, ylo, yhi);
    }
  }

  RenderedScene scene;
  scene.frames.reserve(static_cast<std::size_t>(spec.frames));
  scene.truth.assign(static_cast<std::size_t>(spec.frames), 0);
  for (int f = 0; f < spec.frames; ++f) {
    FrameBuffer frame(spec.width, spec.height, 16.0f);
    frame.index = f;
    for (const Blob& b : walker_frames[f]) splat(frame, b);
    const bool intruding =
        spec.intruder && f >= spec.intruder->entry && f <= spec.intruder->exit;
    if (intruding) {
      splat(frame, intruder_frames[static_cast<std::size_t>(f - spec.intruder->entry)]);
      scene.truth[f] = 1;
    }
    for (float& v : frame.data)
      v = std::clamp(static_cast<float>(v + spec.noise_sigma * rng.gaussian()), 0.0f, 255.0f);
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

void write_scene(const RenderedScene& scene, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  char name[32];
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frame_%04zu.pgm", i);
    save_pgm(scene.frames[i], out_dir / name);
  }
  std::ofstream truth(out_dir / "truth.txt", std::ios::trunc);
  if (!truth) throw IoError("cannot open " + (out_dir / "truth.txt").string());
  for (int label : scene.truth) truth << label << "\n";
  if (!truth) throw IoError("short write to " + (out_dir / "truth.txt").string());
}

}  // namespace aad
