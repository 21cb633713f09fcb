#pragma once

#include <utility>
#include <vector>

#include "aad/flow_field.hpp"
#include "aad/frame.hpp"

namespace aad {

// Farneback flow settings. The dataset-tuned values are the defaults; see
// validate() for the legal ranges.
struct FlowParams {
  int pyramid_levels = 3;
  double pyramid_scale = 0.5;  // per-level shrink factor, in (0,1)
  int window_size = 15;        // box filter side for the normal equations, odd
  int iterations = 5;          // displacement refinements per pyramid level
  int poly_n = 5;              // polynomial expansion neighborhood side, odd
  double poly_sigma = 1.2;     // Gaussian weight sigma for the expansion fit
  int frame_stride = 2;        // pair frames (t - stride, t)

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Per-pixel quadratic model I(x + d) ~= d'Ad + b'd + c fitted around each
// pixel. A is symmetric, so three planes cover it: [[a11, a12], [a12, a22]].
struct PolyExpansion {
  int width = 0;
  int height = 0;
  std::vector<double> a11, a12, a22;  // quadratic term
  std::vector<double> b1, b2;         // linear term (x, y)
  std::vector<double> c;              // constant term
};

// Level 0 is the input; each next level is blurred (Gaussian sigma 1.0) and
// bilinearly resampled by `scale`. Levels that would fall below 8x8 are
// dropped with a warning on stderr. Throws ShapeError for frames below 8x8,
// ConfigError for bad levels/scale.
std::vector<FrameBuffer> gaussian_pyramid(const FrameBuffer& frame, int levels, double scale);

// Gaussian-weighted least-squares fit of the quadratic model over an n x n
// neighborhood at every pixel, replicate padding at borders. Throws
// ConfigError for even/small n, ShapeError if the frame is smaller than n.
PolyExpansion polynomial_expansion(const FrameBuffer& frame, int n, double sigma);

// One Farneback update: averages the quadratic terms of `prev` and of `next`
// warped by `prior`, forms per-pixel normal equations, box-filters them over
// window_size, and solves for the displacement. Pixels whose 2x2 system has
// det < 1e-9 keep the prior flow. Throws ShapeError on dimension mismatch.
FlowField displacement_step(const PolyExpansion& prev, const PolyExpansion& next,
                            const FlowField& prior, int window_size);

// Coarse-to-fine driver: zero flow at the coarsest level, `iterations`
// displacement steps per level, bilinear upscale (displacements scaled by
// 1/pyramid_scale) between levels. Throws ShapeError if dims differ.
FlowField farneback_flow(const FrameBuffer& prev, const FrameBuffer& next,
                         const FlowParams& params = {});

// Index pairs (t - stride, t) for every t in [stride, frame_count). Throws
// ConfigError if stride < 1.
std::vector<std::pair<int, int>> frame_pairing(int frame_count, int stride);

}  // namespace aad
