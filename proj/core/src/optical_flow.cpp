#include "aad/optical_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <string>

#include "aad/errors.hpp"

namespace aad {
namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Bilinear sample with replicate clamping outside the plane.
template <class T>
double bilinear(const std::vector<T>& plane, int w, int h, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = plane[static_cast<std::size_t>(y0) * w + x0] * (1.0 - fx) +
                     plane[static_cast<std::size_t>(y0) * w + x1] * fx;
  const double bot = plane[static_cast<std::size_t>(y1) * w + x0] * (1.0 - fx) +
                     plane[static_cast<std::size_t>(y1) * w + x1] * fx;
  return top * (1.0 - fy) + bot * fy;
}

// Separable Gaussian blur, sigma 1.0, radius 3, replicate borders.
FrameBuffer gaussian_blur_1(const FrameBuffer& src) {
  constexpr int R = 3;
  std::array<double, 2 * R + 1> k{};
  double sum = 0.0;
  for (int i = -R; i <= R; ++i) sum += k[i + R] = std::exp(-0.5 * i * i);
  for (double& v : k) v /= sum;

  const int w = src.width, h = src.height;
  std::vector<double> tmp(src.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -R; i <= R; ++i) acc += k[i + R] * src.at(clampi(x + i, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  FrameBuffer out(src);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -R; i <= R; ++i)
        acc += k[i + R] * tmp[static_cast<std::size_t>(clampi(y + i, 0, h - 1)) * w + x];
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

// Pixel-center aligned bilinear resample.
FrameBuffer resample_bilinear(const FrameBuffer& src, int nw, int nh) {
  FrameBuffer out;
  out.width = nw;
  out.height = nh;
  out.index = src.index;
  out.data.resize(static_cast<std::size_t>(nw) * nh);
  const double sx = static_cast<double>(src.width) / nw;
  const double sy = static_cast<double>(src.height) / nh;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      out.at(x, y) = static_cast<float>(
          bilinear(src.data, src.width, src.height, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5));
    }
  }
  return out;
}

// Bilinear flow upscale; displacements grow by `gain` with the resolution.
FlowField upscale_flow(const FlowField& src, int nw, int nh, double gain) {
  FlowField out(nw, nh);
  const double sx = static_cast<double>(src.width) / nw;
  const double sy = static_cast<double>(src.height) / nh;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      const double u = (x + 0.5) * sx - 0.5;
      const double v = (y + 0.5) * sy - 0.5;
      out.vx_at(x, y) = static_cast<float>(gain * bilinear(src.vx, src.width, src.height, u, v));
      out.vy_at(x, y) = static_cast<float>(gain * bilinear(src.vy, src.width, src.height, u, v));
    }
  }
  return out;
}

// Summed-area table with a zero top row/left column; box_mean reads it back.
void integral_image(const std::vector<double>& src, int w, int h, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += src[static_cast<std::size_t>(y) * w + x];
      out[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
          row + out[static_cast<std::size_t>(y) * (w + 1) + (x + 1)];
    }
  }
}

double box_sum(const std::vector<double>& sat, int w, int x0, int y0, int x1, int y1) {
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  return sat[(y1 + 1) * stride + (x1 + 1)] - sat[(y0) * stride + (x1 + 1)] -
         sat[(y1 + 1) * stride + (x0)] + sat[(y0) * stride + (x0)];
}

}  // namespace

void FlowParams::validate() const {
  if (pyramid_levels < 1) throw ConfigError("pyramid_levels must be >= 1");
  if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0))
    throw ConfigError("pyramid_scale must lie in (0, 1)");
  if (window_size < 3 || window_size % 2 == 0)
    throw ConfigError("window_size must be odd and >= 3");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (poly_n < 3 || poly_n % 2 == 0) throw ConfigError("poly_n must be odd and >= 3");
  if (!(poly_sigma > 0.0)) throw ConfigError("poly_sigma must be positive");
  if (frame_stride < 1) throw ConfigError("frame_stride must be >= 1");
}

std::vector<FrameBuffer> gaussian_pyramid(const FrameBuffer& frame, int levels, double scale) {
  if (frame.width < 8 || frame.height < 8)
    throw ShapeError("pyramid input must be at least 8x8, got " + std::to_string(frame.width) +
                     "x" + std::to_string(frame.height));
  if (levels < 1) throw ConfigError("pyramid levels must be >= 1");
  if (!(scale > 0.0 && scale < 1.0)) throw ConfigError("pyramid scale must lie in (0, 1)");

  std::vector<FrameBuffer> out;
  out.push_back(frame);
  for (int level = 1; level < levels; ++level) {
    const FrameBuffer& cur = out.back();
    const int nw = static_cast<int>(std::lround(cur.width * scale));
    const int nh = static_cast<int>(std::lround(cur.height * scale));
    if (nw < 8 || nh < 8) {
      std::cerr << "warning: pyramid clamped to " << level << " level(s); next level would be "
                << nw << "x" << nh << "\n";
      break;
    }
    out.push_back(resample_bilinear(gaussian_blur_1(cur), nw, nh));
  }
  return out;
}

PolyExpansion polynomial_expansion(const FrameBuffer& frame, int n, double sigma) {
  if (n < 3 || n % 2 == 0) throw ConfigError("expansion neighborhood must be odd and >= 3");
  if (!(sigma > 0.0)) throw ConfigError("expansion sigma must be positive");
  if (frame.width < n || frame.height < n)
    throw ShapeError("frame " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                     " smaller than expansion neighborhood " + std::to_string(n));

  const int m = n / 2;
  const int w = frame.width, h = frame.height;

  // Normalized 1-D Gaussian weights and their even moments. With these the
  // weighted-basis Gram matrix over {1, x, y, x2, y2, xy} is sparse: the
  // (1, x2, y2) block couples, everything else is diagonal.
  std::vector<double> g(static_cast<std::size_t>(n));
  double gsum = 0.0;
  for (int i = -m; i <= m; ++i) gsum += g[i + m] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : g) v /= gsum;
  double s2 = 0.0, s4 = 0.0;
  for (int i = -m; i <= m; ++i) {
    s2 += g[i + m] * i * i;
    s4 += g[i + m] * i * i * i * i;
  }

  // Inverse of the coupled block [[1, s2, s2], [s2, s4, s2^2], [s2, s2^2, s4]]
  // by adjugate; the fit is always well posed for positive weights.
  const double M[3][3] = {{1.0, s2, s2}, {s2, s4, s2 * s2}, {s2, s2 * s2, s4}};
  double inv[3][3];
  const double det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                     M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                     M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  inv[0][0] = (M[1][1] * M[2][2] - M[1][2] * M[2][1]) / det;
  inv[0][1] = (M[0][2] * M[2][1] - M[0][1] * M[2][2]) / det;
  inv[0][2] = (M[0][1] * M[1][2] - M[0][2] * M[1][1]) / det;
  inv[1][0] = inv[0][1];
  inv[1][1] = (M[0][0] * M[2][2] - M[0][2] * M[2][0]) / det;
  inv[1][2] = (M[0][2] * M[1][0] - M[0][0] * M[1][2]) / det;
  inv[2][0] = inv[0][2];
  inv[2][1] = inv[1][2];
  inv[2][2] = (M[0][0] * M[1][1] - M[0][1] * M[1][0]) / det;

  // Separable correlation: rows against {g, g*x, g*x^2}, then columns.
  const std::size_t npix = frame.pixel_count();
  std::vector<double> r0(npix), r1(npix), r2(npix);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a0 = 0.0, a1 = 0.0, a2 = 0.0;
      for (int i = -m; i <= m; ++i) {
        const double f = frame.at(clampi(x + i, 0, w - 1), y);
        const double wf = g[i + m] * f;
        a0 += wf;
        a1 += wf * i;
        a2 += wf * i * i;
      }
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      r0[idx] = a0;
      r1[idx] = a1;
      r2[idx] = a2;
    }
  }

  PolyExpansion out;
  out.width = w;
  out.height = h;
  out.a11.resize(npix);
  out.a12.resize(npix);
  out.a22.resize(npix);
  out.b1.resize(npix);
  out.b2.resize(npix);
  out.c.resize(npix);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double p1 = 0.0, px = 0.0, py = 0.0, pxx = 0.0, pyy = 0.0, pxy = 0.0;
      for (int j = -m; j <= m; ++j) {
        const std::size_t idx = static_cast<std::size_t>(clampi(y + j, 0, h - 1)) * w + x;
        const double wj = g[j + m];
        p1 += wj * r0[idx];
        px += wj * r1[idx];
        py += wj * j * r0[idx];
        pxx += wj * r2[idx];
        pyy += wj * j * j * r0[idx];
        pxy += wj * j * r1[idx];
      }
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      out.c[idx] = inv[0][0] * p1 + inv[0][1] * pxx + inv[0][2] * pyy;
      out.a11[idx] = inv[1][0] * p1 + inv[1][1] * pxx + inv[1][2] * pyy;
      out.a22[idx] = inv[2][0] * p1 + inv[2][1] * pxx + inv[2][2] * pyy;
      out.b1[idx] = px / s2;
      out.b2[idx] = py / s2;
      out.a12[idx] = pxy / (s2 * s2) * 0.5;
    }
  }
  return out;
}

FlowField displacement_step(const PolyExpansion& prev, const PolyExpansion& next,
                            const FlowField& prior, int window_size) {
  const int w = prev.width, h = prev.height;
  if (next.width != w || next.height != h || prior.width != w || prior.height != h)
    throw ShapeError("displacement step inputs disagree in size");
  if (window_size < 1 || window_size % 2 == 0)
    throw ConfigError("displacement window must be odd and >= 1");

  const std::size_t npix = prev.c.size();
  std::vector<double> g11(npix), g12(npix), g22(npix), h1(npix), h2(npix);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      const double du = prior.vx[idx];
      const double dv = prior.vy[idx];
      const double wx = x + du;
      const double wy = y + dv;
      // Averaged quadratic term of the pair, next's model sampled where the
      // prior says this pixel went.
      const double p = 0.5 * (prev.a11[idx] + bilinear(next.a11, w, h, wx, wy));
      const double q = 0.5 * (prev.a12[idx] + bilinear(next.a12, w, h, wx, wy));
      const double r = 0.5 * (prev.a22[idx] + bilinear(next.a22, w, h, wx, wy));
      const double db1 =
          -0.5 * (bilinear(next.b1, w, h, wx, wy) - prev.b1[idx]) + p * du + q * dv;
      const double db2 =
          -0.5 * (bilinear(next.b2, w, h, wx, wy) - prev.b2[idx]) + q * du + r * dv;
      g11[idx] = p * p + q * q;
      g12[idx] = q * (p + r);
      g22[idx] = q * q + r * r;
      h1[idx] = p * db1 + q * db2;
      h2[idx] = q * db1 + r * db2;
    }
  }

  std::vector<double> s11, s12, s22, t1, t2;
  integral_image(g11, w, h, s11);
  integral_image(g12, w, h, s12);
  integral_image(g22, w, h, s22);
  integral_image(h1, w, h, t1);
  integral_image(h2, w, h, t2);

  const int R = window_size / 2;
  FlowField out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = clampi(y - R, 0, h - 1), y1 = clampi(y + R, 0, h - 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = clampi(x - R, 0, w - 1), x1 = clampi(x + R, 0, w - 1);
      const double count = static_cast<double>(x1 - x0 + 1) * (y1 - y0 + 1);
      const double G11 = box_sum(s11, w, x0, y0, x1, y1) / count;
      const double G12 = box_sum(s12, w, x0, y0, x1, y1) / count;
      const double G22 = box_sum(s22, w, x0, y0, x1, y1) / count;
      const double H1 = box_sum(t1, w, x0, y0, x1, y1) / count;
      const double H2 = box_sum(t2, w, x0, y0, x1, y1) / count;
      const double det = G11 * G22 - G12 * G12;
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (det < 1e-9) {  // textureless: keep whatever the prior believed
        out.vx[idx] = prior.vx[idx];
        out.vy[idx] = prior.vy[idx];
      } else {
        out.vx[idx] = static_cast<float>((G22 * H1 - G12 * H2) / det);
        out.vy[idx] = static_cast<float>((G11 * H2 - G12 * H1) / det);
      }
    }
  }
  return out;
}

FlowField farneback_flow(const FrameBuffer& prev, const FrameBuffer& next,
                         const FlowParams& params) {
  if (prev.width != next.width || prev.height != next.height)
    throw ShapeError("flow frames disagree in size");
  params.validate();

  const auto pyr_prev = gaussian_pyramid(prev, params.pyramid_levels, params.pyramid_scale);
  const auto pyr_next = gaussian_pyramid(next, params.pyramid_levels, params.pyramid_scale);

  FlowField flow(pyr_prev.back().width, pyr_prev.back().height);
  for (int level = static_cast<int>(pyr_prev.size()) - 1;; --level) {
    const PolyExpansion e_prev =
        polynomial_expansion(pyr_prev[level], params.poly_n, params.poly_sigma);
    const PolyExpansion e_next =
        polynomial_expansion(pyr_next[level], params.poly_n, params.poly_sigma);
    for (int it = 0; it < params.iterations; ++it)
      flow = displacement_step(e_prev, e_next, flow, params.window_size);
    if (level == 0) break;
    flow = upscale_flow(flow, pyr_prev[level - 1].width, pyr_prev[level - 1].height,
                        1.0 / params.pyramid_scale);
  }
  return flow;
}

std::vector<std::pair<int, int>> frame_pairing(int frame_count, int stride) {
  if (stride < 1) throw ConfigError("frame stride must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  for (int t = stride; t < frame_count; ++t) pairs.emplace_back(t - stride, t);
  return pairs;
}

}  // namespace aad
