// Microbenchmarks for the per-frame hot path: polynomial expansion, full
// Farneback flow, pooling, statistics updates, detection, and the binary
// formats. Run via `benchmarks/aad_bench` after a release build.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "aad/detector.hpp"
#include "aad/flow_cache.hpp"
#include "aad/motion_stats.hpp"
#include "aad/object_map.hpp"
#include "aad/optical_flow.hpp"
#include "aad/pipeline.hpp"
#include "aad/pooling.hpp"

namespace {

aad::FrameBuffer textured_frame(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> noise(-20.0f, 20.0f);
  aad::FrameBuffer frame(size, size, 128.0f);
  // Low-frequency ramp plus noise: realistic gradients for the fitters.
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      frame.at(x, y) = 128.0f + 0.2f * static_cast<float>(x) - 0.1f * static_cast<float>(y) +
                       noise(rng);
  return frame;
}

aad::FlowField jittered_flow(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  aad::FlowField flow(size, size);
  for (float& v : flow.vx) v = u(rng);
  for (float& v : flow.vy) v = u(rng);
  return flow;
}

void bench_polynomial_expansion(benchmark::State& state) {
  const aad::FrameBuffer frame = textured_frame(256, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::polynomial_expansion(frame, 5, 1.2));
}
BENCHMARK(bench_polynomial_expansion)->Unit(benchmark::kMillisecond);

void bench_farneback_flow(benchmark::State& state) {
  const aad::FrameBuffer prev = textured_frame(256, 2);
  const aad::FrameBuffer next = textured_frame(256, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::farneback_flow(prev, next));
}
BENCHMARK(bench_farneback_flow)->Unit(benchmark::kMillisecond);

void bench_pool_flow(benchmark::State& state) {
  const aad::FlowField flow = jittered_flow(256, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::pool_flow(flow));
}
BENCHMARK(bench_pool_flow)->Unit(benchmark::kMicrosecond);

void bench_update_grid(benchmark::State& state) {
  const aad::BlockFlowGrid blocks = aad::pool_flow(jittered_flow(256, 5));
  aad::StatsGrid grid(blocks.grid_w, blocks.grid_h);
  for (auto _ : state) {
    aad::update_grid(grid, blocks, nullptr, 0.1);
    benchmark::DoNotOptimize(grid.cells.data());
  }
}
BENCHMARK(bench_update_grid)->Unit(benchmark::kMicrosecond);

void bench_detect_frame(benchmark::State& state) {
  const aad::BlockFlowGrid blocks = aad::pool_flow(jittered_flow(256, 6));
  aad::StatsGrid grid(blocks.grid_w, blocks.grid_h);
  for (int i = 0; i < 64; ++i) aad::update_grid(grid, blocks, nullptr, 0.1);
  const aad::DetectorConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::detect_frame(grid, blocks, nullptr, cfg));
}
BENCHMARK(bench_detect_frame)->Unit(benchmark::kMicrosecond);

void bench_parse_detections(benchmark::State& state) {
  std::string lines;
  for (int i = 0; i < 500; ++i)
    lines += "{\"frame\":" + std::to_string(i / 4) +
             ",\"class_id\":14,\"score\":0.93,\"bbox\":[12.5,30,88,120]}\n";
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::parse_detections(lines, 21, 0.8));
}
BENCHMARK(bench_parse_detections)->Unit(benchmark::kMillisecond);

void bench_flow_cache_write(benchmark::State& state) {
  const aad::FlowField flow = jittered_flow(256, 7);
  aad::FlowCacheHeader header;
  header.width = 256;
  header.height = 256;
  for (auto _ : state) {
    std::vector<unsigned char> sink;
    aad::write_flow_cache(flow, header, sink);
    benchmark::DoNotOptimize(sink.data());
  }
}
BENCHMARK(bench_flow_cache_write)->Unit(benchmark::kMicrosecond);

void bench_flow_cache_read(benchmark::State& state) {
  const aad::FlowField flow = jittered_flow(256, 8);
  aad::FlowCacheHeader header;
  header.width = 256;
  header.height = 256;
  std::vector<unsigned char> bytes;
  aad::write_flow_cache(flow, header, bytes);
  for (auto _ : state)
    benchmark::DoNotOptimize(aad::read_flow_cache(bytes));
}
BENCHMARK(bench_flow_cache_read)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
