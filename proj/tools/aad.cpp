// aad — adaptive anomaly detection over image sequences.
//
// Subcommands: flow (precompute flow caches), run (full detection pipeline),
// eval (k-sweep ROC + AUC), render (visualize maps), synth (generate a
// ground-truthed synthetic scene).
//
// Exit codes: 0 success, 1 input/config error, 2 internal failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aad/config.hpp"
#include "aad/errors.hpp"
#include "aad/evaluation.hpp"
#include "aad/pipeline.hpp"
#include "aad/render.hpp"
#include "aad/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw aad::IoError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Attaches the detection stream from config to a built run.
void attach_detections(aad::SequenceRun& run, const aad::RunConfig& rc) {
  run.num_classes = rc.num_classes;
  if (rc.detections_file.empty()) return;
  run.detections =
      aad::parse_detections(read_text_file(rc.detections_file), rc.num_classes, rc.score_threshold);
}

int cmd_flow(const fs::path& frames_dir, const std::string& pattern, const fs::path& out_dir,
             const aad::FlowParams& params) {
  const aad::FrameSequence frames = aad::load_sequence(frames_dir, pattern);
  const aad::SequenceRun run = aad::build_run(frames, params, &out_dir);
  std::cout << "flow: " << run.computed_pairs << " pair(s) computed, " << run.cached_pairs
            << " reused from cache in " << out_dir.string() << "\n";
  return 0;
}

int cmd_run(const fs::path& config_file) {
  const aad::RunConfig rc = aad::load_run_config(config_file);
  const aad::FrameSequence frames = aad::load_sequence(rc.frames_dir, rc.frame_pattern);

  fs::create_directories(rc.out_dir);
  const fs::path cache_dir = rc.out_dir / "flow_cache";
  aad::SequenceRun run = aad::build_run(frames, rc.flow, rc.cache ? &cache_dir : nullptr);
  attach_detections(run, rc);

  const aad::DetectionResult result = aad::run_detection(run, rc.detector);

  aad::write_detection_csv(rc.out_dir / "detections.csv", result);
  aad::save_stats_snapshot(rc.out_dir / "stats.aads", result.stats);
  {
    // The resolved config makes the run directory self-describing for `eval`.
    std::ofstream cfg_out(rc.out_dir / "run_config.ini", std::ios::trunc);
    if (!cfg_out) throw aad::IoError("cannot write run_config.ini");
    cfg_out << aad::run_config_text(rc);
  }
  if (rc.write_cell_maps) {
    const fs::path cells_dir = rc.out_dir / "cells";
    fs::create_directories(cells_dir);
    char name[32];
    for (std::size_t i = 0; i < result.maps.size(); ++i) {
      std::snprintf(name, sizeof(name), "cells_%04d.pgm", result.targets[i]);
      aad::save_pgm(aad::render_anomaly_cells(result.maps[i]), cells_dir / name);
    }
  }

  int flagged = 0;
  for (const aad::AnomalyMap& m : result.maps) flagged += m.frame_flag ? 1 : 0;
  std::cout << "run: " << result.maps.size() << " pair(s), " << flagged << " flagged; warmup "
            << (result.eval_start < 0
                    ? std::string("never completed")
                    : "completed at pair " + std::to_string(result.eval_start))
            << "; outputs in " << rc.out_dir.string() << "\n";
  return 0;
}

int cmd_eval(const fs::path& run_dir, const fs::path& truth_file, std::vector<double> ks,
             bool live) {
  const fs::path config_file = run_dir / "run_config.ini";
  if (!fs::is_regular_file(config_file))
    throw aad::ConfigError(config_file.string() + " not found (create the run with `aad run`)");
  const aad::RunConfig rc = aad::load_run_config(config_file);
  const aad::FrameSequence frames = aad::load_sequence(rc.frames_dir, rc.frame_pattern);

  const fs::path cache_dir = run_dir / "flow_cache";
  aad::SequenceRun run =
      aad::build_run(frames, rc.flow, fs::is_directory(cache_dir) ? &cache_dir : nullptr);
  attach_detections(run, rc);

  const std::vector<int> truth = aad::load_frame_labels(truth_file);
  const auto points = aad::roc_sweep(run, truth, std::move(ks), rc.detector, !live);
  const double area = aad::auc(points);
  aad::write_roc_csv(run_dir / "roc.csv", points, area);
  std::cout << aad::roc_csv_text(points, area);
  return 0;
}

int cmd_render(const fs::path& stats_file, const fs::path& detections_file, int width, int height,
               int classes, double score_threshold, const fs::path& out_dir) {
  if (stats_file.empty() && detections_file.empty())
    throw aad::ConfigError("render needs --stats and/or --detections");
  fs::create_directories(out_dir);

  if (!stats_file.empty()) {
    const aad::StatsGrid grid = aad::load_stats_snapshot(stats_file);
    aad::save_ppm(aad::render_mean_flow(grid), out_dir / "mean_flow.ppm");
    std::cout << "render: wrote " << (out_dir / "mean_flow.ppm").string() << "\n";
  }
  if (!detections_file.empty()) {
    if (width <= 0 || height <= 0)
      throw aad::ConfigError("--detections rendering needs --width and --height");
    aad::ObjectMap map(width, height, classes);
    const auto records =
        aad::parse_detections(read_text_file(detections_file), classes, score_threshold);
    aad::accumulate(map, records);
    std::set<int> seen;
    for (const aad::DetectionRecord& r : records) seen.insert(r.class_id);
    char name[32];
    for (int class_id : seen) {
      std::snprintf(name, sizeof(name), "class_%02d.pgm", class_id);
      aad::save_pgm(aad::render_class_probability(map, class_id), out_dir / name);
    }
    std::cout << "render: wrote " << seen.size() << " class map(s) in " << out_dir.string()
              << "\n";
  }
  return 0;
}

int cmd_synth(const fs::path& spec_file, const fs::path& out_dir) {
  const aad::SceneSpec spec = aad::load_scene_spec(spec_file);
  const aad::RenderedScene scene = aad::render_sequence(spec);
  aad::write_scene(scene, out_dir);
  std::cout << "synth: wrote " << scene.frames.size() << " frame(s) + truth.txt to "
            << out_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive anomaly detection for image sequences"};
  app.require_subcommand(1);

  // flow
  auto* flow = app.add_subcommand("flow", "compute and cache optical flow for frame pairs");
  fs::path flow_frames, flow_out;
  std::string flow_pattern = "*.pgm";
  aad::FlowParams flow_params;
  flow->add_option("--frames", flow_frames, "frame directory")->required();
  flow->add_option("--out", flow_out, "cache output directory")->required();
  flow->add_option("--pattern", flow_pattern, "frame filename glob");
  flow->add_option("--stride", flow_params.frame_stride, "frame pairing stride");
  flow->add_option("--levels", flow_params.pyramid_levels, "pyramid levels");
  flow->add_option("--scale", flow_params.pyramid_scale, "pyramid scale");
  flow->add_option("--window", flow_params.window_size, "averaging window");
  flow->add_option("--iterations", flow_params.iterations, "iterations per level");
  flow->add_option("--poly-n", flow_params.poly_n, "expansion neighborhood");
  flow->add_option("--poly-sigma", flow_params.poly_sigma, "expansion sigma");

  // run
  auto* run = app.add_subcommand("run", "run the full detection pipeline from a config");
  fs::path run_config;
  run->add_option("--config", run_config, "run config file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "k-sweep ROC evaluation over a finished run");
  fs::path eval_run, eval_truth;
  std::vector<double> eval_ks{1, 2, 3, 4, 5, 6};
  bool eval_live = false;
  eval->add_option("--run", eval_run, "run output directory (from `aad run`)")->required();
  eval->add_option("--truth", eval_truth, "frame label file (one 0/1 per line)")->required();
  eval->add_option("--k", eval_ks, "k values to sweep")->delimiter(',');
  eval->add_flag("--live", eval_live, "re-run the adaptive pipeline per k instead of frozen stats");

  // render
  auto* render = app.add_subcommand("render", "render distribution maps to images");
  fs::path render_stats, render_detections, render_out = "render_out";
  int render_w = 0, render_h = 0, render_classes = 21;
  double render_threshold = 0.8;
  render->add_option("--stats", render_stats, "stats snapshot (.aads)");
  render->add_option("--detections", render_detections, "detections JSON-lines file");
  render->add_option("--width", render_w, "frame width for --detections");
  render->add_option("--height", render_h, "frame height for --detections");
  render->add_option("--classes", render_classes, "object class count");
  render->add_option("--score-threshold", render_threshold, "detection score cutoff");
  render->add_option("--out", render_out, "output directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic ground-truthed scene");
  fs::path synth_spec, synth_out;
  synth->add_option("--spec", synth_spec, "scene spec config file")->required();
  synth->add_option("--out", synth_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is an input error
  }

  try {
    if (*flow) return cmd_flow(flow_frames, flow_pattern, flow_out, flow_params);
    if (*run) return cmd_run(run_config);
    if (*eval) return cmd_eval(eval_run, eval_truth, eval_ks, eval_live);
    if (*render)
      return cmd_render(render_stats, render_detections, render_w, render_h, render_classes,
                        render_threshold, render_out);
    if (*synth) return cmd_synth(synth_spec, synth_out);
  } catch (const aad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
