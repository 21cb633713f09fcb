#include "aad/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aad/errors.hpp"

namespace aad {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + value + "' is not an integer");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + value + "' is not a number");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + key + "': '" + value + "' is not a boolean");
}

// Rejects typos: every present key in `section` must be in `known`.
void check_known_keys(const ConfigMap& cfg, const std::string& section,
                      const std::set<std::string>& known) {
  const std::string prefix = section + ".";
  for (const auto& [key, value] : cfg) {
    if (key.rfind(prefix, 0) != 0) continue;
    if (!known.count(key.substr(prefix.size())))
      throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::istringstream stream(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) + ": empty section name");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": key outside any section");
    out[section + "." + key] = value;
  }
  return out;
}

ConfigMap load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

std::string config_string(const ConfigMap& cfg, const std::string& key,
                          const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

int config_int(const ConfigMap& cfg, const std::string& key, int fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : parse_int(key, it->second);
}

double config_double(const ConfigMap& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : parse_double(key, it->second);
}

bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : parse_bool(key, it->second);
}

RunConfig run_config_from(const ConfigMap& cfg) {
  check_known_keys(cfg, "run",
                   {"frames", "pattern", "detections", "truth", "out", "cache", "cell_maps"});
  check_known_keys(cfg, "flow",
                   {"levels", "scale", "window", "iterations", "poly_n", "poly_sigma", "stride"});
  check_known_keys(cfg, "detector",
                   {"k", "warmup", "sigma_floor", "motion_epsilon", "channel", "min_cells",
                    "adapt", "use_objects", "p_rare", "min_total"});
  check_known_keys(cfg, "objects", {"classes", "score_threshold", "class_names"});

  RunConfig rc;
  const std::string frames = config_string(cfg, "run.frames", "");
  if (frames.empty()) throw ConfigError("run.frames is required");
  rc.frames_dir = std::filesystem::absolute(frames);
  if (!std::filesystem::is_directory(rc.frames_dir))
    throw ConfigError("run.frames: no such directory: " + rc.frames_dir.string());
  rc.frame_pattern = config_string(cfg, "run.pattern", rc.frame_pattern);

  const std::string detections = config_string(cfg, "run.detections", "");
  if (!detections.empty()) {
    rc.detections_file = std::filesystem::absolute(detections);
    if (!std::filesystem::is_regular_file(rc.detections_file))
      throw ConfigError("run.detections: no such file: " + rc.detections_file.string());
  }
  const std::string truth = config_string(cfg, "run.truth", "");
  if (!truth.empty()) {
    rc.truth_file = std::filesystem::absolute(truth);
    if (!std::filesystem::is_regular_file(rc.truth_file))
      throw ConfigError("run.truth: no such file: " + rc.truth_file.string());
  }
  rc.out_dir = std::filesystem::absolute(config_string(cfg, "run.out", rc.out_dir.string()));
  rc.cache = config_bool(cfg, "run.cache", rc.cache);
  rc.write_cell_maps = config_bool(cfg, "run.cell_maps", rc.write_cell_maps);

  rc.flow.pyramid_levels = config_int(cfg, "flow.levels", rc.flow.pyramid_levels);
  rc.flow.pyramid_scale = config_double(cfg, "flow.scale", rc.flow.pyramid_scale);
  rc.flow.window_size = config_int(cfg, "flow.window", rc.flow.window_size);
  rc.flow.iterations = config_int(cfg, "flow.iterations", rc.flow.iterations);
  rc.flow.poly_n = config_int(cfg, "flow.poly_n", rc.flow.poly_n);
  rc.flow.poly_sigma = config_double(cfg, "flow.poly_sigma", rc.flow.poly_sigma);
  rc.flow.frame_stride = config_int(cfg, "flow.stride", rc.flow.frame_stride);
  rc.flow.validate();

  rc.detector.k = config_double(cfg, "detector.k", rc.detector.k);
  rc.detector.warmup = config_double(cfg, "detector.warmup", rc.detector.warmup);
  rc.detector.sigma_floor = config_double(cfg, "detector.sigma_floor", rc.detector.sigma_floor);
  rc.detector.motion_epsilon =
      config_double(cfg, "detector.motion_epsilon", rc.detector.motion_epsilon);
  const std::string channel = config_string(cfg, "detector.channel", "magnitude");
  if (channel == "vx") {
    rc.detector.channel = StatsChannel::vx;
  } else if (channel == "vy") {
    rc.detector.channel = StatsChannel::vy;
  } else if (channel == "magnitude") {
    rc.detector.channel = StatsChannel::magnitude;
  } else if (channel == "all") {
    rc.detector.channel = StatsChannel::magnitude;
    rc.detector.per_channel_or = true;
  } else {
    throw ConfigError("detector.channel must be vx, vy, magnitude, or all");
  }
  rc.detector.min_cells = config_int(cfg, "detector.min_cells", rc.detector.min_cells);
  rc.detector.adapt = config_bool(cfg, "detector.adapt", rc.detector.adapt);
  rc.detector.use_objects = config_bool(cfg, "detector.use_objects", rc.detector.use_objects);
  rc.detector.p_rare = config_double(cfg, "detector.p_rare", rc.detector.p_rare);
  rc.detector.min_total = config_int(cfg, "detector.min_total", rc.detector.min_total);
  rc.detector.validate();

  rc.num_classes = config_int(cfg, "objects.classes", rc.num_classes);
  if (rc.num_classes < 1) throw ConfigError("objects.classes must be >= 1");
  rc.score_threshold = config_double(cfg, "objects.score_threshold", rc.score_threshold);
  if (!(rc.score_threshold >= 0.0 && rc.score_threshold <= 1.0))
    throw ConfigError("objects.score_threshold must lie in [0, 1]");
  const std::string names = config_string(cfg, "objects.class_names", "");
  if (!names.empty()) {
    std::istringstream ns(names);
    std::string name;
    while (std::getline(ns, name, ',')) rc.class_names.push_back(trim(name));
    if (static_cast<int>(rc.class_names.size()) != rc.num_classes)
      throw ConfigError("objects.class_names lists " + std::to_string(rc.class_names.size()) +
                        " names for " + std::to_string(rc.num_classes) + " classes");
  }

  if (rc.detector.use_objects && rc.detections_file.empty())
    throw ConfigError("detector.use_objects requires run.detections");
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  return run_config_from(load_config_file(file));
}

std::string run_config_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "frames = " << cfg.frames_dir.string() << "\n";
  out << "pattern = " << cfg.frame_pattern << "\n";
  if (!cfg.detections_file.empty()) out << "detections = " << cfg.detections_file.string() << "\n";
  if (!cfg.truth_file.empty()) out << "truth = " << cfg.truth_file.string() << "\n";
  out << "out = " << cfg.out_dir.string() << "\n";
  out << "cache = " << (cfg.cache ? "true" : "false") << "\n";
  out << "cell_maps = " << (cfg.write_cell_maps ? "true" : "false") << "\n";
  out << "\n[flow]\n";
  out << "levels = " << cfg.flow.pyramid_levels << "\n";
  out << "scale = " << fmt_double(cfg.flow.pyramid_scale) << "\n";
  out << "window = " << cfg.flow.window_size << "\n";
  out << "iterations = " << cfg.flow.iterations << "\n";
  out << "poly_n = " << cfg.flow.poly_n << "\n";
  out << "poly_sigma = " << fmt_double(cfg.flow.poly_sigma) << "\n";
  out << "stride = " << cfg.flow.frame_stride << "\n";
  out << "\n[detector]\n";
  out << "k = " << fmt_double(cfg.detector.k) << "\n";
  out << "warmup = " << fmt_double(cfg.detector.warmup) << "\n";
  out << "sigma_floor = " << fmt_double(cfg.detector.sigma_floor) << "\n";
  out << "motion_epsilon = " << fmt_double(cfg.detector.motion_epsilon) << "\n";
  const char* channel = cfg.detector.per_channel_or
                            ? "all"
                            : (cfg.detector.channel == StatsChannel::vx
                                   ? "vx"
                                   : (cfg.detector.channel == StatsChannel::vy ? "vy"
                                                                               : "magnitude"));
  out << "channel = " << channel << "\n";
  out << "min_cells = " << cfg.detector.min_cells << "\n";
  out << "adapt = " << (cfg.detector.adapt ? "true" : "false") << "\n";
  out << "use_objects = " << (cfg.detector.use_objects ? "true" : "false") << "\n";
  out << "p_rare = " << fmt_double(cfg.detector.p_rare) << "\n";
  out << "min_total = " << cfg.detector.min_total << "\n";
  out << "\n[objects]\n";
  out << "classes = " << cfg.num_classes << "\n";
  out << "score_threshold = " << fmt_double(cfg.score_threshold) << "\n";
  if (!cfg.class_names.empty()) {
    out << "class_names = ";
    for (std::size_t i = 0; i < cfg.class_names.size(); ++i)
      out << (i ? "," : "") << cfg.class_names[i];
    out << "\n";
  }
  return out.str();
}

SceneSpec scene_spec_from(const ConfigMap& cfg) {
  check_known_keys(cfg, "scene",
                   {"width", "height", "frames", "walkers", "walker_speed", "noise_sigma", "seed",
                    "intruder", "intruder_entry", "intruder_exit", "intruder_speed",
                    "intruder_dir_x", "intruder_dir_y"});
  SceneSpec spec;
  spec.width = config_int(cfg, "scene.width", spec.width);
  spec.height = config_int(cfg, "scene.height", spec.height);
  spec.frames = config_int(cfg, "scene.frames", spec.frames);
  spec.walkers = config_int(cfg, "scene.walkers", spec.walkers);
  spec.walker_speed = config_double(cfg, "scene.walker_speed", spec.walker_speed);
  spec.noise_sigma = config_double(cfg, "scene.noise_sigma", spec.noise_sigma);
  spec.seed = static_cast<std::uint64_t>(config_int(cfg, "scene.seed", 1));
  if (config_bool(cfg, "scene.intruder", false)) {
    IntruderSpec in;
    in.entry = config_int(cfg, "scene.intruder_entry", in.entry);
    in.exit = config_int(cfg, "scene.intruder_exit", in.exit);
    in.speed = config_double(cfg, "scene.intruder_speed", in.speed);
    in.dir_x = config_double(cfg, "scene.intruder_dir_x", in.dir_x);
    in.dir_y = config_double(cfg, "scene.intruder_dir_y", in.dir_y);
    spec.intruder = in;
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path& file) {
  return scene_spec_from(load_config_file(file));
}

}  // namespace aad
