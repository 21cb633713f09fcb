#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aad/detector.hpp"
#include "aad/optical_flow.hpp"
#include "aad/synthetic.hpp"

namespace aad {

// Flat view of an INI-style config: "section.key" -> raw value string.
// Grammar: [section] headers, key = value lines, #/; comments, blank lines.
using ConfigMap = std::map<std::string, std::string>;

// Throws ConfigError naming the offending line.
ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::filesystem::path& file);

// Typed lookups; each throws ConfigError naming the key on a bad value.
std::string config_string(const ConfigMap& cfg, const std::string& key,
                          const std::string& fallback);
int config_int(const ConfigMap& cfg, const std::string& key, int fallback);
double config_double(const ConfigMap& cfg, const std::string& key, double fallback);
bool config_bool(const ConfigMap& cfg, const std::string& key, bool fallback);

// Fully resolved pipeline run description.
struct RunConfig {
  std::filesystem::path frames_dir;       // [run] frames (required)
  std::string frame_pattern = "*.pgm";    // [run] pattern
  std::filesystem::path detections_file;  // [run] detections (optional)
  std::filesystem::path truth_file;       // [run] truth (optional)
  std::filesystem::path out_dir = "out";  // [run] out
  bool cache = true;                      // [run] cache
  bool write_cell_maps = false;           // [run] cell_maps: per-frame label PGMs
  FlowParams flow;                        // [flow] section
  DetectorConfig detector;                // [detector] section
  int num_classes = 21;                   // [objects] classes
  double score_threshold = 0.8;           // [objects] score_threshold
  std::vector<std::string> class_names;   // [objects] class_names (comma-separated)
};

// Builds a RunConfig, applying defaults and validating: referenced paths must
// exist, unknown keys in owned sections are rejected, use_objects requires a
// detections file. Paths are made absolute so the config can be re-read from
// another working directory.
RunConfig run_config_from(const ConfigMap& cfg);
RunConfig load_run_config(const std::filesystem::path& file);

// Serializes every resolved value back to config text (round-trippable).
std::string run_config_text(const RunConfig& cfg);

// [scene] section -> SceneSpec (intruder enabled via intruder = true).
SceneSpec scene_spec_from(const ConfigMap& cfg);
SceneSpec load_scene_spec(const std::filesystem::path& file);

}  // namespace aad
