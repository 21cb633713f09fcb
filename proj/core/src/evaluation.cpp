#include "aad/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aad/errors.hpp"

namespace aad {

Confusion confusion(const std::vector<int>& pred, const std::vector<int>& truth,
                    int eval_start) {
  if (pred.size() != truth.size())
    throw ShapeError("prediction length " + std::to_string(pred.size()) +
                     " vs truth length " + std::to_string(truth.size()));
  Confusion c;
  for (std::size_t i = std::max(eval_start, 0); i < pred.size(); ++i) {
    if (truth[i]) {
      pred[i] ? ++c.tp : ++c.fn;
    } else {
      pred[i] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

std::vector<int> load_frame_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    if (token == "0") {
      labels.push_back(0);
    } else if (token == "1") {
      labels.push_back(1);
    } else {
      throw FormatError("labels line " + std::to_string(line_no) + ": expected 0 or 1, got '" +
                        token + "'");
    }
  }
  return labels;
}

std::vector<RocPoint> roc_sweep(const SequenceRun& run, const std::vector<int>& truth,
                                std::vector<double> k_values, const DetectorConfig& base,
                                bool frozen) {
  if (k_values.empty()) throw ConfigError("k sweep needs at least one value");
  for (double k : k_values)
    if (!(k > 0.0)) throw ConfigError("k sweep values must be positive");
  if (static_cast<int>(truth.size()) != run.frame_count)
    throw ShapeError("truth has " + std::to_string(truth.size()) + " labels for " +
                     std::to_string(run.frame_count) + " frames");
  std::sort(k_values.begin(), k_values.end());

  std::vector<RocPoint> points;
  for (double k : k_values) {
    DetectorConfig cfg = base;
    cfg.k = k;
    if (frozen) cfg.adapt = false;  // one shared statistics trajectory
    const DetectionResult res = run_detection(run, cfg);

    std::vector<int> pred(res.maps.size()), frame_truth(res.maps.size());
    for (std::size_t i = 0; i < res.maps.size(); ++i) {
      pred[i] = res.maps[i].frame_flag ? 1 : 0;
      frame_truth[i] = truth[static_cast<std::size_t>(res.targets[i])];
    }
    // eval_start == -1 means no cell ever warmed up: nothing is evaluated.
    const int start = res.eval_start < 0 ? static_cast<int>(pred.size()) : res.eval_start;
    const Confusion c = confusion(pred, frame_truth, start);

    RocPoint p;
    p.k = k;
    p.tp = c.tp;
    p.fp = c.fp;
    p.tn = c.tn;
    p.fn = c.fn;
    p.tpr = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    p.fpr = c.fp + c.tn > 0 ? static_cast<double>(c.fp) / (c.fp + c.tn) : 0.0;
    points.push_back(p);
  }
  return points;
}

double auc(const std::vector<RocPoint>& points) {
  if (points.empty()) throw StateError("AUC needs at least one ROC point");
  std::vector<std::pair<double, double>> curve;  // (fpr, tpr)
  curve.reserve(points.size() + 2);
  curve.emplace_back(0.0, 0.0);
  for (const RocPoint& p : points) curve.emplace_back(p.fpr, p.tpr);
  curve.emplace_back(1.0, 1.0);
  std::sort(curve.begin(), curve.end());

  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += 0.5 * (curve[i].first - curve[i - 1].first) * (curve[i].second + curve[i - 1].second);
  }
  return area;
}

std::string roc_csv_text(const std::vector<RocPoint>& points, double auc_value) {
  std::string out = "k,tp,fp,tn,fn,tpr,fpr\n";
  char buf[160];
  for (const RocPoint& p : points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%ld,%ld,%ld,%ld,%.9g,%.9g\n", p.k, p.tp, p.fp, p.tn,
                  p.fn, p.tpr, p.fpr);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "# auc=%.9g\n", auc_value);
  out += buf;
  return out;
}

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& points,
                   double auc_value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << roc_csv_text(points, auc_value);
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace aad
