#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aad/pipeline.hpp"

namespace aad {

struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;

  bool operator==(const Confusion&) const = default;
};

// One operating point of the k sweep.
struct RocPoint {
  double k = 0.0;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double tpr = 0.0;  // tp / (tp + fn), 0 when undefined
  double fpr = 0.0;  // fp / (fp + tn), 0 when undefined
};

// Frame-level counts over indices >= eval_start (entries before it are the
// cold-start frames and stay out of every bucket). Labels are 0/1.
// Throws ShapeError on length mismatch.
Confusion confusion(const std::vector<int>& pred, const std::vector<int>& truth,
                    int eval_start = 0);

// One 0/1 token per line; blank lines are skipped. Throws FormatError naming
// the line on anything else.
std::vector<int> load_frame_labels(const std::filesystem::path& path);

// Runs detection per k over the same SequenceRun and reduces each to a
// RocPoint against per-frame truth (length == run.frame_count). frozen=true
// disables adaptation so every k shares one statistics trajectory, making
// tpr/fpr exactly non-increasing in k; frozen=false replays the full
// adaptive pipeline per k. Points come back sorted by k ascending.
std::vector<RocPoint> roc_sweep(const SequenceRun& run, const std::vector<int>& truth,
                                std::vector<double> k_values, const DetectorConfig& base,
                                bool frozen = true);

// Trapezoidal area under (fpr, tpr) with (0,0) and (1,1) appended, points
// sorted by fpr. Throws StateError when no points are given.
double auc(const std::vector<RocPoint>& points);

// CSV: header "k,tp,fp,tn,fn,tpr,fpr", one row per point, then a trailing
// "# auc=<value>" comment line.
std::string roc_csv_text(const std::vector<RocPoint>& points, double auc_value);
void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& points,
                   double auc_value);

}  // namespace aad
