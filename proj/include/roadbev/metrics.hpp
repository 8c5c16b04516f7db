// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "roadbev/geometry.hpp"

namespace roadbev {

struct Detection {
  std::string id;
  Box3D box;          // BEV frame
  double score = 1.0;  // confidence in [0, 1]
};

struct DetectionFrame {
  std::string frame_id;
  std::vector<Detection> objects;
};

struct DetectionSet {
  std::vector<DetectionFrame> frames;

  void validate() const;
};

// One-to-one greedy matching: detections in descending score order, each
// taking the nearest unmatched ground truth within the planar center-distance
// threshold. Indices refer to the input vectors.
struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (det index, gt index)
  std::vector<int> unmatched_dets;
  std::vector<int> unmatched_gts;
};

MatchResult match(const std::vector<Detection>& dets,
                  const std::vector<Detection>& gts, double threshold);

struct MetricsConfig {
  std::vector<double> ap_thresholds{0.5, 1.0, 2.0, 4.0};  // meters
  double tp_threshold = 2.0;                              // meters
};

struct CategoryMetrics {
  std::vector<double> ap;  // aligned with MetricsConfig::ap_thresholds
  double mean_ap = 0.0;
  double ate = 0.0;  // meters
  double ase = 0.0;  // 1 - aligned IoU
  double aoe = 0.0;  // radians, [0, pi]
  int num_gts = 0;
  int num_tps = 0;  // matches at tp_threshold
};

// Composite report. NDS folds mAP and the three clipped TP errors with
// weights 5:1:1:1 (normalization 1/8); only categories with ground truth
// contribute to the means.
struct MetricsReport {
  std::vector<double> ap_thresholds;
  std::map<Category, CategoryMetrics> per_category;
  double mean_ap = 0.0;
  double mean_ate = 0.0;
  double mean_ase = 0.0;
  double mean_aoe = 0.0;
  double nds = 0.0;
};

MetricsReport compute_metrics(const DetectionSet& dets, const DetectionSet& gts,
                              const MetricsConfig& config = {});

// Detection files share the scene-object schema plus a score field:
// {"frames": [{"frame_id", "objects": [{id, category, center, dims, yaw,
// score}]}]}. score defaults to 1 when absent (ground-truth files).
std::string detections_to_json(const DetectionSet& set);
DetectionSet detections_from_json(const std::string& text,
                                  const std::string& context = "<memory>");
void save_detections(const DetectionSet& set, const std::filesystem::path& path);
DetectionSet load_detections(const std::filesystem::path& path);

// Aligned-column table and machine-readable key/value renderings.
std::string report_to_table(const MetricsReport& report);
std::string report_to_keyvalues(const MetricsReport& report);

}  // namespace roadbev
