// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roadbev/io.hpp"

namespace roadbev {

void DetectionSet::validate() const {
  std::set<std::string> frame_ids;
  for (const auto& frame : frames) {
    if (!frame_ids.insert(frame.frame_id).second) {
      throw ValidationError("DetectionSet: duplicate frame_id " +
                            frame.frame_id);
    }
    for (const auto& det : frame.objects) {
      det.box.validate();
      if (!(det.score >= 0.0 && det.score <= 1.0) ||
          !std::isfinite(det.score)) {
        throw ValidationError("DetectionSet: score must be finite in [0, 1]");
      }
    }
  }
}

namespace {

double planar_distance(const Box3D& a, const Box3D& b) {
  return std::hypot(a.center.x() - b.center.x(), a.center.y() - b.center.y());
}

// Score-descending det order with index tie-break, so matching is total and
// deterministic.
std::vector<int> score_order(const std::vector<Detection>& dets) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[static_cast<std::size_t>(a)].score >
           dets[static_cast<std::size_t>(b)].score;
  });
  return order;
}

}  // namespace

MatchResult match(const std::vector<Detection>& dets,
                  const std::vector<Detection>& gts, double threshold) {
  MatchResult result;
  std::vector<bool> gt_taken(gts.size(), false);
  std::vector<bool> det_matched(dets.size(), false);
  for (int det_index : score_order(dets)) {
    const auto& det = dets[static_cast<std::size_t>(det_index)];
    int best = -1;
    double best_dist = threshold;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g]) continue;
      const double d = planar_distance(det.box, gts[g].box);
      if (d <= best_dist && (best < 0 || d < best_dist)) {
        best = static_cast<int>(g);
        best_dist = d;
      }
    }
    if (best >= 0) {
      gt_taken[static_cast<std::size_t>(best)] = true;
      det_matched[static_cast<std::size_t>(det_index)] = true;
      result.pairs.emplace_back(det_index, best);
    }
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!det_matched[i]) result.unmatched_dets.push_back(static_cast<int>(i));
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_taken[g]) result.unmatched_gts.push_back(static_cast<int>(g));
  }
  return result;
}

namespace {

// Aligned-center, aligned-yaw 3D IoU: per-axis min over the dims.
double aligned_iou(const Box3D& a, const Box3D& b) {
  const double inter = std::min(a.dims.x(), b.dims.x()) *
                       std::min(a.dims.y(), b.dims.y()) *
                       std::min(a.dims.z(), b.dims.z());
  const double va = a.dims.prod();
  const double vb = b.dims.prod();
  return inter / (va + vb - inter);
}

double yaw_error(double a, double b) {
  const double d = std::abs(wrap_angle(a - b));
  return d;  // in [0, pi]; a pi flip counts as the full pi error
}

struct ScoredFlag {
  double score;
  bool tp;
};

// Average precision for one category at one distance threshold, nuScenes
// style: 101-point interpolated precision, recall and precision clipped at
// 0.1, normalized by 1/0.9.
double average_precision(const std::vector<ScoredFlag>& flags, int num_gts) {
  if (num_gts == 0) return 0.0;
  std::vector<ScoredFlag> sorted = flags;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredFlag& a, const ScoredFlag& b) {
                     return a.score > b.score;
                   });
  std::vector<double> recall;
  std::vector<double> precision;
  int tp = 0;
  int fp = 0;
  for (const auto& f : sorted) {
    f.tp ? ++tp : ++fp;
    recall.push_back(static_cast<double>(tp) / num_gts);
    precision.push_back(static_cast<double>(tp) / (tp + fp));
  }

  auto precision_at = [&](double r) -> double {
    if (recall.empty()) return 0.0;
    if (r > recall.back()) return 0.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - recall.begin());
    if (i == 0 || recall[i] == r) return precision[i];
    const double r0 = recall[i - 1];
    const double r1 = recall[i];
    const double t = (r - r0) / (r1 - r0);
    return precision[i - 1] + t * (precision[i] - precision[i - 1]);
  };

  // Clip first, normalize once: a perfect detector lands on exactly 1.0.
  double acc = 0.0;
  for (int k = 11; k <= 100; ++k) {
    acc += std::max(precision_at(k / 100.0), 0.1);
  }
  return (acc / 90.0 - 0.1) / 0.9;
}

}  // namespace

MetricsReport compute_metrics(const DetectionSet& dets, const DetectionSet& gts,
                              const MetricsConfig& config) {
  dets.validate();
  gts.validate();
  if (config.ap_thresholds.empty() || !(config.tp_threshold > 0.0)) {
    throw ValidationError("MetricsConfig: thresholds must be positive");
  }

  // Frames are paired by frame_id; a detection frame without ground truth
  // counts only false positives.
  std::map<std::string, const DetectionFrame*> gt_by_frame;
  for (const auto& frame : gts.frames) gt_by_frame[frame.frame_id] = &frame;
  std::map<std::string, const DetectionFrame*> det_by_frame;
  for (const auto& frame : dets.frames) det_by_frame[frame.frame_id] = &frame;

  std::set<Category> categories;
  for (const auto& frame : gts.frames) {
    for (const auto& gt : frame.objects) categories.insert(gt.box.category);
  }

  MetricsReport report;
  report.ap_thresholds = config.ap_thresholds;

  std::set<std::string> all_frame_ids;
  for (const auto& [id, _] : gt_by_frame) all_frame_ids.insert(id);
  for (const auto& [id, _] : det_by_frame) all_frame_ids.insert(id);

  for (Category category : categories) {
    CategoryMetrics cm;
    auto select = [category](const DetectionFrame* frame) {
      std::vector<Detection> out;
      if (frame) {
        for (const auto& d : frame->objects) {
          if (d.box.category == category) out.push_back(d);
        }
      }
      return out;
    };

    for (const auto& frame : gts.frames) {
      for (const auto& gt : frame.objects) {
        if (gt.box.category == category) ++cm.num_gts;
      }
    }

    for (double threshold : config.ap_thresholds) {
      std::vector<ScoredFlag> flags;
      for (const auto& frame_id : all_frame_ids) {
        auto dit = det_by_frame.find(frame_id);
        auto git = gt_by_frame.find(frame_id);
        const std::vector<Detection> frame_dets =
            select(dit == det_by_frame.end() ? nullptr : dit->second);
        const std::vector<Detection> frame_gts =
            select(git == gt_by_frame.end() ? nullptr : git->second);
        const MatchResult m = match(frame_dets, frame_gts, threshold);
        std::vector<bool> is_tp(frame_dets.size(), false);
        for (const auto& [di, gi] : m.pairs) {
          is_tp[static_cast<std::size_t>(di)] = true;
        }
        for (std::size_t i = 0; i < frame_dets.size(); ++i) {
          flags.push_back({frame_dets[i].score, is_tp[i] != 0});
        }
      }
      cm.ap.push_back(average_precision(flags, cm.num_gts));
    }
    cm.mean_ap = std::accumulate(cm.ap.begin(), cm.ap.end(), 0.0) /
                 static_cast<double>(cm.ap.size());

    // True-positive errors over matches at the TP threshold; a category with
    // ground truth but no matches gets the worst clipped error of 1.
    double ate_sum = 0.0;
    double ase_sum = 0.0;
    double aoe_sum = 0.0;
    for (const auto& frame_id : all_frame_ids) {
      auto dit = det_by_frame.find(frame_id);
      auto git = gt_by_frame.find(frame_id);
      const std::vector<Detection> frame_dets =
          select(dit == det_by_frame.end() ? nullptr : dit->second);
      const std::vector<Detection> frame_gts =
          select(git == gt_by_frame.end() ? nullptr : git->second);
      const MatchResult m = match(frame_dets, frame_gts, config.tp_threshold);
      for (const auto& [di, gi] : m.pairs) {
        const auto& det = frame_dets[static_cast<std::size_t>(di)];
        const auto& gt = frame_gts[static_cast<std::size_t>(gi)];
        ate_sum += planar_distance(det.box, gt.box);
        ase_sum += 1.0 - aligned_iou(det.box, gt.box);
        aoe_sum += yaw_error(det.box.yaw, gt.box.yaw);
        ++cm.num_tps;
      }
    }
    if (cm.num_tps > 0) {
      cm.ate = ate_sum / cm.num_tps;
      cm.ase = ase_sum / cm.num_tps;
      cm.aoe = aoe_sum / cm.num_tps;
    } else {
      cm.ate = cm.ase = cm.aoe = 1.0;
    }

    report.per_category.emplace(category, std::move(cm));
  }

  if (!report.per_category.empty()) {
    const auto n = static_cast<double>(report.per_category.size());
    for (const auto& [cat, cm] : report.per_category) {
      report.mean_ap += cm.mean_ap;
      report.mean_ate += cm.ate;
      report.mean_ase += cm.ase;
      report.mean_aoe += cm.aoe;
    }
    report.mean_ap /= n;
    report.mean_ate /= n;
    report.mean_ase /= n;
    report.mean_aoe /= n;
    const double tp_score = (1.0 - std::min(1.0, report.mean_ate)) +
                            (1.0 - std::min(1.0, report.mean_ase)) +
                            (1.0 - std::min(1.0, report.mean_aoe));
    report.nds = (5.0 * report.mean_ap + tp_score) / 8.0;
  }
  return report;
}

// ---------------------------------------------------------------------------
// File I/O and report rendering

namespace {

using json = nlohmann::ordered_json;

json box_to_json(const Detection& det, bool with_score) {
  json j;
  j["id"] = det.id;
  j["category"] = to_string(det.box.category);
  j["center"] = {det.box.center.x(), det.box.center.y(), det.box.center.z()};
  j["dims"] = {det.box.dims.x(), det.box.dims.y(), det.box.dims.z()};
  j["yaw"] = det.box.yaw;
  if (with_score) j["score"] = det.score;
  return j;
}

}  // namespace

std::string detections_to_json(const DetectionSet& set) {
  json j;
  json frames = json::array();
  for (const auto& frame : set.frames) {
    json jf;
    jf["frame_id"] = frame.frame_id;
    json objs = json::array();
    for (const auto& det : frame.objects) objs.push_back(box_to_json(det, true));
    jf["objects"] = std::move(objs);
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);
  return j.dump(2) + "\n";
}

DetectionSet detections_from_json(const std::string& text,
                                  const std::string& context) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("frames") || !j["frames"].is_array()) {
    throw ParseError(context + ": expected an object with a 'frames' array");
  }
  DetectionSet set;
  for (std::size_t fi = 0; fi < j["frames"].size(); ++fi) {
    const json& jf = j["frames"][fi];
    const std::string ctx = context + ".frames[" + std::to_string(fi) + "]";
    if (!jf.is_object() || !jf.contains("frame_id") ||
        !jf.contains("objects") || !jf["objects"].is_array()) {
      throw ParseError(ctx + ": expected frame_id and an objects array");
    }
    DetectionFrame frame;
    frame.frame_id = jf["frame_id"].get<std::string>();
    for (std::size_t oi = 0; oi < jf["objects"].size(); ++oi) {
      const json& jo = jf["objects"][oi];
      const std::string octx = ctx + ".objects[" + std::to_string(oi) + "]";
      for (const char* key : {"id", "category", "center", "dims", "yaw"}) {
        if (!jo.contains(key)) {
          throw ParseError(octx + ": missing field '" + key + "'");
        }
      }
      if (!jo["center"].is_array() || jo["center"].size() != 3 ||
          !jo["dims"].is_array() || jo["dims"].size() != 3) {
        throw ParseError(octx + ": center and dims must be arrays of 3");
      }
      Detection det;
      det.id = jo["id"].get<std::string>();
      try {
        det.box = Box3D(
            Eigen::Vector3d(jo["center"][0].get<double>(),
                            jo["center"][1].get<double>(),
                            jo["center"][2].get<double>()),
            Eigen::Vector3d(jo["dims"][0].get<double>(),
                            jo["dims"][1].get<double>(),
                            jo["dims"][2].get<double>()),
            jo["yaw"].get<double>(),
            category_from_string(jo["category"].get<std::string>()));
      } catch (const ValidationError& e) {
        throw ValidationError(octx + ": " + e.what());
      }
      det.score = jo.contains("score") ? jo["score"].get<double>() : 1.0;
      frame.objects.push_back(std::move(det));
    }
    set.frames.push_back(std::move(frame));
  }
  set.validate();
  return set;
}

void save_detections(const DetectionSet& set,
                     const std::filesystem::path& path) {
  write_file(path, detections_to_json(set));
}

DetectionSet load_detections(const std::filesystem::path& path) {
  return detections_from_json(read_file(path), path.string());
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string report_to_table(const MetricsReport& report) {
  std::ostringstream out;
  out << "category      ";
  for (double t : report.ap_thresholds) {
    char head[32];
    std::snprintf(head, sizeof(head), "AP@%-5.1f ", t);
    out << head;
  }
  out << "ATE     ASE     AOE\n";
  for (const auto& [cat, cm] : report.per_category) {
    char name[32];
    std::snprintf(name, sizeof(name), "%-13s ", to_string(cat).c_str());
    out << name;
    for (double ap : cm.ap) out << fixed3(ap) << "    ";
    out << fixed3(cm.ate) << "   " << fixed3(cm.ase) << "   " << fixed3(cm.aoe)
        << "\n";
  }
  out << "\n";
  out << "mAP  = " << fixed3(report.mean_ap) << "\n";
  out << "mATE = " << fixed3(report.mean_ate) << " m\n";
  out << "mASE = " << fixed3(report.mean_ase) << "\n";
  out << "mAOE = " << fixed3(report.mean_aoe) << " rad\n";
  out << "NDS  = " << fixed3(report.nds) << "\n";
  return out.str();
}

std::string report_to_keyvalues(const MetricsReport& report) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [cat, cm] : report.per_category) {
    const std::string name = to_string(cat);
    for (std::size_t i = 0; i < cm.ap.size(); ++i) {
      out << "metric." << name << ".ap." << report.ap_thresholds[i] << " = "
          << cm.ap[i] << "\n";
    }
    out << "metric." << name << ".ate = " << cm.ate << "\n";
    out << "metric." << name << ".ase = " << cm.ase << "\n";
    out << "metric." << name << ".aoe = " << cm.aoe << "\n";
    out << "metric." << name << ".num_gts = " << cm.num_gts << "\n";
    out << "metric." << name << ".num_tps = " << cm.num_tps << "\n";
  }
  out << "metric.mean.map = " << report.mean_ap << "\n";
  out << "metric.mean.mate = " << report.mean_ate << "\n";
  out << "metric.mean.mase = " << report.mean_ase << "\n";
  out << "metric.mean.maoe = " << report.mean_aoe << "\n";
  out << "metric.mean.nds = " << report.nds << "\n";
  return out.str();
}

}  // namespace roadbev
