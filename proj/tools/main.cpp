// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0
//
// roadbev: batch CLI for the multi-camera roadside BEV geometry engine.
// Every command is deterministic given --seed and independent of --threads.
// Exit codes: 0 ok, 2 usage, 3 generation, 4 validation, 5 I/O.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roadbev/ambiguity.hpp"
#include "roadbev/augmentation.hpp"
#include "roadbev/features.hpp"
#include "roadbev/io.hpp"
#include "roadbev/mapping.hpp"
#include "roadbev/metrics.hpp"
#include "roadbev/render.hpp"
#include "roadbev/rng.hpp"
#include "roadbev/scene.hpp"

namespace {

using namespace roadbev;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_range(const std::string& text,
                                      const char* flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw UsageError(std::string(flag) + " expects lo:hi");
  }
  try {
    const double lo = std::stod(text.substr(0, colon));
    const double hi = std::stod(text.substr(colon + 1));
    return {lo, hi};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + ": cannot parse '" + text + "'");
  }
}

std::vector<double> parse_csv(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

bool parse_switch(const std::string& text, const char* flag) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw UsageError(std::string(flag) + " expects on|off, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct GridFlags {
  int nx = 200;
  int ny = 200;
  std::string x_range = "-80:80";
  std::string y_range = "-80:80";
  std::string z_samples = "0,1,2,3";

  void attach(CLI::App* cmd) {
    cmd->add_option("--nx", nx, "grid cells along x");
    cmd->add_option("--ny", ny, "grid cells along y");
    cmd->add_option("--x-range", x_range, "x extent in meters, lo:hi");
    cmd->add_option("--y-range", y_range, "y extent in meters, lo:hi");
    cmd->add_option("--z-samples", z_samples,
                    "pillar sample heights in meters, comma separated");
  }

  BevGridSpec to_spec() const {
    BevGridSpec grid;
    grid.nx = nx;
    grid.ny = ny;
    std::tie(grid.x_min, grid.x_max) = parse_range(x_range, "--x-range");
    std::tie(grid.y_min, grid.y_max) = parse_range(y_range, "--y-range");
    grid.z_samples = parse_csv(z_samples, "--z-samples");
    grid.validate();
    return grid;
  }
};

RoiMask load_roi(const SceneConfig& scene, const fs::path& scene_path,
                 const std::string& roi_dir, bool* any) {
  RoiMask roi;
  *any = false;
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    fs::path path;
    if (!roi_dir.empty()) {
      path = fs::path(roi_dir) / (scene.cameras[i].camera_id + ".pgm");
    } else if (!scene.roi_refs.empty() && !scene.roi_refs[i].empty()) {
      path = scene_path.parent_path() / scene.roi_refs[i];
    }
    if (!path.empty() && fs::exists(path)) {
      roi.per_camera.push_back(load_pgm(path));
      *any = true;
    } else {
      roi.per_camera.push_back(std::nullopt);
    }
  }
  return roi;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_gen_scene(std::uint64_t seed, int cameras, const std::string& layout,
                  int objects, const std::string& pole_height,
                  const std::string& mix, int max_cameras,
                  const std::string& out) {
  if (cameras < 1) {
    throw UsageError("camera count must be >= 1 (got " +
                     std::to_string(cameras) + ")");
  }
  if (out.empty()) throw UsageError("--out is required");
  SyntheticSceneSpec spec;
  spec.seed = seed;
  spec.num_cameras = cameras;
  spec.layout = layout_from_string(layout);
  spec.num_objects = objects;
  std::tie(spec.pole_height_min, spec.pole_height_max) =
      parse_range(pole_height, "--pole-height");
  const std::vector<double> m = parse_csv(mix, "--mix");
  if (m.size() != 3) throw UsageError("--mix expects vehicle,cyclist,pedestrian");
  spec.object_mix = {m[0], m[1], m[2]};
  spec.max_cameras = max_cameras;

  const SceneConfig scene = generate_synthetic_scene(spec);
  save_scene(scene, out);
  std::cout << "scene_id = " << scene.scene_id << "\n"
            << "cameras = " << scene.cameras.size() << "\n"
            << "objects = " << scene.objects.size() << "\n";
  return 0;
}

int cmd_build_mapping(const std::string& scene_path, const GridFlags& grid_flags,
                      const std::string& cam_mask_bits,
                      const std::string& roi_dir, int threads,
                      const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  const SceneConfig scene = load_scene(scene_path);
  const BevGridSpec grid = grid_flags.to_spec();
  const CamMask mask = cam_mask_bits.empty()
                           ? CamMask::all_on(scene.cameras.size())
                           : CamMask::from_bitstring(cam_mask_bits);
  bool any_roi = false;
  const RoiMask roi = load_roi(scene, scene_path, roi_dir, &any_roi);

  const MappingTable table =
      build_mapping(scene, grid, mask, any_roi ? &roi : nullptr, threads);
  save_mapping(table, out);

  const CoverageStats stats = coverage_stats(table);
  std::ostringstream report;
  report.precision(17);
  report << "cells_with_hits = " << stats.cells_with_hits << "\n"
         << "empty_cell_fraction = " << stats.empty_cell_fraction << "\n"
         << "total_hits = " << table.total_hits() << "\n";
  for (std::size_t i = 0; i < stats.hits_per_camera.size(); ++i) {
    report << "hits_per_camera." << scene.cameras[i].camera_id << " = "
           << stats.hits_per_camera[i] << "\n";
  }
  std::cout << report.str();
  return 0;
}

int cmd_augment(const std::string& scene_path, std::uint64_t seed,
                double max_translation, const std::string& psi_mode,
                const std::string& out, const std::string& record_path) {
  if (out.empty()) throw UsageError("--out is required");
  const SceneConfig scene = load_scene(scene_path);
  AugmentationRanges ranges;
  ranges.max_translation = max_translation;
  if (psi_mode == "uniform") {
    ranges.psi_mode = PsiMode::kUniform;
  } else if (psi_mode == "right-angles") {
    ranges.psi_mode = PsiMode::kRightAngles;
  } else {
    throw UsageError("--psi-mode expects uniform|right-angles");
  }
  Rng rng(Rng::mix(seed, 0x41554731ull));
  const BevAugmentation aug = sample_augmentation(rng, ranges);
  const SceneConfig augmented = apply_augmentation(scene, aug);
  save_scene(augmented, out);

  std::ostringstream record;
  record.precision(17);
  record << "delta_x = " << aug.delta_xy.x() << "\n"
         << "delta_y = " << aug.delta_xy.y() << "\n"
         << "delta_psi = " << aug.delta_psi << "\n"
         << "delta_psi_display = " << display_angle(aug.delta_psi) << "\n";
  if (!record_path.empty()) write_file(record_path, record.str());
  std::cout << record.str();
  return 0;
}

int cmd_aggregate(const std::string& scene_path, const std::string& mapping_path,
                  const std::string& features_dir, std::int64_t synth_seed,
                  int channels, double stride, const std::string& embedding,
                  std::uint64_t embedding_seed, const std::string& encoding,
                  int threads, const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  const SceneConfig scene = load_scene(scene_path);
  const MappingTable table = load_mapping(mapping_path);

  std::vector<FeatureMap> maps;
  if (!features_dir.empty()) {
    for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
      const fs::path path =
          fs::path(features_dir) / (scene.cameras[i].camera_id + ".fmap");
      if (!fs::exists(path)) continue;
      FeatureMap f = load_feature_map(path);
      f.camera_index = static_cast<int>(i);
      maps.push_back(std::move(f));
    }
    if (maps.empty()) {
      throw UsageError("--features-dir contains no <camera_id>.fmap files");
    }
  } else {
    if (synth_seed < 0) {
      throw UsageError("either --features-dir or --synth-features is required");
    }
    for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
      const auto& k = scene.cameras[i].intrinsics;
      const int w = std::max(1, static_cast<int>(std::lround(k.width / stride)));
      const int h = std::max(1, static_cast<int>(std::lround(k.height / stride)));
      if (std::abs(w * stride - k.width) > 1e-9 ||
          std::abs(h * stride - k.height) > 1e-9) {
        throw UsageError("--stride must divide the image size " +
                         std::to_string(k.width) + "x" +
                         std::to_string(k.height));
      }
      maps.push_back(make_synthetic_feature_map(
          static_cast<std::uint64_t>(synth_seed), static_cast<int>(i), channels,
          h, w, stride));
    }
  }

  RotationEmbeddingTable etab;
  AggregateOptions options;
  options.use_rotation_embedding = parse_switch(embedding, "--rotation-embedding");
  options.use_position_encoding = parse_switch(encoding, "--position-encoding");
  options.threads = threads;
  if (options.use_rotation_embedding) {
    etab = make_rotation_embedding_table(embedding_seed, maps.front().channels);
    options.embedding_table = &etab;
  }

  const BevFeature bev = aggregate(maps, table, scene, options);
  save_bev_feature(bev, out);

  std::int64_t covered = 0;
  for (auto h : bev.hit_count) covered += h > 0 ? 1 : 0;
  std::cout << "channels = " << bev.channels << "\n"
            << "grid = " << bev.nx << "x" << bev.ny << "\n"
            << "covered_cells = " << covered << "\n";
  return 0;
}

int cmd_ambiguity_demo(const std::string& variant_name,
                       const std::string& embedding,
                       std::uint64_t embedding_seed, std::uint64_t features_seed,
                       const std::string& out, const std::string& svg_path) {
  const AmbiguityVariant variant = ambiguity_variant_from_string(variant_name);
  const bool enabled = parse_switch(embedding, "--embedding");
  const AmbiguityReport report =
      run_ambiguity_experiment(variant, enabled, embedding_seed, features_seed);
  const std::string text = report_to_text(report);
  std::cout << text;
  if (!out.empty()) write_file(out, text);
  if (!svg_path.empty()) write_file(svg_path, render_ambiguity_svg(variant));
  return 0;
}

int cmd_evaluate(const std::string& dets_path, const std::string& gts_path,
                 const std::string& thresholds, double tp_threshold,
                 const std::string& out) {
  const DetectionSet dets = load_detections(dets_path);
  const DetectionSet gts = load_detections(gts_path);
  MetricsConfig config;
  config.ap_thresholds = parse_csv(thresholds, "--thresholds");
  config.tp_threshold = tp_threshold;
  const MetricsReport report = compute_metrics(dets, gts, config);
  std::cout << report_to_table(report);
  if (!out.empty()) write_file(out, report_to_keyvalues(report));
  return 0;
}

int cmd_render(const std::string& input, const std::string& style,
               double circle_spacing, const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  RenderOptions options;
  options.circle_spacing = circle_spacing;

  // Pick the source kind from the file itself; --style selects the view.
  const std::string bytes = read_file(input);
  const bool is_bmap = bytes.rfind("BMAP", 0) == 0;
  const bool is_bevf = bytes.rfind("BEVF", 0) == 0;

  if (is_bmap) {
    if (style != "hits" && style != "auto") {
      throw UsageError("mapping files render with --style hits");
    }
    save_ppm(render_hits_ppm(deserialize_mapping(bytes, input)), out);
    return 0;
  }
  if (is_bevf) {
    if (style != "feature-norm" && style != "auto") {
      throw UsageError("BEV feature files render with --style feature-norm");
    }
    save_ppm(render_feature_norm_ppm(deserialize_bev_feature(bytes, input)), out);
    return 0;
  }
  // JSON: a scene or a detection set
  if (bytes.find("\"frames\"") != std::string::npos) {
    if (style != "detections" && style != "auto") {
      throw UsageError("detection files render with --style detections");
    }
    write_file(out, render_detections_svg(detections_from_json(bytes, input),
                                          options));
    return 0;
  }
  // Scene files carry boxes too, so both views apply.
  if (style != "scene" && style != "detections" && style != "auto") {
    throw UsageError("scene files render with --style scene or detections");
  }
  write_file(out, render_scene_svg(scene_from_json(bytes, input), options));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "roadbev: multi-camera roadside BEV geometry engine\n"
      "Synthetic scenes, masked 2D-3D mapping tables, BEV-frame augmentation,\n"
      "camera-rotation embedding, orientation-ambiguity demos, and 3D "
      "detection metrics."};
  app.require_subcommand(1);

  // gen-scene
  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene file");
  std::uint64_t gen_seed = 0;
  int gen_cameras = 4;
  std::string gen_layout = "corridor";
  int gen_objects = 10;
  std::string gen_pole = "6:15";
  std::string gen_mix = "0.6,0.2,0.2";
  int gen_max_cameras = SceneConfig::kDefaultMaxCameras;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "generator seed (u64)");
  gen->add_option("--cameras", gen_cameras, "number of cameras (1..max-cameras)");
  gen->add_option("--layout", gen_layout, "site layout")
      ->check(CLI::IsMember({"corridor", "intersection"}));
  gen->add_option("--objects", gen_objects, "number of objects")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--pole-height", gen_pole, "camera height range in meters, lo:hi");
  gen->add_option("--mix", gen_mix,
                  "vehicle,cyclist,pedestrian proportions (comma separated)");
  gen->add_option("--max-cameras", gen_max_cameras,
                  "maximum supported camera count");
  gen->add_option("--out", gen_out, "output scene file (JSON)");

  // build-mapping
  auto* build = app.add_subcommand(
      "build-mapping", "project grid reference points into the cameras");
  std::string build_scene;
  GridFlags build_grid;
  std::string build_cam_mask;
  std::string build_roi_dir;
  int build_threads = 0;
  std::string build_out;
  build->add_option("--scene", build_scene, "scene file")->required();
  build_grid.attach(build);
  build->add_option("--cam-mask", build_cam_mask,
                    "camera activation bitstring, e.g. 1011");
  build->add_option("--roi-dir", build_roi_dir,
                    "directory of <camera_id>.pgm ROI masks");
  build->add_option("--threads", build_threads, "worker threads (0 = auto)");
  build->add_option("--out", build_out, "output mapping file (BMAP)");

  // augment
  auto* aug = app.add_subcommand("augment",
                                 "apply a random BEV-frame augmentation");
  std::string aug_scene;
  std::uint64_t aug_seed = 0;
  double aug_max_translation = 10.0;
  std::string aug_psi_mode = "uniform";
  std::string aug_out;
  std::string aug_record;
  aug->add_option("--scene", aug_scene, "scene file")->required();
  aug->add_option("--seed", aug_seed, "sampling seed (u64)");
  aug->add_option("--max-translation", aug_max_translation,
                  "translation disk radius in meters");
  aug->add_option("--psi-mode", aug_psi_mode, "rotation sampling mode")
      ->check(CLI::IsMember({"uniform", "right-angles"}));
  aug->add_option("--out", aug_out, "output scene file (JSON)");
  aug->add_option("--record", aug_record,
                  "also write the applied augmentation to this file");

  // aggregate
  auto* agg = app.add_subcommand(
      "aggregate", "mean-pool camera features into a dense BEV tensor");
  std::string agg_scene;
  std::string agg_mapping;
  std::string agg_features_dir;
  std::int64_t agg_synth = -1;
  int agg_channels = 16;
  double agg_stride = 16.0;
  std::string agg_embedding = "off";
  std::uint64_t agg_embedding_seed = 1;
  std::string agg_encoding = "on";
  int agg_threads = 0;
  std::string agg_out;
  agg->add_option("--scene", agg_scene, "scene file")->required();
  agg->add_option("--mapping", agg_mapping, "mapping file (BMAP)")->required();
  agg->add_option("--features-dir", agg_features_dir,
                  "directory of <camera_id>.fmap feature maps");
  agg->add_option("--synth-features", agg_synth,
                  "generate synthetic feature maps from this seed");
  agg->add_option("--channels", agg_channels,
                  "channels for synthetic feature maps");
  agg->add_option("--stride", agg_stride,
                  "image pixels per feature pixel for synthetic maps");
  agg->add_option("--rotation-embedding", agg_embedding,
                  "add the camera rotation embedding, on|off");
  agg->add_option("--embedding-seed", agg_embedding_seed,
                  "seed of the embedding table (u64)");
  agg->add_option("--position-encoding", agg_encoding,
                  "add the per-cell position encoding, on|off");
  agg->add_option("--threads", agg_threads, "worker threads (0 = auto)");
  agg->add_option("--out", agg_out, "output BEV feature file (BEVF)");

  // ambiguity-demo
  auto* demo = app.add_subcommand(
      "ambiguity-demo",
      "reproduce the single-cell orientation ambiguity and its resolution");
  std::string demo_variant = "pedestrian";
  std::string demo_embedding = "off";
  std::uint64_t demo_embedding_seed = 1;
  std::uint64_t demo_features_seed = 7;
  std::string demo_out;
  std::string demo_svg;
  demo->add_option("--variant", demo_variant, "obstacle variant")
      ->check(CLI::IsMember({"pedestrian", "vehicle"}));
  demo->add_option("--embedding", demo_embedding,
                   "camera rotation embedding, on|off");
  demo->add_option("--embedding-seed", demo_embedding_seed,
                   "embedding table seed (u64)");
  demo->add_option("--features-seed", demo_features_seed,
                   "synthetic feature seed (u64)");
  demo->add_option("--out", demo_out, "also write the report to this file");
  demo->add_option("--svg", demo_svg, "write a two-panel diagram (SVG)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate",
                                  "score detections against ground truth");
  std::string eval_dets;
  std::string eval_gts;
  std::string eval_thresholds = "0.5,1,2,4";
  double eval_tp_threshold = 2.0;
  std::string eval_out;
  eval->add_option("--dets", eval_dets, "detections file (JSON)")->required();
  eval->add_option("--gts", eval_gts, "ground-truth file (JSON)")->required();
  eval->add_option("--thresholds", eval_thresholds,
                   "AP match thresholds in meters, comma separated");
  eval->add_option("--tp-threshold", eval_tp_threshold,
                   "true-positive threshold in meters");
  eval->add_option("--out", eval_out,
                   "also write the key/value report to this file");

  // render
  auto* render = app.add_subcommand("render",
                                    "render a scene, mapping, feature, or "
                                    "detection file to PPM/SVG");
  std::string render_input;
  std::string render_style = "auto";
  double render_circles = 100.0;
  std::string render_out;
  render->add_option("--input", render_input, "input file")->required();
  render->add_option("--style", render_style, "view style")
      ->check(CLI::IsMember({"auto", "scene", "hits", "detections",
                             "feature-norm"}));
  render->add_option("--circle-spacing", render_circles,
                     "range circle spacing in meters");
  render->add_option("--out", render_out, "output file (.ppm or .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "roadbev: kind=usage message=\"" << e.what() << "\""
              << std::endl;
    return 2;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen_scene(gen_seed, gen_cameras, gen_layout, gen_objects,
                           gen_pole, gen_mix, gen_max_cameras, gen_out);
    }
    if (build->parsed()) {
      return cmd_build_mapping(build_scene, build_grid, build_cam_mask,
                               build_roi_dir, build_threads, build_out);
    }
    if (aug->parsed()) {
      return cmd_augment(aug_scene, aug_seed, aug_max_translation, aug_psi_mode,
                         aug_out, aug_record);
    }
    if (agg->parsed()) {
      return cmd_aggregate(agg_scene, agg_mapping, agg_features_dir, agg_synth,
                           agg_channels, agg_stride, agg_embedding,
                           agg_embedding_seed, agg_encoding, agg_threads,
                           agg_out);
    }
    if (demo->parsed()) {
      return cmd_ambiguity_demo(demo_variant, demo_embedding,
                                demo_embedding_seed, demo_features_seed,
                                demo_out, demo_svg);
    }
    if (eval->parsed()) {
      return cmd_evaluate(eval_dets, eval_gts, eval_thresholds,
                          eval_tp_threshold, eval_out);
    }
    if (render->parsed()) {
      return cmd_render(render_input, render_style, render_circles, render_out);
    }
    std::cerr << "roadbev: kind=usage message=\"no command\"" << std::endl;
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "roadbev: kind=usage message=\"" << e.what() << "\""
              << std::endl;
    return 2;
  } catch (const InfeasibleLayout& e) {
    std::cerr << "roadbev: kind=generation message=\"" << e.what() << "\""
              << std::endl;
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "roadbev: kind=parse message=\"" << e.what() << "\""
              << std::endl;
    return 5;
  } catch (const IoError& e) {
    std::cerr << "roadbev: kind=io message=\"" << e.what() << "\"" << std::endl;
    return 5;
  } catch (const ValidationError& e) {
    std::cerr << "roadbev: kind=validation message=\"" << e.what() << "\""
              << std::endl;
    return 4;
  } catch (const Error& e) {
    std::cerr << "roadbev: kind=validation message=\"" << e.what() << "\""
              << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "roadbev: kind=internal message=\"" << e.what() << "\""
              << std::endl;
    return 1;
  }
}
