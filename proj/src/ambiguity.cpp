// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/ambiguity.hpp"

#include <cmath>
#include <sstream>

#include "roadbev/render.hpp"

namespace roadbev {

namespace {

// Construction constants. The obstacle sits at the world origin; cameras A
// and B stand a quarter turn apart on the circle around it, so the frame
// change "origin camera A -> origin camera B, rotated pi/2" has its fixed
// point exactly at the obstacle.
constexpr double kCameraDistance = 10.0;  // meters from the obstacle
constexpr double kCameraHeight = 8.0;     // meters
constexpr int kChannels = 16;
constexpr int kFeatureHeight = 34;
constexpr int kFeatureWidth = 60;
constexpr double kFeatureStride = 16.0;  // image 960 x 544

CameraModel make_camera(const std::string& id, const Eigen::Vector3d& position,
                        const Eigen::Vector3d& look_at) {
  const Eigen::Vector3d forward = (look_at - position).normalized();
  const Eigen::Vector3d z = forward;
  const Eigen::Vector3d x = z.cross(Eigen::Vector3d::UnitZ()).normalized();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d cam_to_world;
  cam_to_world.col(0) = x;
  cam_to_world.col(1) = y;
  cam_to_world.col(2) = z;
  const Eigen::Matrix3d r = cam_to_world.transpose();

  CameraModel cam;
  cam.camera_id = id;
  cam.intrinsics = {1000.0, 1000.0, 480.0, 272.0, 960, 544};
  cam.world_to_camera = RigidTransform(r, -(r * position));
  return cam;
}

double frame_heading(const RigidTransform& frame) {
  return std::atan2(frame.rotation()(1, 0), frame.rotation()(0, 0));
}

// Ordered cell positions along the obstacle axis, rear to front.
std::vector<std::pair<int, int>> object_block_cells(const Box3D& box,
                                                    const BevGridSpec& grid,
                                                    int span) {
  std::vector<std::pair<int, int>> cells;
  const double step = grid.cell_dx();
  const int m = span / 2;
  for (int k = -m; k <= m; ++k) {
    const double x = box.center.x() + k * step * std::cos(box.yaw);
    const double y = box.center.y() + k * step * std::sin(box.yaw);
    const auto cell = grid.cell_of(x, y);
    if (!cell) {
      throw ValidationError(
          "ambiguity: obstacle block leaves the grid; construction broken");
    }
    cells.push_back(*cell);
  }
  return cells;
}

}  // namespace

std::string to_string(AmbiguityVariant v) {
  return v == AmbiguityVariant::kPedestrian ? "pedestrian" : "vehicle";
}

AmbiguityVariant ambiguity_variant_from_string(const std::string& name) {
  if (name == "pedestrian") return AmbiguityVariant::kPedestrian;
  if (name == "vehicle") return AmbiguityVariant::kVehicle;
  throw ValidationError("unknown ambiguity variant: " + name);
}

BevGridSpec ambiguity_grid() {
  BevGridSpec grid;
  grid.nx = 25;
  grid.ny = 25;
  grid.x_min = -25.0;
  grid.x_max = 25.0;
  grid.y_min = -25.0;
  grid.y_max = 25.0;
  grid.z_samples = {0.0, 1.0, 2.0, 3.0};
  return grid;
}

SceneConfig build_ambiguity_scene(AmbiguityVariant variant, FrameChoice frame) {
  SceneConfig scene;
  scene.scene_id = "ambiguity-" + to_string(variant) + "-frame" +
                   (frame == FrameChoice::kA ? "A" : "B");

  // Fixed world geometry, shared by both frames.
  const Eigen::Vector3d obstacle_ground(0.0, 0.0, 0.0);
  const Eigen::Vector3d cam_a_pos(-kCameraDistance, 0.0, kCameraHeight);
  const Eigen::Vector3d cam_b_pos(0.0, kCameraDistance, kCameraHeight);
  scene.cameras.push_back(make_camera("camA", cam_a_pos, obstacle_ground));
  scene.cameras.push_back(make_camera("camB", cam_b_pos, obstacle_ground));

  // Frame A: origin at camera A's ground point, axes world-aligned. The
  // obstacle lands on the exact cell center (10, 0).
  const RigidTransform frame_a = RigidTransform::translation_of(
      Eigen::Vector3d(kCameraDistance, 0.0, 0.0));

  // Frame B = T o frame A with T a quarter turn about the obstacle's frame-A
  // coordinates; its origin works out to camera B's ground point.
  const Eigen::Vector3d pivot(kCameraDistance, 0.0, 0.0);
  const RigidTransform quarter_turn =
      compose(RigidTransform::translation_of(pivot),
              compose(RigidTransform::rotation_z(kHalfPi),
                      RigidTransform::translation_of(-pivot)));
  scene.bev_frame =
      frame == FrameChoice::kA ? frame_a : compose(quarter_turn, frame_a);

  const double world_yaw = kPi;  // display value pi in frame A
  const bool pedestrian = variant == AmbiguityVariant::kPedestrian;
  const Eigen::Vector3d dims = pedestrian ? Eigen::Vector3d(0.6, 0.6, 1.7)
                                          : Eigen::Vector3d(4.5, 1.9, 1.6);
  const Eigen::Vector3d center_world(0.0, 0.0, dims.z() / 2.0);

  SceneObject obj;
  obj.id = pedestrian ? "ped0" : "veh0";
  obj.box = Box3D(scene.bev_frame.apply(center_world), dims,
                  wrap_angle(world_yaw + frame_heading(scene.bev_frame)),
                  pedestrian ? Category::kPedestrian : Category::kCar);
  scene.objects.push_back(std::move(obj));

  scene.validate();
  return scene;
}

AmbiguityReport run_ambiguity_experiment(AmbiguityVariant variant,
                                         bool embedding_enabled,
                                         std::uint64_t embedding_seed,
                                         std::uint64_t features_seed) {
  const SceneConfig scene_a = build_ambiguity_scene(variant, FrameChoice::kA);
  const SceneConfig scene_b = build_ambiguity_scene(variant, FrameChoice::kB);
  const BevGridSpec grid = ambiguity_grid();

  const CamMask mask = CamMask::all_on(scene_a.cameras.size());
  const MappingTable table_a = build_mapping(scene_a, grid, mask);
  const MappingTable table_b = build_mapping(scene_b, grid, mask);

  // One synthetic feature map per camera, seeded by camera index only, so
  // both frames sample identical image features.
  std::vector<FeatureMap> features;
  for (int i = 0; i < static_cast<int>(scene_a.cameras.size()); ++i) {
    features.push_back(make_synthetic_feature_map(
        features_seed, i, kChannels, kFeatureHeight, kFeatureWidth,
        kFeatureStride));
  }

  const RotationEmbeddingTable table =
      make_rotation_embedding_table(embedding_seed, kChannels);
  AggregateOptions options;
  options.use_rotation_embedding = embedding_enabled;
  options.use_position_encoding = true;
  options.embedding_table = &table;

  const BevFeature bev_a = aggregate(features, table_a, scene_a, options);
  const BevFeature bev_b = aggregate(features, table_b, scene_b, options);

  AmbiguityReport report;
  report.variant = variant;
  report.embedding_enabled = embedding_enabled;
  report.cell_span = variant == AmbiguityVariant::kPedestrian ? 1 : 3;

  const auto cells_a =
      object_block_cells(scene_a.objects[0].box, grid, report.cell_span);
  const auto cells_b =
      object_block_cells(scene_b.objects[0].box, grid, report.cell_span);
  double distance = 0.0;
  for (std::size_t i = 0; i < cells_a.size(); ++i) {
    const Eigen::VectorXd va =
        bev_a.cell_vector(cells_a[i].first, cells_a[i].second);
    const Eigen::VectorXd vb =
        bev_b.cell_vector(cells_b[i].first, cells_b[i].second);
    distance = std::max(distance, (va - vb).cwiseAbs().maxCoeff());
  }
  report.feature_distance = distance;
  report.yaw_a = display_angle(scene_a.objects[0].box.yaw);
  report.yaw_b = display_angle(scene_b.objects[0].box.yaw);

  const bool yaws_differ =
      std::abs(wrap_angle(scene_a.objects[0].box.yaw -
                          scene_b.objects[0].box.yaw)) > 1e-12;
  report.resolved = yaws_differ ? (report.feature_distance > 1e-3) : true;

  std::ostringstream c;
  c << "cameras A(-" << kCameraDistance << ", 0) and B(0, " << kCameraDistance
    << ") at height " << kCameraHeight
    << " m; obstacle at the world origin, which is the fixed point of the "
       "frame change A->B (quarter turn about the vertical axis through the "
       "obstacle), so its cell index ("
    << cells_a[report.cell_span / 2].first << ", "
    << cells_a[report.cell_span / 2].second
    << ") and position encoding coincide across frames";
  report.construction = c.str();
  return report;
}

std::string report_to_text(const AmbiguityReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "variant = " << to_string(report.variant) << "\n";
  out << "embedding_enabled = " << (report.embedding_enabled ? "true" : "false")
      << "\n";
  out << "feature_distance = " << report.feature_distance << "\n";
  out << "yaw_frame_a = " << report.yaw_a << "\n";
  out << "yaw_frame_b = " << report.yaw_b << "\n";
  out << "cell_span = " << report.cell_span << "\n";
  out << "resolved = " << (report.resolved ? "true" : "false") << "\n";
  out << "construction = " << report.construction << "\n";
  return out.str();
}

std::string render_ambiguity_svg(AmbiguityVariant variant) {
  const SceneConfig a = build_ambiguity_scene(variant, FrameChoice::kA);
  const SceneConfig b = build_ambiguity_scene(variant, FrameChoice::kB);
  RenderOptions options;
  options.circle_spacing = 10.0;
  options.extent = 26.0;
  return render_two_panel_svg(a, "frame A (origin: camera A)", b,
                              "frame B (origin: camera B, quarter turn)",
                              options);
}

}  // namespace roadbev
