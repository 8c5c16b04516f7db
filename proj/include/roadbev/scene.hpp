// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadbev/geometry.hpp"

namespace roadbev {

struct SceneObject {
  std::string id;
  Box3D box;  // coordinates and yaw live in the BEV frame
};

// A full scene description: camera rig in world coordinates, the world->BEV
// frame, and labeled objects expressed in that BEV frame.
struct SceneConfig {
  static constexpr int kDefaultMaxCameras = 12;

  std::string scene_id;
  RigidTransform bev_frame;  // world -> BEV
  std::vector<CameraModel> cameras;
  // Optional per-camera ROI mask references (relative paths, PGM). Either
  // empty or one entry per camera; "" means no mask for that camera.
  std::vector<std::string> roi_refs;
  std::vector<SceneObject> objects;

  void validate(int max_cameras = kDefaultMaxCameras) const;
};

bool exactly_equal(const SceneConfig& a, const SceneConfig& b);

enum class SceneLayout { kIntersection, kCorridor };

std::string to_string(SceneLayout layout);
SceneLayout layout_from_string(const std::string& name);

// Category-group proportions for generated objects; normalized internally.
struct ObjectMix {
  double vehicle = 0.6;
  double cyclist = 0.2;
  double pedestrian = 0.2;
};

struct SyntheticSceneSpec {
  std::uint64_t seed = 0;
  int num_cameras = 4;
  double pole_height_min = 6.0;   // meters
  double pole_height_max = 15.0;  // meters
  SceneLayout layout = SceneLayout::kCorridor;
  int num_objects = 10;
  ObjectMix object_mix;
  int max_cameras = SceneConfig::kDefaultMaxCameras;

  void validate() const;
};

// Deterministic function of the spec (seed included): pole-mounted cameras
// pitched 15-60 degrees downward over the layout, objects dropped on the
// ground plane inside the union of camera frusta. Throws InfeasibleLayout if
// an object cannot be placed in view.
SceneConfig generate_synthetic_scene(const SyntheticSceneSpec& spec);

// Scene file I/O (JSON text, full-precision numbers; load(save(x)) == x).
std::string scene_to_json(const SceneConfig& scene);
SceneConfig scene_from_json(const std::string& text,
                            const std::string& context = "<memory>");
void save_scene(const SceneConfig& scene, const std::filesystem::path& path);
SceneConfig load_scene(const std::filesystem::path& path);

}  // namespace roadbev
