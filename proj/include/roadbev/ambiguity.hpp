// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "roadbev/features.hpp"
#include "roadbev/scene.hpp"

namespace roadbev {

// Executable reconstruction of the orientation-ambiguity construction: two
// fixed cameras, one obstacle, and two BEV frames related by a quarter-turn
// chosen so the obstacle sits at the fixed point of the frame change. Its
// cell index and position encoding then coincide across frames while the
// orientation label does not.
enum class AmbiguityVariant { kPedestrian, kVehicle };
enum class FrameChoice { kA, kB };

std::string to_string(AmbiguityVariant v);
AmbiguityVariant ambiguity_variant_from_string(const std::string& name);

// The grid both frames share: 25 x 25 cells over [-25, 25]^2 meters.
BevGridSpec ambiguity_grid();

// World geometry is identical for both frames; only bev_frame (and the
// BEV-frame labels derived from it) differs. Frame A sits at camera A's
// ground point, world-aligned; frame B sits at camera B's ground point,
// rotated a quarter turn about the vertical axis through the obstacle.
SceneConfig build_ambiguity_scene(AmbiguityVariant variant, FrameChoice frame);

struct AmbiguityReport {
  AmbiguityVariant variant = AmbiguityVariant::kPedestrian;
  bool embedding_enabled = false;
  // Infinity-norm distance between the obstacle's BEV feature block in the
  // two frames (single cell for the pedestrian, 3 cells for the vehicle).
  double feature_distance = 0.0;
  double yaw_a = 0.0;  // display convention [0, 2*pi)
  double yaw_b = 0.0;
  bool resolved = false;
  int cell_span = 1;  // cells occupied along the obstacle axis
  std::string construction;
};

// Builds both frames, synthesizes one deterministic feature map per camera
// (identical across frames), runs the mapping + aggregation pipeline, and
// compares the obstacle's feature block. Position encoding is always on;
// the rotation embedding is controlled by `embedding_enabled`.
AmbiguityReport run_ambiguity_experiment(AmbiguityVariant variant,
                                         bool embedding_enabled,
                                         std::uint64_t embedding_seed,
                                         std::uint64_t features_seed = 7);

std::string report_to_text(const AmbiguityReport& report);

// Two-panel SVG of the frame-A and frame-B views of the same world.
std::string render_ambiguity_svg(AmbiguityVariant variant);

}  // namespace roadbev
