// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "roadbev/mapping.hpp"
#include "roadbev/rng.hpp"
#include "roadbev/scene.hpp"

namespace roadbev {

// An SE(2) motion of the BEV coordinate frame: the frame itself is moved by
// (delta_xy, delta_psi), so coordinates of fixed world points transform by
// the inverse. World geometry (cameras, object world poses) never changes;
// only the frame and the BEV-frame labels are rewritten.
struct BevAugmentation {
  Eigen::Vector2d delta_xy = Eigen::Vector2d::Zero();  // meters
  double delta_psi = 0.0;  // radians about the vertical axis, (-pi, pi]

  BevAugmentation() = default;
  BevAugmentation(const Eigen::Vector2d& xy, double psi)
      : delta_xy(xy), delta_psi(wrap_angle(psi)) {}

  bool is_identity() const {
    return delta_xy.x() == 0.0 && delta_xy.y() == 0.0 && delta_psi == 0.0;
  }

  // The frame motion h: coordinates of the new frame -> coordinates of the
  // old frame. Right-angle delta_psi values produce exact 0/+-1 rotation
  // entries, keeping quarter-turn augmentations bit-reproducible.
  RigidTransform frame_motion() const {
    return compose(RigidTransform::translation_of(
                       Eigen::Vector3d(delta_xy.x(), delta_xy.y(), 0.0)),
                   RigidTransform::rotation_z(delta_psi));
  }
};

enum class PsiMode { kUniform, kRightAngles };

struct AugmentationRanges {
  double max_translation = 0.0;  // meters; translation drawn from this disk
  PsiMode psi_mode = PsiMode::kUniform;

  void validate() const;
  // Default policy: translations up to a quarter of the smaller grid extent,
  // so augmented grids still overlap the camera frusta.
  static AugmentationRanges for_grid(const BevGridSpec& grid,
                                     PsiMode mode = PsiMode::kUniform);
};

// Deterministic for a given rng stream: translation uniform over the disk of
// radius max_translation, rotation per psi_mode.
BevAugmentation sample_augmentation(Rng& rng, const AugmentationRanges& ranges);

// Rewrites bev_frame and the BEV-frame object labels; cameras and every
// world-frame quantity are untouched. Labels: center' = h^,-1(center),
// yaw' = wrap(yaw - delta_psi).
SceneConfig apply_augmentation(const SceneConfig& scene,
                               const BevAugmentation& aug);

// Single augmentation equivalent to applying `first`, then `second`.
BevAugmentation compose_augmentations(const BevAugmentation& second,
                                      const BevAugmentation& first);

}  // namespace roadbev
