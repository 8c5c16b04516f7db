// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/augmentation.hpp"

#include <cmath>

namespace roadbev {

void AugmentationRanges::validate() const {
  if (!(max_translation >= 0.0) || !std::isfinite(max_translation)) {
    throw ValidationError("AugmentationRanges: max_translation must be >= 0");
  }
}

AugmentationRanges AugmentationRanges::for_grid(const BevGridSpec& grid,
                                                PsiMode mode) {
  AugmentationRanges r;
  r.max_translation =
      0.25 * std::min(grid.x_max - grid.x_min, grid.y_max - grid.y_min);
  r.psi_mode = mode;
  return r;
}

namespace {
// Exact quarter-turn angles; wrap_angle maps 3*pi/2 onto -pi/2.
const double kRightAngles[4] = {0.0, kHalfPi, kPi, -kHalfPi};
}  // namespace

BevAugmentation sample_augmentation(Rng& rng,
                                    const AugmentationRanges& ranges) {
  ranges.validate();
  // sqrt keeps the translation uniform over the disk, not clustered at the
  // center.
  const double radius = ranges.max_translation * std::sqrt(rng.next_double());
  const double phi = rng.uniform(-kPi, kPi);
  const Eigen::Vector2d xy(radius * std::cos(phi), radius * std::sin(phi));

  double psi = 0.0;
  if (ranges.psi_mode == PsiMode::kRightAngles) {
    psi = kRightAngles[rng.next_below(4)];
  } else {
    psi = wrap_angle(rng.uniform(-kPi, kPi));
  }
  return BevAugmentation(xy, psi);
}

SceneConfig apply_augmentation(const SceneConfig& scene,
                               const BevAugmentation& aug) {
  const RigidTransform motion_inv = aug.frame_motion().inverse();
  SceneConfig out = scene;
  out.bev_frame = compose(motion_inv, scene.bev_frame);
  for (auto& obj : out.objects) {
    obj.box.center = motion_inv.apply(obj.box.center);
    obj.box.yaw = wrap_angle(obj.box.yaw - aug.delta_psi);
  }
  return out;
}

BevAugmentation compose_augmentations(const BevAugmentation& second,
                                      const BevAugmentation& first) {
  // Coordinate maps stack as m = m_second o m_first with m = h^-1, so the
  // combined frame motion is h_first o h_second.
  const RigidTransform h = compose(first.frame_motion(), second.frame_motion());
  return BevAugmentation(Eigen::Vector2d(h.translation().x(), h.translation().y()),
                         first.delta_psi + second.delta_psi);
}

}  // namespace roadbev
