// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "roadbev/error.hpp"

namespace roadbev {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps a finite angle to (-pi, pi]. Throws NonFiniteError otherwise.
double wrap_angle(double a);

// Maps an internal angle to the [0, 2*pi) display convention used when
// printing orientation values. Arithmetic always stays in (-pi, pi].
double display_angle(double a);

// A proper rigid motion: p -> R p + t. The rotation is checked for
// orthonormality and determinant +1 (tolerance 1e-9) on construction.
class RigidTransform {
 public:
  RigidTransform()
      : rotation_(Eigen::Matrix3d::Identity()),
        translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);

  static RigidTransform identity() { return RigidTransform(); }

  // Rotation about the vertical (z) axis. Quarter-turn angles that are exact
  // doubles (0, +-pi/2, pi, -pi) produce matrices with exact 0/+-1 entries, so
  // right-angle frame changes stay bit-reproducible.
  static RigidTransform rotation_z(double angle);

  static RigidTransform translation_of(const Eigen::Vector3d& t) {
    return RigidTransform(Eigen::Matrix3d::Identity(), t);
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }
  Eigen::Vector3d rotate(const Eigen::Vector3d& d) const {
    return rotation_ * d;
  }
  RigidTransform inverse() const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Applies b, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

bool exactly_equal(const RigidTransform& a, const RigidTransform& b);

struct PinholeIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;   // pixels
  int height = 1;  // pixels

  void validate() const;
  bool contains(double u, double v) const {
    return u >= 0.0 && u < static_cast<double>(width) && v >= 0.0 &&
           v < static_cast<double>(height);
  }
};

struct CameraModel {
  PinholeIntrinsics intrinsics;
  RigidTransform world_to_camera;
  std::string camera_id;

  // Camera center in world coordinates (inverse image of the origin).
  Eigen::Vector3d center() const {
    return world_to_camera.inverse().translation();
  }
  // Optical axis (+z of the camera frame) expressed in world coordinates.
  Eigen::Vector3d optical_axis_world() const {
    return world_to_camera.rotation().transpose() * Eigen::Vector3d::UnitZ();
  }
};

struct Projection {
  Eigen::Vector2d pixel;  // (u, v), may lie outside image bounds
  double depth = 0.0;     // meters along the optical axis
};

// Projects a world point. Returns nullopt ("behind") when the point is at or
// behind the optical plane (z <= 1e-6 in camera coordinates). Visibility
// against image bounds is the caller's decision.
std::optional<Projection> project(const CameraModel& cam,
                                  const Eigen::Vector3d& world_point);

// Inverse of project for a given depth; counterpart used by round-trip tests
// and by the synthetic scene generator to drop objects onto pixel rays.
Eigen::Vector3d unproject(const CameraModel& cam, const Eigen::Vector2d& pixel,
                          double depth);

// Signed angle, about the frame's vertical axis, between the frame's x axis
// and the ground-plane projection of the camera's optical axis. Range
// (-pi, pi]. Throws DegeneratePose when the axis is within 1 degree of
// vertical.
double camera_yaw_in_frame(const CameraModel& cam, const RigidTransform& frame);

enum class Category {
  kCar,
  kVan,
  kBus,
  kTruck,
  kCyclist,
  kMotorcyclist,
  kTricyclist,
  kPedestrian,
};

enum class CategoryGroup { kVehicle, kCyclist, kPedestrian };

CategoryGroup group_of(Category c);
std::string to_string(Category c);
Category category_from_string(const std::string& name);

// An upright 3D box. Coordinates live in whatever frame the owner declares
// (scene objects use the BEV frame). Yaw is stored wrapped to (-pi, pi].
struct Box3D {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // meters
  Eigen::Vector3d dims = Eigen::Vector3d::Ones();    // length, width, height
  double yaw = 0.0;                                  // radians, (-pi, pi]
  Category category = Category::kCar;

  Box3D() = default;
  Box3D(const Eigen::Vector3d& center_, const Eigen::Vector3d& dims_,
        double yaw_, Category category_);

  void validate() const;

  // The 8 corners in the box's own frame, bottom face first.
  std::array<Eigen::Vector3d, 8> corners() const;
};

}  // namespace roadbev
