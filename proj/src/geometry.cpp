// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/geometry.hpp"

#include <cmath>

namespace roadbev {

double wrap_angle(double a) {
  if (!std::isfinite(a)) {
    throw NonFiniteError("wrap_angle: angle is not finite");
  }
  // Result in (-pi, pi], congruent to a modulo 2*pi.
  double r = a - kTwoPi * std::ceil((a - kPi) / kTwoPi);
  if (r <= -kPi) r += kTwoPi;  // guards against rounding at the seam
  if (r > kPi) r -= kTwoPi;
  return r;
}

double display_angle(double a) {
  double w = wrap_angle(a);
  return w < 0.0 ? w + kTwoPi : w;
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  const double ortho_err =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (!(ortho_err <= 1e-9)) {
    throw ValidationError(
        "RigidTransform: rotation is not orthonormal (max |R^T R - I| = " +
        std::to_string(ortho_err) + ")");
  }
  const double det = rotation.determinant();
  if (!(std::abs(det - 1.0) <= 1e-9)) {
    throw ValidationError("RigidTransform: rotation determinant is " +
                          std::to_string(det) + ", expected +1");
  }
  if (!translation.allFinite()) {
    throw ValidationError("RigidTransform: translation is not finite");
  }
}

RigidTransform RigidTransform::rotation_z(double angle) {
  double c;
  double s;
  if (angle == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (angle == kHalfPi) {
    c = 0.0;
    s = 1.0;
  } else if (angle == -kHalfPi) {
    c = 0.0;
    s = -1.0;
  } else if (angle == kPi || angle == -kPi) {
    c = -1.0;
    s = 0.0;
  } else {
    c = std::cos(angle);
    s = std::sin(angle);
  }
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return RigidTransform(r, Eigen::Vector3d::Zero());
}

RigidTransform RigidTransform::inverse() const {
  Eigen::Matrix3d rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation() * b.rotation(),
                        a.rotation() * b.translation() + a.translation());
}

bool exactly_equal(const RigidTransform& a, const RigidTransform& b) {
  return a.rotation() == b.rotation() && a.translation() == b.translation();
}

void PinholeIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ValidationError("PinholeIntrinsics: focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw ValidationError("PinholeIntrinsics: image size must be >= 1x1");
  }
  if (!(cx >= 0.0 && cx < static_cast<double>(width)) ||
      !(cy >= 0.0 && cy < static_cast<double>(height))) {
    throw ValidationError(
        "PinholeIntrinsics: principal point must lie inside the image");
  }
}

std::optional<Projection> project(const CameraModel& cam,
                                  const Eigen::Vector3d& world_point) {
  const Eigen::Vector3d p = cam.world_to_camera.apply(world_point);
  if (p.z() <= 1e-6) return std::nullopt;
  const auto& k = cam.intrinsics;
  Projection out;
  out.pixel =
      Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
  out.depth = p.z();
  return out;
}

Eigen::Vector3d unproject(const CameraModel& cam, const Eigen::Vector2d& pixel,
                          double depth) {
  const auto& k = cam.intrinsics;
  const Eigen::Vector3d p_cam((pixel.x() - k.cx) / k.fx * depth,
                              (pixel.y() - k.cy) / k.fy * depth, depth);
  return cam.world_to_camera.inverse().apply(p_cam);
}

double camera_yaw_in_frame(const CameraModel& cam,
                           const RigidTransform& frame) {
  const Eigen::Vector3d axis_frame = frame.rotate(cam.optical_axis_world());
  const double horizontal = std::hypot(axis_frame.x(), axis_frame.y());
  // sin(1 deg): axis closer to vertical than this has no usable heading.
  if (horizontal < 0.017452406437283512) {
    throw DegeneratePose(
        "camera_yaw_in_frame: optical axis within 1 degree of vertical");
  }
  return wrap_angle(std::atan2(axis_frame.y(), axis_frame.x()));
}

CategoryGroup group_of(Category c) {
  switch (c) {
    case Category::kCar:
    case Category::kVan:
    case Category::kBus:
    case Category::kTruck:
      return CategoryGroup::kVehicle;
    case Category::kCyclist:
    case Category::kMotorcyclist:
    case Category::kTricyclist:
      return CategoryGroup::kCyclist;
    case Category::kPedestrian:
      return CategoryGroup::kPedestrian;
  }
  throw ValidationError("group_of: unknown category");
}

std::string to_string(Category c) {
  switch (c) {
    case Category::kCar: return "car";
    case Category::kVan: return "van";
    case Category::kBus: return "bus";
    case Category::kTruck: return "truck";
    case Category::kCyclist: return "cyclist";
    case Category::kMotorcyclist: return "motorcyclist";
    case Category::kTricyclist: return "tricyclist";
    case Category::kPedestrian: return "pedestrian";
  }
  throw ValidationError("to_string: unknown category");
}

Category category_from_string(const std::string& name) {
  if (name == "car") return Category::kCar;
  if (name == "van") return Category::kVan;
  if (name == "bus") return Category::kBus;
  if (name == "truck") return Category::kTruck;
  if (name == "cyclist") return Category::kCyclist;
  if (name == "motorcyclist") return Category::kMotorcyclist;
  if (name == "tricyclist") return Category::kTricyclist;
  if (name == "pedestrian") return Category::kPedestrian;
  throw ValidationError("unknown category name: " + name);
}

Box3D::Box3D(const Eigen::Vector3d& center_, const Eigen::Vector3d& dims_,
             double yaw_, Category category_)
    : center(center_), dims(dims_), yaw(wrap_angle(yaw_)), category(category_) {
  validate();
}

void Box3D::validate() const {
  if (!(dims.x() > 0.0 && dims.y() > 0.0 && dims.z() > 0.0)) {
    throw ValidationError("Box3D: dims must be strictly positive");
  }
  if (!center.allFinite() || !std::isfinite(yaw)) {
    throw ValidationError("Box3D: center/yaw must be finite");
  }
  if (!(yaw > -kPi && yaw <= kPi)) {
    throw ValidationError("Box3D: yaw must be wrapped to (-pi, pi]");
  }
}

std::array<Eigen::Vector3d, 8> Box3D::corners() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hl = dims.x() / 2.0;
  const double hw = dims.y() / 2.0;
  const double hh = dims.z() / 2.0;
  std::array<Eigen::Vector3d, 8> out;
  int i = 0;
  for (double z : {-hh, hh}) {
    for (auto [lx, ly] : {std::pair{-hl, -hw}, std::pair{hl, -hw},
                          std::pair{hl, hw}, std::pair{-hl, hw}}) {
      out[i++] = center + Eigen::Vector3d(c * lx - s * ly, s * lx + c * ly, z);
    }
  }
  return out;
}

}  // namespace roadbev
