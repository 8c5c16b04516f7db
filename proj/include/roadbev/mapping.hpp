// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roadbev/scene.hpp"

namespace roadbev {

// Dense BEV grid over the ground plane of the BEV frame, with a pillar of
// sample heights per cell.
struct BevGridSpec {
  int nx = 1;
  int ny = 1;
  double x_min = -1.0, x_max = 1.0;  // meters, BEV frame
  double y_min = -1.0, y_max = 1.0;
  std::vector<double> z_samples{0.0, 1.0, 2.0, 3.0};  // meters, increasing

  void validate() const;
  double cell_dx() const { return (x_max - x_min) / nx; }
  double cell_dy() const { return (y_max - y_min) / ny; }
  std::int64_t cell_count() const {
    return static_cast<std::int64_t>(nx) * ny;
  }
  // Center of cell (ix, iy); throws IndexOutOfRange.
  Eigen::Vector2d cell_center(int ix, int iy) const;
  // Cell containing a BEV-frame point, or nullopt outside the grid.
  std::optional<std::pair<int, int>> cell_of(double x, double y) const;
};

bool operator==(const BevGridSpec& a, const BevGridSpec& b);

// Per-camera activation flags, aligned with SceneConfig camera order.
struct CamMask {
  std::vector<std::uint8_t> active;

  static CamMask all_on(std::size_t n) {
    return CamMask{std::vector<std::uint8_t>(n, 1)};
  }
  static CamMask from_bitstring(const std::string& bits);
  void validate(std::size_t num_cameras) const;
  std::uint64_t digest() const;
};

// Binary region-of-interest bitmap at image resolution; 255 = inside.
struct RoiBitmap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, height x width

  // Nearest-pixel lookup, edge-clamped; inside means the byte equals 255.
  bool inside(double u, double v) const;
  RoiBitmap intersect(const RoiBitmap& other) const;
};

RoiBitmap load_pgm(const std::filesystem::path& path);
RoiBitmap pgm_from_bytes(std::string_view bytes, const std::string& context);
void save_pgm(const RoiBitmap& bitmap, const std::filesystem::path& path);
std::string pgm_to_bytes(const RoiBitmap& bitmap);

// Optional per-camera ROI bitmaps. An empty entry means "everything inside".
struct RoiMask {
  std::vector<std::optional<RoiBitmap>> per_camera;

  void validate(const std::vector<CameraModel>& cameras) const;
  std::uint64_t digest() const;
};

// One reference-point observation: grid cell -> (camera, pixel, height level).
struct MappingHit {
  std::uint16_t camera_index = 0;
  std::uint16_t z_level = 0;
  double u = 0.0;
  double v = 0.0;
};

inline bool operator==(const MappingHit& a, const MappingHit& b) {
  return a.camera_index == b.camera_index && a.z_level == b.z_level &&
         a.u == b.u && a.v == b.v;
}

struct ReferencePoint {
  int ix = 0, iy = 0, iz = 0;
  Eigen::Vector3d point;  // BEV frame
};

// Materializes all nx*ny*|z_samples| pillar points (small grids only; the
// mapping builder iterates lazily).
std::vector<ReferencePoint> reference_points(const BevGridSpec& spec);
std::int64_t reference_point_count(const BevGridSpec& spec);

// The masked 2D-3D mapping: per cell, every (camera, pixel, z level) whose
// reference point lands in front of an active camera, inside the image, and
// inside the camera's ROI. Hit lists are sorted by (camera_index, z_level) so
// two tables can be compared bit for bit.
struct MappingTable {
  BevGridSpec grid;
  int num_cameras = 0;
  std::vector<std::vector<MappingHit>> cells;  // index iy * nx + ix

  std::string scene_id;
  std::uint64_t scene_digest = 0;
  std::uint64_t cam_mask_digest = 0;
  std::uint64_t roi_mask_digest = 0;

  const std::vector<MappingHit>& cell(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy) * grid.nx + ix];
  }
  std::int64_t total_hits() const;
};

// Builds the mapping table. roi may be null (no ROI filtering anywhere).
// Deterministic and independent of the worker count.
MappingTable build_mapping(const SceneConfig& scene, const BevGridSpec& spec,
                           const CamMask& cam_mask,
                           const RoiMask* roi = nullptr, int threads = 0);

struct CoverageStats {
  std::int64_t cells_with_hits = 0;
  std::vector<std::int64_t> hits_per_camera;
  double empty_cell_fraction = 0.0;
};

CoverageStats coverage_stats(const MappingTable& table);

// Binary "BMAP" format, little-endian, bit-exact across platforms. Layout:
//   magic "BMAP", version u32, nx u32, ny u32, n_z u32, n_cameras u32,
//   x_min f64, x_max f64, y_min f64, y_max f64, z_samples n_z x f64,
//   scene_digest u64, cam_mask_digest u64, roi_mask_digest u64,
//   per-cell hit counts u32 (row-major, iy outer),
//   hit records {camera_index u16, z_level u16, u f64, v f64} in cell order.
std::string serialize_mapping(const MappingTable& table);
MappingTable deserialize_mapping(std::string_view bytes,
                                 const std::string& context = "<memory>");
void save_mapping(const MappingTable& table, const std::filesystem::path& path);
MappingTable load_mapping(const std::filesystem::path& path);

}  // namespace roadbev
