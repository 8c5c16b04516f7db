// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "roadbev/mapping.hpp"

namespace roadbev {

// A per-camera 2D feature tensor (c, h, w). `stride` is image pixels per
// feature pixel; the map covers an image of size (w * stride, h * stride).
// Values are kept in double precision in memory; files store f32.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  int camera_index = 0;
  double stride = 1.0;
  std::vector<double> data;  // [(c * height + i) * width + j]

  double& at(int c, int i, int j) {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  double at(int c, int i, int j) const {
    return data[(static_cast<std::size_t>(c) * height + i) * width + j];
  }
  double image_width() const { return stride * width; }
  double image_height() const { return stride * height; }
  void validate() const;
};

// Deterministic pseudo-random feature map, uniform values in [0, 1).
FeatureMap make_synthetic_feature_map(std::uint64_t seed, int camera_index,
                                      int channels, int height, int width,
                                      double stride);

// Fixed seeded linear map from (sin, cos) of a camera yaw into feature space.
struct RotationEmbeddingTable {
  Eigen::Matrix<double, Eigen::Dynamic, 2> matrix;  // (channels, 2)
  std::uint64_t seed = 0;
};

// Entries uniform in [-1, 1), a pure function of (seed, channels).
RotationEmbeddingTable make_rotation_embedding_table(std::uint64_t seed,
                                                     int channels);

// matrix * [sin(theta), cos(theta)]^T. Periodic by construction.
Eigen::VectorXd rotation_embedding(double theta,
                                   const RotationEmbeddingTable& table);

// Adds the embedding vector at every spatial location (broadcast over h x w).
FeatureMap apply_rotation_embedding(const FeatureMap& f, double theta,
                                    const RotationEmbeddingTable& table);

// Bilinear sample at image coordinates; feature coordinates are
// (u / stride - 0.5, v / stride - 0.5), edge-clamped. Throws OutOfBoundsError
// for pixels outside the covered image.
Eigen::VectorXd bilinear_sample(const FeatureMap& f,
                                const Eigen::Vector2d& pixel);

// 2D sinusoidal encoding of the normalized cell-center coordinates.
// Channels pair up as (sin, cos); pairs alternate between x and y with a
// geometric frequency schedule (base 10000). Requires an even channel count.
Eigen::VectorXd position_encoding(const BevGridSpec& spec, int ix, int iy,
                                  int channels);

// Aggregated dense BEV tensor (c, ny, nx) plus per-cell hit counts.
struct BevFeature {
  int channels = 0;
  int ny = 0;
  int nx = 0;
  std::vector<double> data;  // [(c * ny + iy) * nx + ix]
  std::vector<std::uint32_t> hit_count;  // [iy * nx + ix]

  double at(int c, int ix, int iy) const {
    return data[(static_cast<std::size_t>(c) * ny + iy) * nx + ix];
  }
  Eigen::VectorXd cell_vector(int ix, int iy) const;
  std::uint32_t hits_at(int ix, int iy) const {
    return hit_count[static_cast<std::size_t>(iy) * nx + ix];
  }
};

struct AggregateOptions {
  bool use_rotation_embedding = false;
  bool use_position_encoding = true;
  const RotationEmbeddingTable* embedding_table = nullptr;
  int threads = 0;
};

// Mean-pools the bilinear samples of every hit into each cell (per-camera
// rotation embedding applied first when enabled), then adds the cell's
// position encoding. Cells without hits stay exactly zero. Hit order inside
// a cell is canonical, and cells are independent, so the result does not
// depend on the thread count.
BevFeature aggregate(const std::vector<FeatureMap>& features,
                     const MappingTable& table, const SceneConfig& scene,
                     const AggregateOptions& options);

// Binary formats (little-endian, f32 payload, channel-major):
//   FMAP: magic, version u32, channels u32, height u32, width u32,
//         camera_index u32, stride f64, payload f32[c*h*w].
//   BEVF: magic, version u32, channels u32, ny u32, nx u32,
//         payload f32[c*ny*nx], hit counts u32[ny*nx].
std::string serialize_feature_map(const FeatureMap& f);
FeatureMap deserialize_feature_map(std::string_view bytes,
                                   const std::string& context = "<memory>");
void save_feature_map(const FeatureMap& f, const std::filesystem::path& path);
FeatureMap load_feature_map(const std::filesystem::path& path);

std::string serialize_bev_feature(const BevFeature& f);
BevFeature deserialize_bev_feature(std::string_view bytes,
                                   const std::string& context = "<memory>");
void save_bev_feature(const BevFeature& f, const std::filesystem::path& path);
BevFeature load_bev_feature(const std::filesystem::path& path);

}  // namespace roadbev
