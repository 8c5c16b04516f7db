// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/features.hpp"

#include <cmath>
#include <unordered_map>

#include "roadbev/io.hpp"
#include "roadbev/parallel.hpp"
#include "roadbev/rng.hpp"

namespace roadbev {

void FeatureMap::validate() const {
  if (channels < 1 || height < 1 || width < 1) {
    throw ValidationError("FeatureMap: dimensions must be >= 1");
  }
  if (!(stride > 0.0)) {
    throw ValidationError("FeatureMap: stride must be positive");
  }
  if (data.size() != static_cast<std::size_t>(channels) * height * width) {
    throw ValidationError("FeatureMap: payload size does not match dims");
  }
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw ValidationError("FeatureMap: values must be finite");
    }
  }
}

FeatureMap make_synthetic_feature_map(std::uint64_t seed, int camera_index,
                                      int channels, int height, int width,
                                      double stride) {
  FeatureMap f;
  f.channels = channels;
  f.height = height;
  f.width = width;
  f.camera_index = camera_index;
  f.stride = stride;
  f.data.resize(static_cast<std::size_t>(channels) * height * width);
  Rng rng(Rng::mix(seed, 0x46454154ull + static_cast<std::uint64_t>(camera_index)));
  for (auto& v : f.data) v = rng.next_double();
  f.validate();
  return f;
}

RotationEmbeddingTable make_rotation_embedding_table(std::uint64_t seed,
                                                     int channels) {
  if (channels < 1) {
    throw ValidationError("rotation embedding table: channels must be >= 1");
  }
  RotationEmbeddingTable table;
  table.seed = seed;
  table.matrix.resize(channels, 2);
  Rng rng(Rng::mix(seed, 0x524f5445ull));
  for (int r = 0; r < channels; ++r) {
    for (int c = 0; c < 2; ++c) {
      table.matrix(r, c) = rng.uniform(-1.0, 1.0);
    }
  }
  return table;
}

Eigen::VectorXd rotation_embedding(double theta,
                                   const RotationEmbeddingTable& table) {
  if (!std::isfinite(theta)) {
    throw NonFiniteError("rotation_embedding: theta is not finite");
  }
  return table.matrix * Eigen::Vector2d(std::sin(theta), std::cos(theta));
}

FeatureMap apply_rotation_embedding(const FeatureMap& f, double theta,
                                    const RotationEmbeddingTable& table) {
  if (table.matrix.rows() != f.channels) {
    throw DimensionMismatch("apply_rotation_embedding: table has " +
                            std::to_string(table.matrix.rows()) +
                            " rows, feature map has " +
                            std::to_string(f.channels) + " channels");
  }
  const Eigen::VectorXd e = rotation_embedding(theta, table);
  FeatureMap out = f;
  const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
  for (int c = 0; c < f.channels; ++c) {
    double* p = out.data.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) p[i] += e[c];
  }
  return out;
}

Eigen::VectorXd bilinear_sample(const FeatureMap& f,
                                const Eigen::Vector2d& pixel) {
  const double u = pixel.x();
  const double v = pixel.y();
  if (!(u >= 0.0 && u < f.image_width() && v >= 0.0 && v < f.image_height())) {
    throw OutOfBoundsError("bilinear_sample: pixel (" + std::to_string(u) +
                           ", " + std::to_string(v) + ") outside image " +
                           std::to_string(f.image_width()) + "x" +
                           std::to_string(f.image_height()));
  }
  const double fx = u / f.stride - 0.5;
  const double fy = v / f.stride - 0.5;
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const double tx = fx - x0f;
  const double ty = fy - y0f;
  auto clampi = [](double a, int hi) {
    return std::min(std::max(static_cast<int>(a), 0), hi);
  };
  const int x0 = clampi(x0f, f.width - 1);
  const int x1 = clampi(x0f + 1.0, f.width - 1);
  const int y0 = clampi(y0f, f.height - 1);
  const int y1 = clampi(y0f + 1.0, f.height - 1);
  const double w00 = (1.0 - tx) * (1.0 - ty);
  const double w10 = tx * (1.0 - ty);
  const double w01 = (1.0 - tx) * ty;
  const double w11 = tx * ty;

  Eigen::VectorXd out(f.channels);
  for (int c = 0; c < f.channels; ++c) {
    out[c] = w00 * f.at(c, y0, x0) + w10 * f.at(c, y0, x1) +
             w01 * f.at(c, y1, x0) + w11 * f.at(c, y1, x1);
  }
  return out;
}

Eigen::VectorXd position_encoding(const BevGridSpec& spec, int ix, int iy,
                                  int channels) {
  if (channels < 2 || channels % 2 != 0) {
    throw OddChannelsError("position_encoding: channel count must be even");
  }
  const Eigen::Vector2d c = spec.cell_center(ix, iy);  // checks the index
  const double xn = (c.x() - spec.x_min) / (spec.x_max - spec.x_min);
  const double yn = (c.y() - spec.y_min) / (spec.y_max - spec.y_min);

  const int pairs = channels / 2;
  const int freqs_per_coord = (pairs + 1) / 2;
  Eigen::VectorXd out(channels);
  for (int j = 0; j < pairs; ++j) {
    const double coord = (j % 2 == 0) ? xn : yn;
    const int k = j / 2;
    // Highest frequency spans one period across the grid; lower ones decay
    // geometrically down to base 1/10000.
    const double omega =
        kTwoPi * std::pow(10000.0, -static_cast<double>(k) / freqs_per_coord);
    out[2 * j] = std::sin(coord * omega);
    out[2 * j + 1] = std::cos(coord * omega);
  }
  return out;
}

Eigen::VectorXd BevFeature::cell_vector(int ix, int iy) const {
  Eigen::VectorXd out(channels);
  for (int c = 0; c < channels; ++c) out[c] = at(c, ix, iy);
  return out;
}

BevFeature aggregate(const std::vector<FeatureMap>& features,
                     const MappingTable& table, const SceneConfig& scene,
                     const AggregateOptions& options) {
  std::unordered_map<int, const FeatureMap*> by_camera;
  int channels = -1;
  for (const auto& f : features) {
    f.validate();
    if (channels < 0) {
      channels = f.channels;
    } else if (f.channels != channels) {
      throw ChannelMismatch("aggregate: feature maps disagree on channels (" +
                            std::to_string(channels) + " vs " +
                            std::to_string(f.channels) + ")");
    }
    by_camera[f.camera_index] = &f;
  }
  if (channels < 0) {
    throw MissingFeatureMap("aggregate: no feature maps supplied");
  }
  if (options.use_rotation_embedding && options.embedding_table == nullptr) {
    throw ValidationError(
        "aggregate: rotation embedding enabled but no table supplied");
  }

  // Per-camera preparation: check coverage and apply the rotation embedding
  // to each active camera's map before any sampling.
  std::unordered_map<int, FeatureMap> embedded;
  std::unordered_map<int, const FeatureMap*> source = by_camera;
  for (const auto& [cam_index, f] : by_camera) {
    if (cam_index < 0 || cam_index >= table.num_cameras ||
        static_cast<std::size_t>(cam_index) >= scene.cameras.size()) {
      throw DimensionMismatch("aggregate: feature map camera_index " +
                              std::to_string(cam_index) +
                              " outside the scene's camera list");
    }
    const auto& k = scene.cameras[static_cast<std::size_t>(cam_index)].intrinsics;
    if (std::abs(f->image_width() - k.width) > 1e-9 ||
        std::abs(f->image_height() - k.height) > 1e-9) {
      throw DimensionMismatch(
          "aggregate: feature map for camera " + std::to_string(cam_index) +
          " covers " + std::to_string(f->image_width()) + "x" +
          std::to_string(f->image_height()) + ", image is " +
          std::to_string(k.width) + "x" + std::to_string(k.height));
    }
    if (options.use_rotation_embedding) {
      const double theta = camera_yaw_in_frame(
          scene.cameras[static_cast<std::size_t>(cam_index)], scene.bev_frame);
      embedded.emplace(cam_index, apply_rotation_embedding(
                                      *f, theta, *options.embedding_table));
    }
  }
  if (options.use_rotation_embedding) {
    for (auto& [cam_index, f] : embedded) source[cam_index] = &f;
  }

  BevFeature out;
  out.channels = channels;
  out.nx = table.grid.nx;
  out.ny = table.grid.ny;
  out.data.assign(
      static_cast<std::size_t>(channels) * table.grid.cell_count(), 0.0);
  out.hit_count.assign(static_cast<std::size_t>(table.grid.cell_count()), 0);

  // Missing feature maps are only an error for cameras that actually
  // contribute hits; a masked camera's map may simply be absent.
  for (const auto& cell : table.cells) {
    for (const auto& hit : cell) {
      if (source.find(hit.camera_index) == source.end()) {
        throw MissingFeatureMap("aggregate: no feature map for camera " +
                                std::to_string(hit.camera_index));
      }
    }
  }

  const std::int64_t n_cells = table.grid.cell_count();
  parallel_for(n_cells, options.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t cell_index = begin; cell_index < end; ++cell_index) {
      const auto& hits = table.cells[static_cast<std::size_t>(cell_index)];
      if (hits.empty()) continue;
      const int ix = static_cast<int>(cell_index % table.grid.nx);
      const int iy = static_cast<int>(cell_index / table.grid.nx);
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(channels);
      for (const auto& hit : hits) {
        sum += bilinear_sample(*source.at(hit.camera_index),
                               Eigen::Vector2d(hit.u, hit.v));
      }
      Eigen::VectorXd value = sum / static_cast<double>(hits.size());
      if (options.use_position_encoding) {
        value += position_encoding(table.grid, ix, iy, channels);
      }
      for (int c = 0; c < channels; ++c) {
        out.data[(static_cast<std::size_t>(c) * out.ny + iy) * out.nx + ix] =
            value[c];
      }
      out.hit_count[static_cast<std::size_t>(cell_index)] =
          static_cast<std::uint32_t>(hits.size());
    }
  });

  return out;
}

namespace {
constexpr char kFeatureMagic[4] = {'F', 'M', 'A', 'P'};
constexpr char kBevMagic[4] = {'B', 'E', 'V', 'F'};
constexpr std::uint32_t kFeatureVersion = 1;
}  // namespace

std::string serialize_feature_map(const FeatureMap& f) {
  f.validate();
  std::string out;
  out.append(kFeatureMagic, 4);
  put_u32(out, kFeatureVersion);
  put_u32(out, static_cast<std::uint32_t>(f.channels));
  put_u32(out, static_cast<std::uint32_t>(f.height));
  put_u32(out, static_cast<std::uint32_t>(f.width));
  put_u32(out, static_cast<std::uint32_t>(f.camera_index));
  put_f64(out, f.stride);
  for (double v : f.data) put_f32(out, static_cast<float>(v));
  return out;
}

FeatureMap deserialize_feature_map(std::string_view bytes,
                                   const std::string& context) {
  ByteReader reader(bytes, context);
  if (reader.get_bytes(4) != std::string(kFeatureMagic, 4)) {
    throw ParseError(context + ": bad magic, expected FMAP");
  }
  if (reader.get_u32() != kFeatureVersion) {
    throw ParseError(context + ": unsupported FMAP version");
  }
  FeatureMap f;
  f.channels = static_cast<int>(reader.get_u32());
  f.height = static_cast<int>(reader.get_u32());
  f.width = static_cast<int>(reader.get_u32());
  f.camera_index = static_cast<int>(reader.get_u32());
  f.stride = reader.get_f64();
  if (f.channels < 1 || f.height < 1 || f.width < 1) {
    throw ParseError(context + ": non-positive dimensions");
  }
  f.data.resize(static_cast<std::size_t>(f.channels) * f.height * f.width);
  for (auto& v : f.data) v = static_cast<double>(reader.get_f32());
  if (!reader.at_end()) {
    throw ParseError(context + ": trailing bytes after payload");
  }
  f.validate();
  return f;
}

void save_feature_map(const FeatureMap& f, const std::filesystem::path& path) {
  write_file(path, serialize_feature_map(f));
}

FeatureMap load_feature_map(const std::filesystem::path& path) {
  return deserialize_feature_map(read_file(path), path.string());
}

std::string serialize_bev_feature(const BevFeature& f) {
  std::string out;
  out.append(kBevMagic, 4);
  put_u32(out, kFeatureVersion);
  put_u32(out, static_cast<std::uint32_t>(f.channels));
  put_u32(out, static_cast<std::uint32_t>(f.ny));
  put_u32(out, static_cast<std::uint32_t>(f.nx));
  for (double v : f.data) put_f32(out, static_cast<float>(v));
  for (std::uint32_t h : f.hit_count) put_u32(out, h);
  return out;
}

BevFeature deserialize_bev_feature(std::string_view bytes,
                                   const std::string& context) {
  ByteReader reader(bytes, context);
  if (reader.get_bytes(4) != std::string(kBevMagic, 4)) {
    throw ParseError(context + ": bad magic, expected BEVF");
  }
  if (reader.get_u32() != kFeatureVersion) {
    throw ParseError(context + ": unsupported BEVF version");
  }
  BevFeature f;
  f.channels = static_cast<int>(reader.get_u32());
  f.ny = static_cast<int>(reader.get_u32());
  f.nx = static_cast<int>(reader.get_u32());
  if (f.channels < 1 || f.ny < 1 || f.nx < 1) {
    throw ParseError(context + ": non-positive dimensions");
  }
  f.data.resize(static_cast<std::size_t>(f.channels) * f.ny * f.nx);
  for (auto& v : f.data) v = static_cast<double>(reader.get_f32());
  f.hit_count.resize(static_cast<std::size_t>(f.ny) * f.nx);
  for (auto& h : f.hit_count) h = reader.get_u32();
  if (!reader.at_end()) {
    throw ParseError(context + ": trailing bytes after payload");
  }
  return f;
}

void save_bev_feature(const BevFeature& f, const std::filesystem::path& path) {
  write_file(path, serialize_bev_feature(f));
}

BevFeature load_bev_feature(const std::filesystem::path& path) {
  return deserialize_bev_feature(read_file(path), path.string());
}

}  // namespace roadbev
