// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/mapping.hpp"

#include <cctype>
#include <cmath>

#include "roadbev/io.hpp"
#include "roadbev/parallel.hpp"

namespace roadbev {

void BevGridSpec::validate() const {
  if (nx < 1 || ny < 1) {
    throw ValidationError("BevGridSpec: nx and ny must be >= 1");
  }
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw ValidationError("BevGridSpec: ranges must be non-degenerate");
  }
  if (z_samples.empty()) {
    throw ValidationError("BevGridSpec: z_samples must be non-empty");
  }
  for (std::size_t i = 1; i < z_samples.size(); ++i) {
    if (!(z_samples[i] > z_samples[i - 1])) {
      throw ValidationError("BevGridSpec: z_samples must be strictly increasing");
    }
  }
}

Eigen::Vector2d BevGridSpec::cell_center(int ix, int iy) const {
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) {
    throw IndexOutOfRange("cell_center: index (" + std::to_string(ix) + ", " +
                          std::to_string(iy) + ") outside " +
                          std::to_string(nx) + "x" + std::to_string(ny));
  }
  return Eigen::Vector2d(x_min + (ix + 0.5) * cell_dx(),
                         y_min + (iy + 0.5) * cell_dy());
}

std::optional<std::pair<int, int>> BevGridSpec::cell_of(double x,
                                                        double y) const {
  const int ix = static_cast<int>(std::floor((x - x_min) / cell_dx()));
  const int iy = static_cast<int>(std::floor((y - y_min) / cell_dy()));
  if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return std::nullopt;
  return std::make_pair(ix, iy);
}

bool operator==(const BevGridSpec& a, const BevGridSpec& b) {
  return a.nx == b.nx && a.ny == b.ny && a.x_min == b.x_min &&
         a.x_max == b.x_max && a.y_min == b.y_min && a.y_max == b.y_max &&
         a.z_samples == b.z_samples;
}

CamMask CamMask::from_bitstring(const std::string& bits) {
  CamMask mask;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw ValidationError("CamMask: bitstring may contain only 0 and 1");
    }
    mask.active.push_back(c == '1' ? 1 : 0);
  }
  return mask;
}

void CamMask::validate(std::size_t num_cameras) const {
  if (active.size() != num_cameras) {
    throw MaskShapeMismatch("CamMask: " + std::to_string(active.size()) +
                            " entries for " + std::to_string(num_cameras) +
                            " cameras");
  }
  for (auto v : active) {
    if (v) return;
  }
  throw AllCamerasMasked("CamMask: at least one camera must stay active");
}

std::uint64_t CamMask::digest() const {
  return fnv1a(active.data(), active.size());
}

bool RoiBitmap::inside(double u, double v) const {
  int iu = static_cast<int>(std::lround(u));
  int iv = static_cast<int>(std::lround(v));
  iu = std::min(std::max(iu, 0), width - 1);
  iv = std::min(std::max(iv, 0), height - 1);
  return pixels[static_cast<std::size_t>(iv) * width + iu] == 255;
}

RoiBitmap RoiBitmap::intersect(const RoiBitmap& other) const {
  if (other.width != width || other.height != height) {
    throw MaskShapeMismatch("RoiBitmap::intersect: resolution mismatch");
  }
  RoiBitmap out = *this;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    out.pixels[i] = static_cast<std::uint8_t>(pixels[i] & other.pixels[i]);
  }
  return out;
}

RoiBitmap pgm_from_bytes(std::string_view bytes, const std::string& context) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {  // comment to end of line
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (start == pos) throw ParseError(context + ": truncated PGM header");
    return std::string(bytes.substr(start, pos - start));
  };

  if (next_token() != "P5") {
    throw ParseError(context + ": not a binary PGM (expected magic P5)");
  }
  RoiBitmap bitmap;
  int maxval = 0;
  try {
    bitmap.width = std::stoi(next_token());
    bitmap.height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(context + ": malformed PGM header field");
  }
  if (maxval != 255) {
    throw ParseError(context + ": PGM maxval must be 255");
  }
  if (bitmap.width < 1 || bitmap.height < 1) {
    throw ParseError(context + ": PGM size must be positive");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t need =
      static_cast<std::size_t>(bitmap.width) * bitmap.height;
  if (bytes.size() - pos < need) {
    throw ParseError(context + ": PGM payload truncated");
  }
  bitmap.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
  return bitmap;
}

RoiBitmap load_pgm(const std::filesystem::path& path) {
  return pgm_from_bytes(read_file(path), path.string());
}

std::string pgm_to_bytes(const RoiBitmap& bitmap) {
  std::string out = "P5\n" + std::to_string(bitmap.width) + " " +
                    std::to_string(bitmap.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(bitmap.pixels.data()),
             bitmap.pixels.size());
  return out;
}

void save_pgm(const RoiBitmap& bitmap, const std::filesystem::path& path) {
  write_file(path, pgm_to_bytes(bitmap));
}

void RoiMask::validate(const std::vector<CameraModel>& cameras) const {
  if (per_camera.size() != cameras.size()) {
    throw MaskShapeMismatch("RoiMask: " + std::to_string(per_camera.size()) +
                            " entries for " + std::to_string(cameras.size()) +
                            " cameras");
  }
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    if (!per_camera[i]) continue;
    const auto& bm = *per_camera[i];
    const auto& k = cameras[i].intrinsics;
    if (bm.width != k.width || bm.height != k.height) {
      throw MaskShapeMismatch(
          "RoiMask: bitmap for camera " + cameras[i].camera_id + " is " +
          std::to_string(bm.width) + "x" + std::to_string(bm.height) +
          ", image is " + std::to_string(k.width) + "x" +
          std::to_string(k.height));
    }
    if (bm.pixels.size() !=
        static_cast<std::size_t>(bm.width) * static_cast<std::size_t>(bm.height)) {
      throw MaskShapeMismatch("RoiMask: bitmap payload size mismatch");
    }
  }
}

std::uint64_t RoiMask::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < per_camera.size(); ++i) {
    const std::uint8_t present = per_camera[i] ? 1 : 0;
    h = fnv1a(&present, 1, h);
    if (per_camera[i]) {
      h = fnv1a(per_camera[i]->pixels.data(), per_camera[i]->pixels.size(), h);
    }
  }
  return h;
}

std::vector<ReferencePoint> reference_points(const BevGridSpec& spec) {
  spec.validate();
  std::vector<ReferencePoint> out;
  out.reserve(static_cast<std::size_t>(reference_point_count(spec)));
  for (int iy = 0; iy < spec.ny; ++iy) {
    for (int ix = 0; ix < spec.nx; ++ix) {
      const Eigen::Vector2d c = spec.cell_center(ix, iy);
      for (std::size_t iz = 0; iz < spec.z_samples.size(); ++iz) {
        out.push_back({ix, iy, static_cast<int>(iz),
                       Eigen::Vector3d(c.x(), c.y(), spec.z_samples[iz])});
      }
    }
  }
  return out;
}

std::int64_t reference_point_count(const BevGridSpec& spec) {
  spec.validate();
  return spec.cell_count() * static_cast<std::int64_t>(spec.z_samples.size());
}

MappingTable build_mapping(const SceneConfig& scene, const BevGridSpec& spec,
                           const CamMask& cam_mask, const RoiMask* roi,
                           int threads) {
  spec.validate();
  scene.validate();
  cam_mask.validate(scene.cameras.size());
  if (roi) roi->validate(scene.cameras);

  MappingTable table;
  table.grid = spec;
  table.num_cameras = static_cast<int>(scene.cameras.size());
  table.scene_id = scene.scene_id;
  table.scene_digest = fnv1a(scene.scene_id);
  table.cam_mask_digest = cam_mask.digest();
  table.roi_mask_digest = roi ? roi->digest() : 0;
  table.cells.resize(static_cast<std::size_t>(spec.cell_count()));

  const RigidTransform bev_to_world = scene.bev_frame.inverse();
  const int n_z = static_cast<int>(spec.z_samples.size());

  std::vector<int> active_indices;
  for (std::size_t i = 0; i < cam_mask.active.size(); ++i) {
    if (cam_mask.active[i]) active_indices.push_back(static_cast<int>(i));
  }

  // Cells are independent, so any partition of the row range yields the same
  // table; per-cell hit order is canonical (camera ascending, z ascending).
  parallel_for(spec.ny, threads, [&](std::int64_t row_begin, std::int64_t row_end) {
    for (std::int64_t iy = row_begin; iy < row_end; ++iy) {
      for (int ix = 0; ix < spec.nx; ++ix) {
        auto& cell =
            table.cells[static_cast<std::size_t>(iy) * spec.nx + ix];
        const Eigen::Vector2d c = spec.cell_center(ix, static_cast<int>(iy));
        for (int cam_index : active_indices) {
          const auto& cam = scene.cameras[static_cast<std::size_t>(cam_index)];
          const RoiBitmap* bitmap =
              roi && roi->per_camera[static_cast<std::size_t>(cam_index)]
                  ? &*roi->per_camera[static_cast<std::size_t>(cam_index)]
                  : nullptr;
          for (int iz = 0; iz < n_z; ++iz) {
            const Eigen::Vector3d world = bev_to_world.apply(
                Eigen::Vector3d(c.x(), c.y(), spec.z_samples[iz]));
            const auto proj = project(cam, world);
            if (!proj) continue;
            const double u = proj->pixel.x();
            const double v = proj->pixel.y();
            if (!cam.intrinsics.contains(u, v)) continue;
            if (bitmap && !bitmap->inside(u, v)) continue;
            cell.push_back(MappingHit{static_cast<std::uint16_t>(cam_index),
                                      static_cast<std::uint16_t>(iz), u, v});
          }
        }
      }
    }
  });

  return table;
}

std::int64_t MappingTable::total_hits() const {
  std::int64_t n = 0;
  for (const auto& cell : cells) n += static_cast<std::int64_t>(cell.size());
  return n;
}

CoverageStats coverage_stats(const MappingTable& table) {
  CoverageStats stats;
  stats.hits_per_camera.assign(static_cast<std::size_t>(table.num_cameras), 0);
  for (const auto& cell : table.cells) {
    if (!cell.empty()) ++stats.cells_with_hits;
    for (const auto& hit : cell) {
      ++stats.hits_per_camera[hit.camera_index];
    }
  }
  const auto total = static_cast<double>(table.grid.cell_count());
  stats.empty_cell_fraction =
      (total - static_cast<double>(stats.cells_with_hits)) / total;
  return stats;
}

namespace {
constexpr char kMappingMagic[4] = {'B', 'M', 'A', 'P'};
constexpr std::uint32_t kMappingVersion = 1;
}  // namespace

std::string serialize_mapping(const MappingTable& table) {
  std::string out;
  out.append(kMappingMagic, 4);
  put_u32(out, kMappingVersion);
  put_u32(out, static_cast<std::uint32_t>(table.grid.nx));
  put_u32(out, static_cast<std::uint32_t>(table.grid.ny));
  put_u32(out, static_cast<std::uint32_t>(table.grid.z_samples.size()));
  put_u32(out, static_cast<std::uint32_t>(table.num_cameras));
  put_f64(out, table.grid.x_min);
  put_f64(out, table.grid.x_max);
  put_f64(out, table.grid.y_min);
  put_f64(out, table.grid.y_max);
  for (double z : table.grid.z_samples) put_f64(out, z);
  put_u64(out, table.scene_digest);
  put_u64(out, table.cam_mask_digest);
  put_u64(out, table.roi_mask_digest);
  for (const auto& cell : table.cells) {
    put_u32(out, static_cast<std::uint32_t>(cell.size()));
  }
  for (const auto& cell : table.cells) {
    for (const auto& hit : cell) {
      put_u16(out, hit.camera_index);
      put_u16(out, hit.z_level);
      put_f64(out, hit.u);
      put_f64(out, hit.v);
    }
  }
  return out;
}

MappingTable deserialize_mapping(std::string_view bytes,
                                 const std::string& context) {
  ByteReader reader(bytes, context);
  if (reader.get_bytes(4) != std::string(kMappingMagic, 4)) {
    throw ParseError(context + ": bad magic, expected BMAP");
  }
  const std::uint32_t version = reader.get_u32();
  if (version != kMappingVersion) {
    throw ParseError(context + ": unsupported BMAP version " +
                     std::to_string(version));
  }
  MappingTable table;
  table.grid.nx = static_cast<int>(reader.get_u32());
  table.grid.ny = static_cast<int>(reader.get_u32());
  const std::uint32_t n_z = reader.get_u32();
  table.num_cameras = static_cast<int>(reader.get_u32());
  table.grid.x_min = reader.get_f64();
  table.grid.x_max = reader.get_f64();
  table.grid.y_min = reader.get_f64();
  table.grid.y_max = reader.get_f64();
  table.grid.z_samples.clear();
  for (std::uint32_t i = 0; i < n_z; ++i) {
    table.grid.z_samples.push_back(reader.get_f64());
  }
  table.grid.validate();
  table.scene_digest = reader.get_u64();
  table.cam_mask_digest = reader.get_u64();
  table.roi_mask_digest = reader.get_u64();
  const std::int64_t cell_count = table.grid.cell_count();
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(cell_count));
  for (auto& c : counts) c = reader.get_u32();
  table.cells.resize(static_cast<std::size_t>(cell_count));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    table.cells[i].resize(counts[i]);
    for (auto& hit : table.cells[i]) {
      hit.camera_index = reader.get_u16();
      hit.z_level = reader.get_u16();
      hit.u = reader.get_f64();
      hit.v = reader.get_f64();
    }
  }
  if (!reader.at_end()) {
    throw ParseError(context + ": trailing bytes after hit records");
  }
  return table;
}

void save_mapping(const MappingTable& table,
                  const std::filesystem::path& path) {
  write_file(path, serialize_mapping(table));
}

MappingTable load_mapping(const std::filesystem::path& path) {
  return deserialize_mapping(read_file(path), path.string());
}

}  // namespace roadbev
